from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shrubsolve import ContractViolation, DomainError, realize
from shrubsolve.maxcut_solver import (
    MaxCut,
    character_sum,
    edgelabel,
    encode,
    exponent_count,
    f_edge,
    f_leaf,
    f_node,
    kane_poly_eval,
    m_value,
    max_cut,
    signatures,
)
from shrubsolve.modmath import PrimeField, is_prime, next_prime
from shrubsolve.models import complete_model, cycle_model, edgeless_model, flat_model, path_model
from shrubsolve.oracle import brute_max_cut
from shrubsolve.tree_model import build_model

from corpus import models


def merge_model(inner=((0, 0), (0, 0))):
    return build_model(
        2,
        [-1, 0, 1, 1],
        {0: [[0, 0], [0, 0]], 1: inner},
        {1: [0, 0], 2: [0, 1], 3: [0, 1]},
        {2: 0, 3: 1},
        {2: 0, 3: 1},
    )


def cut_inside(g, verts, X):
    return sum(1 for u, v in g.edges if u in verts and v in verts and ((u in X) != (v in X)))


def sig(labels, X, k):
    s = [0] * k
    for v in X:
        s[labels[v]] += 1
    return tuple(s)


def brute_f(m, g, b, labels):
    """Best inner cut of G[V_b] per signature under the given labeling of V_b."""
    verts = sorted(m.labeling[b])
    best = {}
    for bits in range(1 << len(verts)):
        X = {v for i, v in enumerate(verts) if bits >> i & 1}
        key = sig(labels, X, m.k)
        best[key] = max(best.get(key, 0), cut_inside(g, set(verts), X))
    return best


def brute_A(m, g, a, s, B):
    """Child-signature tuples consistent with (s, B) at node a."""
    M = m.matrix[a]
    la = m.labeling[a]
    sizes = m.label_counts(a)
    tables, esizes = [], []
    for b in m.children[a]:
        lab = {v: la[v] for v in m.labeling[b]}
        tables.append(brute_f(m, g, b, lab))
        esizes.append(sig(lab, lab, m.k))
    target = B - m_value(s, M, sizes)
    count = 0
    for combo in product(*(sorted(t) for t in tables)):
        if tuple(map(sum, zip(*combo))) != tuple(s):
            continue
        total = sum(t[sj] - m_value(sj, M, sz) for t, sj, sz in zip(tables, combo, esizes))
        count += total == target
    return count


def test_max_cut_examples():
    assert max_cut(complete_model(2)) == 1
    assert max_cut(complete_model(3)) == 2
    assert max_cut(cycle_model(4)) == 4


def test_edgelabel_examples():
    assert edgelabel((1, 0), 0, 0, (2, 1)) == 1
    assert edgelabel((1, 0), 0, 1, (2, 1)) == 1
    assert edgelabel((0, 0), 0, 1, (2, 1)) == 0
    assert edgelabel((0, 0), 1, 1, (2, 1)) == 0


def test_m_value_examples():
    assert m_value((1, 1), [[0, 0], [0, 0]], (2, 1)) == 0
    assert m_value((1,), [[1]], (2,)) == 1
    assert m_value((1, 0), [[0, 1], [1, 0]], (2, 1)) == 1


def test_f_leaf():
    m = flat_model(2, [0], [[0, 0], [0, 0]])
    leaf = m.vertex_leaf[0]
    assert f_leaf(m, leaf, (0, 0)) == 0
    assert f_leaf(m, leaf, (1, 0)) == 0
    with pytest.raises(DomainError):
        f_leaf(m, leaf, (0, 1))


def test_f_edge_examples():
    m = edgeless_model(3)
    for v in range(3):
        b = m.vertex_leaf[v]
        assert f_edge(m, m.root, b, (1,)) == f_node(m, b, (1,)) == 0
    assert f_edge(merge_model(), 0, 1, (1, 0)) == 0
    joined = merge_model(((0, 1), (1, 0)))
    assert f_edge(joined, 0, 1, (1, 0)) == 1
    assert f_node(joined, 1, (1, 1)) == 0


def test_f_node_examples():
    m = complete_model(2)
    assert f_node(m, m.root, (1,)) == 1
    assert f_node(m, m.root, (0,)) == 0
    assert f_node(m, m.root, (2,)) == 0


@pytest.mark.parametrize("strategy", ["character_sum", "exponent_count"])
def test_kane_examples(strategy):
    m = complete_model(2)
    fld = PrimeField(83)
    assert kane_poly_eval(m, m.root, (1,), 1, fld, strategy) == 81
    assert kane_poly_eval(m, m.root, (1,), 0, fld, strategy) == 0
    assert kane_poly_eval(m, m.root, (0,), 0, fld, strategy) == 82


def test_kane_prime_contract():
    m = complete_model(2)
    with pytest.raises(ContractViolation):
        kane_poly_eval(m, m.root, (1,), 1, PrimeField(79))


def test_character_sum_fact():
    for p in range(2, 201):
        if not is_prime(p):
            continue
        for ell in range(3 * (p - 1) + 1):
            want = p - 1 if ell % (p - 1) == 0 else 0
            assert sum(pow(x, ell, p) for x in range(1, p)) % p == want
            assert character_sum(ell, [], p) == want
            assert exponent_count(ell, [], p) == want


def test_strategies_agree():
    rng = np.random.default_rng(0)
    for _ in range(200):
        p = int(rng.choice([101, 257, 1009, 4099]))
        e0 = int(rng.integers(-50, 50))
        kids = [list(rng.integers(-60, 60, size=int(rng.integers(1, 4)))) for _ in range(int(rng.integers(0, 3)))]
        kids = [[int(e) for e in ks] for ks in kids]
        assert character_sum(e0, kids, p) == exponent_count(e0, kids, p)


def test_encoding_injective():
    for n in range(1, 5):
        C = 2 * n * n + 1
        for k in (1, 2):
            seen = set()
            for s in product(range(n + 1), repeat=k):
                for B in range(-2 * n * n, 2 * n * n + 1):
                    seen.add(encode(s, B, C))
            assert len(seen) == (n + 1) ** k * (4 * n * n + 1)


def kane_samples(count, seed):
    """count (model, internal node, signature, rng) samples; nodes with more than 3 children are skipped."""
    rng = np.random.default_rng(seed)
    out = []
    batch = 0
    while len(out) < count:
        for m in models(count, seed + 7919 * batch, n=(2, 8), d=(1, 2), k=(1, 2)):
            internal = [a for a in range(len(m.parent)) if not m.is_leaf(a) and len(m.children[a]) <= 3]
            if not internal or len(out) == count:
                continue
            a = internal[int(rng.integers(len(internal)))]
            sizes = m.label_counts(a)
            s = tuple(int(rng.integers(x + 1)) for x in sizes)
            out.append((m, a, s, rng))
        batch += 1
    return out


def test_kane_matches_brute_enumerator():
    checked = 0
    for m, a, s, rng in kane_samples(90, 3):
        g = realize(m)
        mc = MaxCut(m, memoize=True)
        edges = mc.inner_edges[a]
        for B in {0, edges, int(rng.integers(edges + 1))}:
            A = brute_A(m, g, a, s, B)
            p = next_prime(mc.C ** (m.k + 1) + 1)
            for _ in range(5):
                assert mc.kane_poly_eval(a, s, B, p) == -A % p
                p = next_prime(p)
            checked += 1
    assert checked >= 50


def test_cut_decomposition():
    rng = np.random.default_rng(8)
    for m in models(30, 19, n=(2, 10)):
        g = realize(m)
        for a in range(len(m.parent)):
            if m.is_leaf(a):
                continue
            la = m.labeling[a]
            verts = set(la)
            X = {v for v in verts if rng.random() < 0.5}
            M = m.matrix[a]
            rhs = m_value(sig(la, X, m.k), M, m.label_counts(a))
            for b in m.children[a]:
                vb = set(m.labeling[b])
                lab = {v: la[v] for v in vb}
                rhs += cut_inside(g, vb, X & vb) - m_value(sig(lab, X & vb, m.k), M, sig(lab, vb, m.k))
            assert cut_inside(g, verts, X) == rhs


def test_corpus_memoized():
    for m in models(60, 23, n=(1, 12), k=(1, 2)):
        assert max_cut(m, memoize=True) == brute_max_cut(realize(m))


def test_corpus_faithful():
    for m in models(20, 29, n=(1, 7), d=(1, 2), k=(1, 2)):
        assert max_cut(m) == brute_max_cut(realize(m))


def test_signature_order():
    assert list(signatures((1, 2))) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 6))
def test_paths_and_cycles(n):
    assert max_cut(path_model(n), memoize=True) == n - 1
    if n >= 3:
        assert max_cut(cycle_model(n), memoize=True) == n - (n % 2)
