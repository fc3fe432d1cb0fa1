from itertools import product

import numpy as np
import pytest

from shrubsolve import CapabilityError, DomainError, ParseError, realize
from shrubsolve.hom_solver import (
    HomInstance,
    clique_pattern,
    count_hom,
    count_hom_table,
    encode_exponent,
    is_pattern,
    make_pattern,
    oct_minimum,
    oct_pattern,
    parse_pattern,
    q_coloring_count,
)
from shrubsolve.models import complete_model, edgeless_model, flat_model, path_model
from shrubsolve.oracle import brute_count_hom

from corpus import MODES, models


def loopless_k2():
    return make_pattern(2, [(0, 1)], [0, 1])


def test_count_examples():
    assert count_hom(HomInstance(complete_model(2), loopless_k2(), C=2, W=2)) == 2
    assert count_hom(HomInstance(complete_model(3), loopless_k2(), C=3, W=3)) == 0
    assert count_hom(HomInstance(path_model(3), is_pattern(), C=2, W=2)) == 1


def test_encode_exponent():
    assert encode_exponent(1, 2, 1, 2) == 5
    assert encode_exponent(0, 0, 5, 3) == 0
    assert encode_exponent(2, 0, 3, 1) == 8
    with pytest.raises(DomainError):
        encode_exponent(4, 0, 3, 1)


def test_encode_exponent_injective():
    for n in range(1, 5):
        for ws in range(1, 4):
            seen = {encode_exponent(a, b, n, ws) for a in range(n + 1) for b in range(n * ws + 1)}
            assert len(seen) == (n + 1) * (n * ws + 1)


def test_q_coloring():
    assert q_coloring_count(complete_model(3), 3) == 6
    assert q_coloring_count(complete_model(3), 2) == 0
    assert q_coloring_count(edgeless_model(2), 2) == 4


def test_oct():
    assert oct_minimum(path_model(3)) == 0
    assert oct_minimum(complete_model(3)) == 1
    assert oct_minimum(complete_model(4)) == 2


def test_parse_pattern():
    h = parse_pattern("pattern 1\nm 2\nedge 0 1\nedge 1 1\nR 0\n")
    assert h == is_pattern()
    assert parse_pattern(h.to_text()) == h
    with pytest.raises(ParseError):
        parse_pattern("pattern 1\nm 2\nedge 0 2\n")


def test_state_cap():
    m = flat_model(11, [0], np.zeros((11, 11), dtype=bool))
    with pytest.raises(CapabilityError):
        count_hom(HomInstance(m, clique_pattern(3)))


def random_instance(rng, m):
    hm = int(rng.integers(1, 4))
    pairs = [(i, j) for i in range(hm) for j in range(i, hm)]
    edges = [e for e in pairs if rng.random() < 0.5]
    R = [h for h in range(hm) if rng.random() < 0.5]
    lists = None
    if rng.random() < 0.5:
        lists = {v: [h for h in range(hm) if rng.random() < 0.7] for v in range(m.n)}
    weights = None
    if rng.random() < 0.5:
        weights = {v: int(rng.integers(1, 4)) for v in range(m.n)}
    return HomInstance(m, make_pattern(hm, edges, R), lists=lists, weights=weights)


def histogram(g, inst, w):
    # one pass over all maps, independent of the oracle's filtered count
    H = inst.pattern
    hedges = H.edge_set()
    out = {}
    for phi in product(*(inst.allowed(v) for v in range(g.n))):
        if all((phi[u], phi[v]) in hedges for u, v in g.edges):
            inR = [v for v in range(g.n) if phi[v] in H.R]
            key = (len(inR), sum(w[v] for v in inR))
            out[key] = out.get(key, 0) + 1
    return out


def check_table(inst, **kw):
    g = realize(inst.model)
    w = [inst.weight(v) for v in range(g.n)]
    table = count_hom_table(inst, **kw)
    # oracle spot checks: the two largest entries and one empty cell
    for (C, W), c in sorted(table.counts.items(), key=lambda kv: -kv[1])[:2]:
        assert brute_count_hom(g, inst.pattern, inst.lists, w, C, W) == c
    assert brute_count_hom(g, inst.pattern, inst.lists, w, g.n, 0) == table.get(g.n, 0)
    assert table.counts == histogram(g, inst, w)
    return table


def corpus_for(mode, count, seed, n):
    # the faithful mode recomputes every subproblem, so it gets shallower models
    if mode["memoize"]:
        return models(count, seed, n=n)
    return models(count, seed, n=n, d=(1, 2), k=(1, 2))


@pytest.mark.parametrize("mode", MODES)
def test_corpus_matches_brute_force(mode):
    rng = np.random.default_rng(4)
    for m in corpus_for(mode, 35, 8, (1, 7)):
        check_table(random_instance(rng, m), **mode)


@pytest.mark.parametrize("mode", [MODES[0], MODES[2]])
def test_named_patterns_match_brute_force(mode):
    corpus = models(20, 12, n=(1, 8)) if mode["memoize"] else models(12, 12, n=(1, 6), d=(1, 2), k=(1, 2))
    for m in corpus:
        for h in (is_pattern(), oct_pattern(), clique_pattern(2), clique_pattern(3)):
            check_table(HomInstance(m, h), **mode)


def test_empty_R_only_at_origin():
    rng = np.random.default_rng(6)
    for m in models(15, 14, n=(1, 7)):
        inst = random_instance(rng, m)
        inst.pattern = make_pattern(inst.pattern.m, inst.pattern.edges, [])
        table = count_hom_table(inst, memoize=True)
        assert set(table.counts) <= {(0, 0)}


def test_without_universal_elimination():
    rng = np.random.default_rng(7)
    for m in models(10, 15, n=(1, 6)):
        inst = random_instance(rng, m)
        a = count_hom_table(inst, memoize=True).counts
        b = count_hom_table(inst, memoize=True, eliminate_universal=False).counts
        assert a == b
