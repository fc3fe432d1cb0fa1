"""The nine acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line (printed in the terminal summary)
and then asserts, so a failing criterion also fails the run.
"""

import math
import time
from itertools import product

import numpy as np

from shrubsolve import realize, validate
from shrubsolve.domset_solver import min_dominating_set, single_trial
from shrubsolve.engine import MAX_STATES
from shrubsolve.hom_solver import (
    HomInstance,
    clique_pattern,
    count_hom,
    count_hom_table,
    hom_space,
    is_pattern,
    make_pattern,
    oct_pattern,
    q_coloring_count,
)
from shrubsolve.is_solver import SolveStats, is_polynomial
from shrubsolve.lcsgen import LcsInstance, build_reduction, gadget_independence_checks, size_bound
from shrubsolve.maxcut_solver import MaxCut, character_sum, max_cut
from shrubsolve.models import (
    complete_bipartite_model,
    complete_model,
    cycle_model,
    edgeless_model,
    path_model,
)
from shrubsolve.modmath import crt_reconstruct_coefficient, is_prime, next_prime
from shrubsolve.oracle import (
    brute_count_hom,
    brute_is_polynomial,
    brute_lcs,
    brute_max_cut,
    brute_min_domset,
    independence_number,
)
from shrubsolve.settrans import cover_product, mobius, zeta

from acceptance_log import record
from corpus import models
from test_hom_solver import histogram
from test_maxcut_solver import brute_A, kane_samples


def test_criterion_1_is_correctness():
    corpus = models(200, 1001, n=(1, 10), d=(1, 3), k=(1, 3))
    for n in range(1, 9):
        corpus += [complete_model(n), path_model(n), edgeless_model(n)]
    corpus += [cycle_model(n) for n in range(3, 9)]
    corpus += [complete_bipartite_model(a, b) for a in range(1, 4) for b in range(1, 5)]
    t0 = time.perf_counter()
    bad = sum(is_polynomial(m) != brute_is_polynomial(realize(m)) for m in corpus)
    secs = time.perf_counter() - t0
    ok = bad == 0 and secs < 120
    assert record(1, ok, f"{len(corpus)} models, {bad} mismatches, {secs:.1f}s (limit 120s)")


def test_criterion_2_crt():
    rng = np.random.default_rng(1002)
    bad = checked = 0
    for _ in range(100):
        n = int(rng.integers(1, 25))
        coeffs = [int(x) for x in rng.integers(0, 2**n + 1, size=n + 1)]

        def oracle(p, s):
            acc = 0
            for c in reversed(coeffs):
                acc = (acc * s + c) % p
            return acc

        for t in range(n + 1):
            checked += 1
            bad += crt_reconstruct_coefficient(oracle, n, t, bound=2**n) != coeffs[t]
    assert record(2, bad == 0, f"100 polynomials, {checked} coefficients, {bad} wrong")


def cover_by_pairs(fs):
    """Cover product of all factors by pairwise union-convolution in int64."""
    size = len(fs[0])
    idx = np.arange(size)
    union = np.bitwise_or.outer(idx, idx).ravel()
    h = np.array(fs[0], dtype=np.int64)
    for f in fs[1:]:
        nxt = np.zeros(size, dtype=np.int64)
        np.add.at(nxt, union, np.outer(h, np.array(f, dtype=np.int64)).ravel())
        h = nxt
    return h


def test_criterion_3_transforms():
    rng = np.random.default_rng(1003)
    failures = 0
    for trial in range(1000):
        u = int(rng.integers(0, 11))
        t = int(rng.integers(1, 5))
        fs = [[int(x) for x in rng.integers(-5, 6, size=1 << u)] for _ in range(t)]
        for f in fs:
            failures += mobius(zeta(f)) != f
        lhs = zeta([int(x) for x in cover_by_pairs(fs)])
        prod = np.ones(1 << u, dtype=object)
        for f in fs:
            prod = prod * np.array(zeta(f), dtype=object)
        failures += lhs != list(prod)
        if u <= 3 and trial % 10 == 0:
            # the enumerating definition agrees with the pairwise one
            failures += [cover_product(fs, x) for x in range(1 << u)] != list(cover_by_pairs(fs))
    assert record(3, failures == 0, f"1000 families (u <= 10, t <= 4), {failures} failures")


def test_criterion_4_hom():
    rng = np.random.default_rng(1004)
    named = [is_pattern(), oct_pattern(), clique_pattern(2), clique_pattern(3)]
    bad = count = 0
    for i, m in enumerate(models(120, 1004, n=(1, 8))):
        if i % 2 == 0:
            h = named[(i // 2) % 4]
        else:
            hm = int(rng.integers(1, 4))
            pairs = [(a, b) for a in range(hm) for b in range(a, hm)]
            h = make_pattern(hm, [e for e in pairs if rng.random() < 0.5], [x for x in range(hm) if rng.random() < 0.5])
        lists = None
        if rng.random() < 0.3:
            lists = {v: [x for x in range(h.m) if rng.random() < 0.7] for v in range(m.n)}
        weights = {v: int(rng.integers(1, 4)) for v in range(m.n)} if rng.random() < 0.5 else None
        inst = HomInstance(m, h, lists=lists, weights=weights)
        g = realize(m)
        w = [inst.weight(v) for v in range(m.n)]
        table = count_hom_table(inst, memoize=True, collapse=True)
        ref = histogram(g, inst, w)
        keys = sorted(ref) or [(0, 0)]
        C, W = keys[int(rng.integers(len(keys)))]
        inst.C, inst.W = C, W
        direct = count_hom(inst, memoize=True, collapse=True)
        bad += table.counts != ref
        bad += direct != brute_count_hom(g, h, lists, w, C, W)
        count += 1
    six = q_coloring_count(complete_model(3), 3)
    ok = bad == 0 and count >= 100 and six == 6
    assert record(4, ok, f"{count} instances, {bad} mismatches, qcol(K3,3)={six}")


def test_criterion_5_maxcut():
    bad = 0
    corpus = models(100, 1005, n=(1, 12), k=(1, 2))
    for m in corpus:
        bad += max_cut(m, memoize=True) != brute_max_cut(realize(m))
    samples = 0
    kane_bad = 0
    for m, a, s, rng in kane_samples(60, 1005):
        g = realize(m)
        mc = MaxCut(m, memoize=True)
        B = int(rng.integers(mc.inner_edges[a] + 1))
        p = next_prime(mc.C ** (m.k + 1) + 1)
        A = brute_A(m, g, a, s, B)
        for _ in range(3):
            kane_bad += mc.kane_poly_eval(a, s, B, p) != -A % p
            p = next_prime(p)
        samples += 1
    char_bad = 0
    for p in filter(is_prime, range(2, 201)):
        for ell in range(3 * (p - 1) + 1):
            want = p - 1 if ell % (p - 1) == 0 else 0
            char_bad += character_sum(ell, [], p) != want
    ok = bad == 0 and kane_bad == 0 and char_bad == 0 and samples >= 50
    detail = (
        f"{len(corpus)} models with {bad} mismatches; {samples} Kane samples with {kane_bad} "
        f"mismatches; character sums for p <= 200 with {char_bad} failures"
    )
    assert record(5, ok, detail)


def test_criterion_6_domset():
    corpus = models(30, 1006, n=(1, 10))
    truth = [brute_min_domset(realize(m)) for m in corpus]
    unsound = hits = runs = 0
    for m, opt in zip(corpus, truth):
        for seed in range(100):
            got = single_trial(m, (seed, 0))
            unsound += got < opt
            hits += got == opt
            runs += 1
    exact = sum(min_dominating_set(m, trials=20, seed=1) == opt for m, opt in zip(corpus, truth))
    freq = hits / runs
    ok = unsound == 0 and exact == len(corpus) and freq >= 0.4
    detail = f"{runs} runs with {unsound} below optimum; trials=20 exact on {exact}/{len(corpus)}; single-trial success {freq:.3f} (need 0.4)"
    assert record(6, ok, detail)


def lcs_family():
    for N in (2, 4):
        for r in (1, 2):
            for t in (1, 2, 3):
                if t > N:
                    continue
                for strs in product(("".join(w) for w in product("ab", repeat=N)), repeat=r):
                    yield LcsInstance(N, t, "ab", strs)


def test_criterion_7_reduction():
    structural = alpha_checked = alpha_bad = solver_ok = solver_bad = 0
    skipped_cap = skipped_time = 0
    solved: dict[str, int] = {}
    for idx, inst in enumerate(lcs_family()):
        out = build_reduction(inst)
        m = out.model
        logN = int(math.log2(inst.N))
        fine = (
            validate(m) == []
            and realize(m) == out.graph
            and m.depth <= 2 * math.log2(inst.t) + 4
            and m.k == 14 * inst.r * logN - 3
            and out.graph.n <= size_bound(inst)
        )
        structural += not fine
        yes = brute_lcs(list(inst.strings), inst.t)
        # exact independence numbers of N=4, r=2, t=3 graphs take up to a minute each: sample 1 in 16
        if (inst.N, inst.r, inst.t) != (4, 2, 3) or idx % 16 == 0:
            alpha_checked += 1
            alpha_bad += (independence_number(out.graph) >= out.goal) != yes
        if m.k > MAX_STATES:
            skipped_cap += 1
            continue
        if (inst.N, inst.t) == (4, 3):
            skipped_time += 1  # 3^20 root guesses
            continue
        key = m.to_text()
        if key not in solved:
            solved[key] = len(is_polynomial(m, memoize=True, collapse=True)) - 1
        if (solved[key] >= out.goal) == yes:
            solver_ok += 1
        else:
            solver_bad += 1
    total = idx + 1
    ok = structural == 0 and alpha_bad == 0 and solver_bad == 0 and skipped_cap == 0 and skipped_time == 0
    detail = (
        f"{total} instances; structure failures {structural}; alpha leg {alpha_checked} checked, {alpha_bad} wrong; "
        f"solver leg {solver_ok} agree, {solver_bad} disagree, {skipped_cap} beyond the {MAX_STATES}-state cap (k=53), "
        f"{skipped_time} infeasible by runtime (N=4, t=3)"
    )
    assert record(7, ok, detail)


def test_criterion_8_space():
    worst = []
    bad = 0
    for m in models(60, 1008, n=(1, 10)):
        st = SolveStats()
        is_polynomial(m, stats=st)
        c = st.counters
        bad += c.max_frames > (m.k + 4) * (m.depth + 1) or c.max_frame_residues > m.k + 1 or c.memo_entries != 0
        worst.append(c.max_frames / ((m.k + 4) * (m.depth + 1)))
    for i, m in enumerate(models(30, 1018, n=(1, 7), d=(1, 2), k=(1, 2))):
        h = [is_pattern(), oct_pattern(), clique_pattern(2), clique_pattern(3)][i % 4]
        inst = HomInstance(m, h)
        states = hom_space(inst).num_states
        st = SolveStats()
        count_hom_table(inst, stats=st)
        c = st.counters
        bad += c.max_frames > (states + 4) * (m.depth + 1) or c.max_frame_residues > states + 1 or c.memo_entries != 0
    detail = f"90 runs with memoization off, {bad} violations; peak frames at most {max(worst):.2f} of the bound"
    assert record(8, bad == 0, detail)


def test_criterion_9_gadgets():
    count = 0
    diags = []
    for inst in lcs_family():
        out = build_reduction(inst)
        diags += gadget_independence_checks(out)
        count += 1
    assert record(9, not diags, f"{count} instances, {len(diags)} diagnostics" + (f", first: {diags[0]}" if diags else ""))
