"""Brute-force reference implementations used as ground truth."""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import CapabilityError
from .graph import LabeledGraph, cut_size

IS_CAP = 24
CUT_CAP = 24
DOM_CAP = 20
HOM_CAP = 10**7
LCS_CAP = 10**7


def brute_is_polynomial(g: LabeledGraph) -> list[int]:
    if g.n > IS_CAP:
        raise CapabilityError(f"n = {g.n} exceeds {IS_CAP}")
    counts = [0] * (g.n + 1)
    adj = g.adj

    # extend independent sets vertex by vertex; only independent sets are visited
    def grow(v: int, chosen: int, size: int) -> None:
        if v == g.n:
            counts[size] += 1
            return
        grow(v + 1, chosen, size)
        if not adj[v] & chosen:
            grow(v + 1, chosen | 1 << v, size + 1)

    grow(0, 0, 0)
    while len(counts) > 1 and counts[-1] == 0:
        counts.pop()
    return counts


def independence_number(g: LabeledGraph) -> int:
    """Exact independence number by branching on a max-degree vertex."""
    adj = g.adj

    def best(cand: int) -> int:
        if cand == 0:
            return 0
        # vertices of degree <= 1 inside cand can be taken greedily
        x = cand
        while x:
            low = x & -x
            v = low.bit_length() - 1
            if (adj[v] & cand).bit_count() <= 1:
                return 1 + best(cand & ~low & ~adj[v])
            x ^= low
        v = max(range(g.n), key=lambda u: (adj[u] & cand).bit_count() if cand >> u & 1 else -1)
        return max(best(cand & ~(1 << v)), 1 + best(cand & ~(1 << v) & ~adj[v]))

    return best((1 << g.n) - 1)


def brute_max_cut(g: LabeledGraph) -> int:
    if g.n > CUT_CAP:
        raise CapabilityError(f"n = {g.n} exceeds {CUT_CAP}")
    if g.n == 0:
        return 0
    best = 0
    # fixing vertex n-1 on the outside halves the work by symmetry
    for x in range(1 << (g.n - 1)):
        best = max(best, cut_size(g, [v for v in range(g.n) if x >> v & 1]))
    return best


def _dominating(g: LabeledGraph, d: int) -> bool:
    full = (1 << g.n) - 1
    cover = d
    x = d
    while x:
        low = x & -x
        cover |= g.adj[low.bit_length() - 1]
        x ^= low
    return cover == full


def brute_min_domset(g: LabeledGraph) -> int:
    if g.n > DOM_CAP:
        raise CapabilityError(f"n = {g.n} exceeds {DOM_CAP}")
    best = g.n
    for d in range(1 << g.n):
        if d.bit_count() < best and _dominating(g, d):
            best = d.bit_count()
    return best


def brute_domset_table(g: LabeledGraph, weights: Sequence[int]) -> dict[tuple[int, int], int]:
    """Number of dominating sets per (size, total weight)."""
    if g.n > DOM_CAP:
        raise CapabilityError(f"n = {g.n} exceeds {DOM_CAP}")
    table: dict[tuple[int, int], int] = {}
    for d in range(1 << g.n):
        if _dominating(g, d):
            key = (d.bit_count(), sum(weights[v] for v in range(g.n) if d >> v & 1))
            table[key] = table.get(key, 0) + 1
    return table


def brute_count_hom(
    g: LabeledGraph,
    pattern,
    lists: Mapping[int, Iterable[int]] | None,
    weights: Mapping[int, int] | Sequence[int] | None,
    C: int,
    W: int,
) -> int:
    """Count list homomorphisms g -> pattern with |phi^-1(R)| = C and weight W."""
    m = pattern.m
    if m**g.n > HOM_CAP:
        raise CapabilityError(f"{m}^{g.n} maps exceed {HOM_CAP}")
    hedges = pattern.edge_set()
    allowed = [
        sorted(lists[v]) if lists is not None and v in lists else list(range(m)) for v in range(g.n)
    ]
    w = [1] * g.n
    if weights is not None:
        w = [weights[v] for v in range(g.n)]
    edges = g.sorted_edges()
    R = set(pattern.R)
    count = 0
    for phi in product(*allowed):
        if any((phi[u], phi[v]) not in hedges for u, v in edges):
            continue
        inR = [v for v in range(g.n) if phi[v] in R]
        if len(inR) == C and sum(w[v] for v in inR) == W:
            count += 1
    return count


def brute_lcs(strings: Sequence[str], t: int) -> bool:
    """True iff the strings share a common subsequence of length >= t."""
    if not strings:
        return t <= 0
    size = 1
    for s in strings:
        size *= len(s) + 1
    if size > LCS_CAP:
        raise CapabilityError("N^r exceeds the table cap")
    return lcs_length(strings) >= t


def lcs_length(strings: Sequence[str]) -> int:
    from functools import lru_cache

    r = len(strings)

    @lru_cache(maxsize=None)
    def L(pos: tuple[int, ...]) -> int:
        if any(pos[i] == len(strings[i]) for i in range(r)):
            return 0
        best = max(L(pos[:i] + (pos[i] + 1,) + pos[i + 1 :]) for i in range(r))
        c = strings[0][pos[0]]
        if all(strings[i][pos[i]] == c for i in range(r)):
            best = max(best, 1 + L(tuple(x + 1 for x in pos)))
        return best

    return L(tuple(0 for _ in strings))
