"""Max Cut over a tree-model by signature recursion and character sums.

For a node a and a signature s (per-label counts of the cut side X at
a), f_a(s) is the best number of cut edges inside G[V_a]. It is found
by testing, for B from the number of edges downwards, whether some
tuple of child signatures is consistent with value B. That test is the
vanishing of a character sum modulo large primes, so only the current
B, prime and a few counters are live at each level.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .errors import ContractViolation, DomainError
from .modmath import PrimeField, ceil_log2, floor_log2, next_prime
from .tree_model import TreeModel, realize

Signature = tuple[int, ...]

CHARSUM_LIMIT = 1 << 12  # auto mode runs the x-sum literally only below this


def edgelabel(s: Sequence[int], i: int, j: int, sizes: Sequence[int]) -> int:
    """Cut edges between label classes i and j at a context, per unit of M."""
    if i != j:
        return s[i] * (sizes[j] - s[j]) + s[j] * (sizes[i] - s[i])
    return s[i] * (sizes[i] - s[i])


def m_value(s: Sequence[int], M, sizes: Sequence[int]) -> int:
    k = len(s)
    return sum(edgelabel(s, i, j, sizes) for i in range(k) for j in range(i, k) if M[i][j])


def signatures(sizes: Sequence[int]) -> Iterator[Signature]:
    """Mixed-radix lexicographic enumeration of 0 <= s_i <= sizes[i]."""
    return product(*(range(x + 1) for x in sizes))


def encode(s: Sequence[int], B: int, C: int) -> int:
    """Base-C positional value of s with B appended."""
    value = 0
    for x in reversed([*s, B]):
        value = value * C + x
    return value


class MaxCut:
    """Solver state for one model: sizes per context and the caches when memoizing."""

    def __init__(self, m: TreeModel, memoize: bool = False, strategy: str = "auto"):
        self.m = m
        self.k = m.k
        self.memoize = memoize
        self.strategy = strategy
        self.g = realize(m)
        n = m.n
        self.C = 2 * n * n + 1
        self.threshold = n * self.k * ceil_log2(n)
        self.first_prime = next_prime(self.C ** (self.k + 1))
        self.kane_calls = 0
        self.primes_tested = 0
        lab = m.labeling
        self.sizes = [m.label_counts(a) for a in range(len(m.parent))]
        # sizes at context ab: V_b counted by lambda_a
        self.edge_sizes: dict[int, tuple[int, ...]] = {}
        for b, p in enumerate(m.parent):
            if p >= 0:
                c = [0] * self.k
                for v in lab[b]:
                    c[lab[p][v]] += 1
                self.edge_sizes[b] = tuple(c)
        self.inner_edges = []
        for a in range(len(m.parent)):
            va = lab[a]
            self.inner_edges.append(sum(1 for u, v in self.g.edges if u in va and v in va))
        if memoize:
            self.f_node = lru_cache(maxsize=None)(self.f_node)  # type: ignore[method-assign]
            self.f_edge = lru_cache(maxsize=None)(self.f_edge)  # type: ignore[method-assign]

    def _check(self, s: Sequence[int], sizes: Sequence[int]) -> None:
        if len(s) != self.k or any(not 0 <= x <= y for x, y in zip(s, sizes)):
            raise DomainError(f"signature {tuple(s)} invalid for sizes {tuple(sizes)}")

    def f_node(self, a: int, s: Signature) -> int:
        m = self.m
        self._check(s, self.sizes[a])
        if m.is_leaf(a):
            return 0
        for B in range(self.inner_edges[a], -1, -1):
            c, p = 0, self.first_prime
            while c <= self.threshold:
                self.primes_tested += 1
                if self.kane_poly_eval(a, s, B, p) != 0:
                    return B
                c += floor_log2(p)
                p = next_prime(p)
        raise AssertionError("every valid signature has a witness at some B >= 0")

    def f_edge(self, b: int, s: Signature) -> int:
        """Best f_b over b-signatures whose renamed counts equal s."""
        self._check(s, self.edge_sizes[b])
        rho = self.m.rename[b]
        best = None
        for sb in signatures(self.sizes[b]):
            agg = [0] * self.k
            for j, x in enumerate(sb):
                agg[rho[j]] += x
            if tuple(agg) == tuple(s):
                val = self.f_node(b, sb)
                if best is None or val > best:
                    best = val
        assert best is not None, "valid signatures have a nonempty preimage"
        return best

    def exponents(self, a: int, s: Signature, B: int) -> tuple[int, list[list[int]]]:
        """The exponent of the outer factor and, per child, the inner exponents."""
        M = self.m.matrix[a]
        C = self.C
        e0 = encode(s, B - m_value(s, M, self.sizes[a]), C)
        per_child = []
        for b in self.m.children[a]:
            sz = self.edge_sizes[b]
            per_child.append(
                [-encode(sj, self.f_edge(b, sj) - m_value(sj, M, sz), C) for sj in signatures(sz)]
            )
        return e0, per_child

    def kane_poly_eval(self, a: int, s: Signature, B: int, p: int, strategy: str | None = None) -> int:
        """P_{a,s}(B, p), which is congruent to -A(s, B) modulo p."""
        if self.m.is_leaf(a):
            raise ContractViolation("kane_poly_eval is defined on internal nodes")
        if p <= self.C ** (self.k + 1) + 1:
            raise ContractViolation("prime must exceed C^(k+1) + 1")
        self.kane_calls += 1
        e0, per_child = self.exponents(a, s, B)
        strategy = strategy or self.strategy
        if strategy == "auto":
            strategy = "character_sum" if p <= CHARSUM_LIMIT else "exponent_count"
        if strategy == "character_sum":
            return character_sum(e0, per_child, p)
        if strategy == "exponent_count":
            return exponent_count(e0, per_child, p)
        raise DomainError(f"unknown strategy {strategy!r}")


def character_sum(e0: int, per_child: list[list[int]], p: int) -> int:
    """sum over x in [1, p-1] of x^e0 * prod_j sum_e x^e, literally."""
    q = p - 1
    total = 0
    for start in range(1, p, 1 << 16):
        dt = object if p > 3_000_000_000 else np.int64  # int64 products stay below 2^63
        x = np.arange(start, min(p, start + (1 << 16)), dtype=dt)
        acc = _vpow(x, e0 % q, p)
        for exps in per_child:
            inner = np.zeros_like(acc)
            for e in exps:
                inner = (inner + _vpow(x, e % q, p)) % p
            acc = acc * inner % p
        total = (total + int(acc.sum() % p)) % p
    return total


def _vpow(x: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(x)
    b = x % p
    while e:
        if e & 1:
            out = out * b % p
        b = b * b % p
        e >>= 1
    return out


def exponent_count(e0: int, per_child: list[list[int]], p: int) -> int:
    """Same value via the orthogonality sum_x x^l = -[p-1 divides l] mod p.

    Counts child tuples whose total exponent vanishes modulo p - 1.
    """
    q = p - 1
    partial = {e0 % q: 1}
    for exps in per_child:
        nxt: dict[int, int] = {}
        for r, cnt in partial.items():
            for e in exps:
                key = (r + e) % q
                nxt[key] = nxt.get(key, 0) + cnt
        partial = nxt
    return -partial.get(0, 0) % p


def max_cut(m: TreeModel, memoize: bool = False, strategy: str = "auto") -> int:
    """Maximum cut of realize(m): the best f at the root over all root signatures."""
    mc = MaxCut(m, memoize=memoize, strategy=strategy)
    return max(mc.f_node(m.root, s) for s in signatures(mc.sizes[m.root]))


def f_leaf(m: TreeModel, leaf: int, s: Sequence[int]) -> int:
    if not m.is_leaf(leaf):
        raise DomainError("not a leaf")
    sizes = m.label_counts(leaf)
    if len(s) != m.k or any(not 0 <= x <= y for x, y in zip(s, sizes)):
        raise DomainError("invalid signature for this leaf")
    return 0


def kane_poly_eval(m: TreeModel, a: int, s: Sequence[int], B: int, fld: PrimeField, strategy: str = "auto") -> int:
    return MaxCut(m, memoize=True, strategy=strategy).kane_poly_eval(a, tuple(s), B, fld.p)


def f_node(m: TreeModel, a: int, s: Sequence[int], memoize: bool = True) -> int:
    return MaxCut(m, memoize=memoize).f_node(a, tuple(s))


def f_edge(m: TreeModel, a: int, b: int, s: Sequence[int], memoize: bool = True) -> int:
    if m.parent[b] != a:
        raise DomainError("b is not a child of a")
    return MaxCut(m, memoize=memoize).f_edge(b, tuple(s))
