"""Counting list homomorphisms with prescribed size and weight of phi^-1(R).

States are pairs (pattern vertex, label). The bivariate count
Q(x, y) = sum q[c][w] x^c y^w is folded into one variable through
x = t^(nW*+1), y = t and recovered by Chinese remaindering.

Pattern vertices that are adjacent to every pattern vertex, themselves
included, never cause a conflict. They are left untracked: a vertex
mapped there contributes to the leaf value of the empty guess, exactly
like a vertex outside the independent set in the independent set
recursion. For the independent set pattern this yields the one-state
instance, and for the dominating set pattern the states (T,i), (F,i).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .engine import MAX_STATES, Evaluator, StateSpace, evaluate_batched
from .errors import CapabilityError, DomainError, ParseError
from .is_solver import SolveStats
from .modmath import crt_reconstruct_all
from .tree_model import TreeModel


@dataclass(frozen=True)
class PatternGraph:
    m: int
    edges: frozenset[tuple[int, int]]
    R: frozenset[int]

    def __post_init__(self) -> None:
        norm = set()
        for u, v in self.edges:
            if not (0 <= u < self.m and 0 <= v < self.m):
                raise DomainError(f"pattern edge ({u},{v}) out of range")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))
        if any(not 0 <= h < self.m for h in self.R):
            raise DomainError("R must be a subset of the pattern vertices")
        object.__setattr__(self, "R", frozenset(self.R))

    def edge_set(self) -> set[tuple[int, int]]:
        """Ordered pairs in both directions, loops as (h, h)."""
        out = set()
        for u, v in self.edges:
            out.add((u, v))
            out.add((v, u))
        return out

    def adjacent(self, h: int, g: int) -> bool:
        return (min(h, g), max(h, g)) in self.edges

    def universal(self, h: int) -> bool:
        return all(self.adjacent(h, g) for g in range(self.m))

    def to_text(self) -> str:
        lines = ["pattern 1", f"m {self.m}"]
        lines += [f"edge {u} {v}" for u, v in sorted(self.edges)]
        lines.append("R " + " ".join(map(str, sorted(self.R))))
        return "\n".join(lines) + "\n"


def make_pattern(m: int, edges: Iterable[tuple[int, int]], R: Iterable[int]) -> PatternGraph:
    return PatternGraph(m, frozenset(edges), frozenset(R))


def is_pattern() -> PatternGraph:
    """u = 0 marks the independent set, v = 1 (looped) takes everything else."""
    return make_pattern(2, [(0, 1), (1, 1)], [0])


def oct_pattern() -> PatternGraph:
    """Triangle u, v, w with a loop on u = 0; R = {u}."""
    return make_pattern(3, [(0, 1), (0, 2), (1, 2), (0, 0)], [0])


def clique_pattern(q: int) -> PatternGraph:
    return make_pattern(q, [(i, j) for i in range(q) for j in range(i + 1, q)], range(q))


def parse_pattern(text: str | bytes) -> PatternGraph:
    if isinstance(text, bytes):
        text = text.decode()
    m = None
    edges: set[tuple[int, int]] = set()
    R: set[int] | None = None
    header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not header:
            if parts != ["pattern", "1"]:
                raise ParseError("expected header 'pattern 1'", lineno)
            header = True
            continue
        try:
            nums = [int(x) for x in parts[1:]]
        except ValueError:
            raise ParseError("expected integers", lineno) from None
        if m is None:
            if parts[0] != "m" or len(nums) != 1 or nums[0] < 1:
                raise ParseError("expected 'm <count>'", lineno)
            m = nums[0]
        elif parts[0] == "edge":
            if len(nums) != 2 or not all(0 <= x < m for x in nums):
                raise ParseError("edge needs two pattern vertices in range", lineno)
            e = (min(nums), max(nums))
            if e in edges:
                raise ParseError(f"duplicate pattern edge {e[0]} {e[1]}", lineno)
            edges.add(e)
        elif parts[0] == "R":
            if R is not None:
                raise ParseError("duplicate R line", lineno)
            if not all(0 <= x < m for x in nums):
                raise ParseError("R index out of range", lineno)
            R = set(nums)
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", lineno)
    if not header or m is None:
        raise ParseError("missing header or 'm' line")
    return make_pattern(m, edges, R or ())


@dataclass
class HomInstance:
    model: TreeModel
    pattern: PatternGraph
    lists: Mapping[int, Iterable[int]] | None = None
    weights: Mapping[int, int] | None = None
    C: int = 0
    W: int = 0

    def weight(self, v: int) -> int:
        return 1 if self.weights is None else int(self.weights.get(v, 1))

    def allowed(self, v: int) -> list[int]:
        if self.lists is None or v not in self.lists:
            return list(range(self.pattern.m))
        return sorted(self.lists[v])

    @property
    def wstar(self) -> int:
        return max((self.weight(v) for v in range(self.model.n)), default=1)


def encode_exponent(j1: int, j2: int, n: int, wstar: int) -> int:
    """j1 (n W* + 1) + j2: positional, hence injective, on the valid range."""
    if not (0 <= j1 <= n and 0 <= j2 <= n * wstar):
        raise DomainError(f"({j1},{j2}) outside [0,{n}] x [0,{n * wstar}]")
    return j1 * (n * wstar + 1) + j2


def hom_space(inst: HomInstance, eliminate_universal: bool = True) -> StateSpace:
    m, H = inst.model, inst.pattern
    k = m.k
    if H.m * k > MAX_STATES:
        raise CapabilityError(f"|V(H)| * k = {H.m * k} exceeds {MAX_STATES}")
    for v in range(m.n):
        if any(not 0 <= h < H.m for h in inst.allowed(v)):
            raise DomainError(f"list of vertex {v} references a missing pattern vertex")
    tracked = [h for h in range(H.m) if not (eliminate_universal and H.universal(h))]
    pos = {h: x for x, h in enumerate(tracked)}
    num = len(tracked) * k

    def st(h: int, i: int) -> int:
        return pos[h] * k + i

    n, ws = m.n, inst.wstar
    base = n * ws + 1

    def expo(h: int, v: int) -> int:
        return base + inst.weight(v) if h in H.R else 0

    present = [0] * len(m.parent)
    for a, lab in enumerate(m.labeling):
        for v, i in lab.items():
            for h in inst.allowed(v):
                if h in pos:
                    present[a] |= 1 << st(h, i)
    conflict = {}
    for a, mat in m.matrix.items():
        rows = []
        for h in tracked:
            for i in range(k):
                mask = 0
                for g in tracked:
                    if H.adjacent(h, g):
                        continue
                    for j in range(k):
                        if mat[i, j]:
                            mask |= 1 << st(g, j)
                rows.append(mask)
        conflict[a] = rows
    image = {}
    for b, rho in m.rename.items():
        image[b] = [st(h, rho[i]) for h in tracked for i in range(k)]
    leaf_terms = {}
    for a, v in m.leaf_vertex.items():
        i = m.leaf_label[a]
        terms: dict[int, list[tuple[int, int]]] = {}
        for h in inst.allowed(v):
            key = 1 << st(h, i) if h in pos else 0
            terms.setdefault(key, []).append((1, expo(h, v)))
        leaf_terms[a] = terms
    labels = [x % k for x in range(num)]
    return StateSpace(m, num, labels, present, conflict, image, leaf_terms)


@dataclass
class HomTable:
    """All counts q[C][W], keyed (C, W) for nonzero entries."""

    counts: dict[tuple[int, int], int]
    stats: SolveStats = field(default_factory=SolveStats)

    def get(self, C: int, W: int) -> int:
        return self.counts.get((C, W), 0)

    def total(self) -> int:
        return sum(self.counts.values())


def count_hom_table(
    inst: HomInstance,
    memoize: bool = False,
    collapse: bool = False,
    eliminate_universal: bool = True,
    stats: SolveStats | None = None,
    root_guess: int | None = None,
) -> HomTable:
    """Reconstruct every coefficient of Q(x, y) in one CRT pass.

    root_guess restricts the root sum to a single guess S, which gives
    the counts with per-label occupancy exactly S.
    """
    sp = hom_space(inst, eliminate_universal)
    st = stats if stats is not None else SolveStats()
    m = inst.model
    n, ws = m.n, inst.wstar
    base = n * ws + 1
    degree = encode_exponent(n, n * ws, n, ws)
    bound = inst.pattern.m**n
    limit = (sp.num_states + 4) * (m.depth + 1)
    t0 = time.perf_counter()

    def batch(xs, mods):
        def make(x, md, ct):
            return Evaluator(sp, x, md, memoize=memoize, collapse=collapse, counters=ct, frame_limit=limit)

        if root_guess is not None:
            return make(xs, mods, st.counters).IS(m.root, root_guess)
        return evaluate_batched(make, xs, mods, st.counters)

    coeffs, info = crt_reconstruct_all(batch, degree, bound)
    st.primes, st.lanes = info["primes"], info["lanes"]
    st.seconds = time.perf_counter() - t0
    counts = {}
    for e, c in enumerate(coeffs):
        if c:
            counts[divmod(e, base)] = c
    return HomTable(counts, st)


def count_hom(inst: HomInstance, **kw) -> int:
    """Number of list homomorphisms with |phi^-1(R)| = C and weight W."""
    return count_hom_table(inst, **kw).get(inst.C, inst.W)


def q_coloring_count(m: TreeModel, q: int, **kw) -> int:
    if q < 1:
        raise DomainError("q must be positive")
    if q * m.k > MAX_STATES:
        raise CapabilityError(f"q * k = {q * m.k} exceeds {MAX_STATES}")
    inst = HomInstance(m, clique_pattern(q), C=m.n, W=m.n)
    return count_hom(inst, **kw)


def oct_minimum(m: TreeModel, **kw) -> int:
    """Least C with a homomorphism to the looped-u triangle placing C vertices on u."""
    if 3 * m.k > MAX_STATES:
        raise CapabilityError(f"3k = {3 * m.k} exceeds {MAX_STATES}")
    table = count_hom_table(HomInstance(m, oct_pattern()), **kw)
    for C in range(m.n + 1):
        if table.get(C, C) > 0:
            return C
    raise AssertionError("mapping everything to u is always a homomorphism")
