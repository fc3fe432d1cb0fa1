"""Top-down evaluation of guessed-occupancy counts over a tree-model.

This is the recursion shared by the independent-set and homomorphism
solvers. A *state* is a pair (pattern vertex, label); a guess S is a
bitmask of states. For a node a, IS(a, S) counts the admissible vertex
assignments in G[V_a] whose occupied states at a are exactly S,
weighted by a monomial in the evaluation variable. All values are
computed for many evaluation points at once: every numpy vector below
has one lane per (prime, point) pair, reduced by ``mods`` lane-wise.

Data flow is accumulator passing: a query adds ``sign * value`` into a
slot of its caller's buffer instead of returning a fresh value. This
keeps each frame's own state to at most cap + 1 residues per lane,
where cap = |cc(F)| is bounded by the number of states.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .settrans import submasks
from .tree_model import TreeModel

MAX_STATES = 30


def lane_pow(base: np.ndarray, e: int, mods: np.ndarray) -> np.ndarray:
    out = np.ones_like(base)
    b = base % mods
    while e:
        if e & 1:
            out = out * b % mods
        b = b * b % mods
        e >>= 1
    return out


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass
class StateSpace:
    """States, per-node conflict relation and renamings for one problem.

    ``leaf_terms[a]`` maps a leaf's guess S to the exponent-weight pairs
    making up its value: the leaf value is the sum of lane monomials
    ``coef * t^e`` over entries (coef, e).
    """

    model: TreeModel
    num_states: int
    state_label: list[int]
    present: list[int]
    conflict: dict[int, list[int]]
    image: dict[int, list[int]]
    leaf_terms: dict[int, dict[int, list[tuple[int, int]]]]

    def components(self, a: int, eq: int) -> list[int]:
        """Connected components of F^{a,beta} on vertex set eq, by union-find."""
        conf = self.conflict[a]
        members = bits(eq)
        parent = {x: x for x in members}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x in members:
            nb = conf[x] & eq
            for y in bits(nb):
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[rx] = ry
        comps: dict[int, int] = {}
        for x in members:
            r = find(x)
            comps[r] = comps.get(r, 0) | (1 << x)
        return sorted(comps.values())

    def is_conflicting(self, a: int, sigma: int, S: int) -> bool:
        return bool(self.conflict[a][sigma] & S)

    def preimage(self, b: int, Z: int) -> int:
        img = self.image[b]
        pre = 0
        for sigma in bits(self.present[b]):
            if Z >> img[sigma] & 1:
                pre |= 1 << sigma
        return pre

    def reach(self, b: int) -> int:
        """Image of every state present at b; PIS(b, Z) vanishes unless Z lies inside."""
        cache = self.__dict__.setdefault("_reach", {})
        if b not in cache:
            cache[b] = self.image_of(b, self.present[b])
        return cache[b]

    def image_of(self, b: int, D: int) -> int:
        img = self.image[b]
        out = 0
        for sigma in bits(D):
            out |= 1 << img[sigma]
        return out


@dataclass
class Counters:
    """Instrumentation: live frames and per-frame residue counts."""

    frames: int = 0
    max_frames: int = 0
    max_frame_residues: int = 0
    calls: dict = field(default_factory=dict)
    memo_entries: int = 0

    def enter(self, kind: str, residues: int) -> None:
        self.frames += 1
        if self.frames > self.max_frames:
            self.max_frames = self.frames
        if residues > self.max_frame_residues:
            self.max_frame_residues = residues
        self.calls[kind] = self.calls.get(kind, 0) + 1

    def leave(self) -> None:
        self.frames -= 1


_ZERO = object()


class Evaluator:
    """Evaluates IS(a,S), T-chains, TIS and PIS at a batch of lanes.

    memoize: cache IS and PIS values per (node, guess); off by default so
    that no per-subproblem table exists.
    collapse: replace the alpha/gamma enumeration by its telescoped sum.
    The signed chain sum over alpha and gamma reduces to the single term
    TIS(a, S, beta) whose 1_>= part is exactly the conflict-free states
    of S; the flag exists for throughput and is cross-checked in tests.
    """

    def __init__(
        self,
        space: StateSpace,
        xs: np.ndarray,
        mods: np.ndarray,
        memoize: bool = False,
        collapse: bool = False,
        counters: Counters | None = None,
        frame_limit: int | None = None,
    ):
        self.sp = space
        self.m = space.model
        self.xs = np.asarray(xs, dtype=np.int64)
        self.mods = np.asarray(mods, dtype=np.int64)
        self.L = len(self.xs)
        self.memoize = memoize
        self.collapse = collapse
        self.ct = counters if counters is not None else Counters()
        self.frame_limit = frame_limit
        self._is_memo: dict[tuple[int, int], np.ndarray] = {}
        self._pis_memo: dict[tuple[int, int], np.ndarray] = {}
        self._zeta_memo: dict[tuple, np.ndarray] = {}
        self._pow_cache: dict[int, np.ndarray] = {}

    # lane helpers

    def _zeros(self, rows: int) -> np.ndarray:
        return np.zeros((rows, self.L), dtype=np.int64)

    def _power(self, e: int) -> np.ndarray:
        v = self._pow_cache.get(e)
        if v is None:
            v = lane_pow(self.xs, e, self.mods)
            self._pow_cache[e] = v
        return v

    def _add(self, tgt: np.ndarray, idx: int, sign: int, val) -> None:
        if sign > 0:
            tgt[idx] += val
        else:
            tgt[idx] -= val
        tgt[idx] %= self.mods

    def _enter(self, kind: str, residues: int) -> None:
        self.ct.enter(kind, residues)
        if self.frame_limit is not None and self.ct.frames > self.frame_limit:
            raise AssertionError(f"live frames {self.ct.frames} exceed {self.frame_limit}")

    # public queries

    def root_total(self) -> np.ndarray:
        """Sum over all S of IS(root, S): the polynomial at every lane."""
        root = self.m.root
        self._enter("root", 1)
        acc = self._zeros(1)
        for S in submasks(self.sp.present[root]):
            self._is(root, S, acc, 0, 1)
        self.ct.leave()
        return acc[0]

    def IS(self, a: int, S: int) -> np.ndarray:
        acc = self._zeros(1)
        self._is(a, S, acc, 0, 1)
        return acc[0]

    def PIS(self, b: int, S: int) -> np.ndarray:
        acc = self._zeros(1)
        self._pis(b, S, acc, 0)
        return acc[0]

    def T(self, a: int, S: int, alpha_ge: int, c: int, gamma_eq: int) -> np.ndarray:
        acc = self._zeros(1)
        order = bits(alpha_ge)
        self._chain(a, S, order, c, S & ~alpha_ge, gamma_eq, acc, 0, 1)
        return acc[0]

    def TIS(self, a: int, S: int, beta_eq: int) -> np.ndarray:
        acc = self._zeros(1)
        self._tis(a, S, beta_eq, acc, 0, 1)
        return acc[0]

    # recursion

    def _leaf_value(self, a: int, S: int):
        terms = self.sp.leaf_terms[a].get(S)
        if not terms:
            return None
        val = np.zeros(self.L, dtype=np.int64)
        for coef, e in terms:
            val = (val + coef * self._power(e)) % self.mods
        return val

    def _is(self, a: int, S: int, tgt: np.ndarray, idx: int, sign: int) -> None:
        self._enter("IS", 0)
        if self.m.is_leaf(a):
            v = self._leaf_value(a, S)
            if v is not None:
                self._add(tgt, idx, sign, v)
        elif S & ~self.sp.present[a]:
            pass
        elif self.memoize:
            key = (a, S)
            v = self._is_memo.get(key)
            if v is None:
                buf = self._zeros(1)
                self._is_body(a, S, buf, 0, 1)
                v = buf[0]
                self._is_memo[key] = v
                self.ct.memo_entries += 1
            self._add(tgt, idx, sign, v)
        else:
            self._is_body(a, S, tgt, idx, sign)
        self.ct.leave()

    def _is_body(self, a: int, S: int, tgt: np.ndarray, idx: int, sign: int) -> None:
        conf = self.sp.conflict[a]
        free = 0
        for sigma in bits(S):
            if not conf[sigma] & S:
                free |= 1 << sigma
        if self.collapse:
            self._tis(a, S, S & ~free, tgt, idx, sign)
            return
        # alpha ranges over {1_=, 2_>=}^S, encoded by its 2_>= part; a
        # 2_>= state that conflicts inside S forces the branch to zero
        for ge in submasks(S):
            if ge & ~free:
                continue
            self._chain(a, S, bits(ge), 0, S & ~ge, 0, tgt, idx, sign)

    def _chain(self, a, S, order, c, alpha_eq, gamma_eq, tgt, idx, sign) -> None:
        self._enter("T", 0)
        if c == len(order):
            self._tis(a, S, alpha_eq | gamma_eq, tgt, idx, sign)
        else:
            s = 1 << order[c]
            self._chain(a, S, order, c + 1, alpha_eq, gamma_eq, tgt, idx, sign)
            self._chain(a, S, order, c + 1, alpha_eq, gamma_eq | s, tgt, idx, -sign)
        self.ct.leave()

    def _tis(self, a: int, S: int, beta_eq: int, tgt: np.ndarray, idx: int, sign: int) -> None:
        comps = self.sp.components(a, beta_eq)
        cap = len(comps)
        if self.memoize:
            self._tis_cached(a, S, comps, cap, tgt, idx, sign)
            return
        self._enter("TIS", cap + 1)
        prod = self._zeros(cap + 1)
        size = S.bit_count()
        kids = self.m.children[a]
        for Y in submasks(S):
            prod[:] = 0
            prod[0] = 1
            for b in kids:
                self._zpis(b, Y, comps, prod, cap)
            s = sign if (size - Y.bit_count()) % 2 == 0 else -sign
            self._add(tgt, idx, s, prod[cap])
        self.ct.leave()

    def _tis_cached(self, a: int, S: int, comps: list[int], cap: int, tgt, idx: int, sign: int) -> None:
        """TIS for the memoizing mode: child factors come from a cache,
        children that see none of S contribute one constant factor, and
        factors equal to 1 or 0 short-circuit the product."""
        self._enter("TIS", cap + 1)
        size = S.bit_count()
        sp = self.sp
        static, dynamic = [], []
        for b in self.m.children[a]:
            (dynamic if sp.reach(b) & S else static).append(b)
        base = self._product(static, 0, comps, cap, None)
        if base is not _ZERO:
            for Y in submasks(S):
                prod = self._product(dynamic, Y, comps, cap, base)
                if prod is _ZERO:
                    continue
                s = sign if (size - Y.bit_count()) % 2 == 0 else -sign
                if prod is None:
                    if cap == 0:
                        self._add(tgt, idx, s, 1)
                else:
                    self._add(tgt, idx, s, prod[cap])
        self.ct.leave()

    def _product(self, kids, Y: int, comps: list[int], cap: int, prod):
        """Truncated product of cached child factors; None is 1, _ZERO is 0."""
        mods = self.mods
        for b in kids:
            inner, kind = self._zeta_cached(b, Y, comps, cap)
            if kind == 1:
                continue
            if kind == 0:
                return _ZERO
            if prod is None:
                prod = inner
                continue
            out = prod * inner[0] % mods
            for r in range(1, cap + 1):
                out[r:] += prod[: cap + 1 - r] * inner[r] % mods
            prod = out % mods
        return prod

    def _zeta_cached(self, b: int, Y: int, comps: list[int], cap: int):
        reach = self.sp.reach(b)
        Yr = Y & reach
        key = (b, Yr, cap, tuple(C for C in comps if C & reach))
        hit = self._zeta_memo.get(key)
        if hit is None:
            self._enter("PIS", cap + 1)
            inner = self._zeta_inner(b, Yr, comps, cap)
            self.ct.leave()
            if not inner.any():
                kind = 0
            elif (inner[0] == 1).all() and not inner[1:].any():
                kind = 1
            else:
                kind = None
            hit = (inner, kind)
            self._zeta_memo[key] = hit
            self.ct.memo_entries += 1
        return hit

    def _zpis(self, b: int, Y: int, comps: list[int], prod: np.ndarray, cap: int) -> None:
        """Multiply prod in place by sum over Z subset of Y of g_b(Z)."""
        self._enter("PIS", cap + 1)
        inner = self._zeta_inner(b, Y & self.sp.reach(b), comps, cap)
        mods = self.mods
        for deg in range(cap, -1, -1):
            acc = prod[deg] * inner[0] % mods
            for r in range(1, deg + 1):
                acc += prod[deg - r] * inner[r] % mods
            prod[deg] = acc % mods
        self.ct.leave()

    def _zeta_inner(self, b: int, Yr: int, comps: list[int], cap: int) -> np.ndarray:
        """Row r: sum of PIS(b, Z) over Z inside Yr covering exactly r whole components."""
        inner = self._zeros(cap + 1)
        for Z in submasks(Yr):
            r = 0
            for C in comps:
                x = C & Z
                if x == 0:
                    continue
                if x != C:
                    r = -1
                    break
                r += 1
            if r >= 0:
                self._pis(b, Z, inner, r)
        return inner

    def _pis(self, b: int, Z: int, tgt: np.ndarray, idx: int) -> None:
        """Add PIS(b, Z) = sum of IS(b, D) over D with rho(D) = Z."""
        if self.memoize:
            key = (b, Z)
            v = self._pis_memo.get(key)
            if v is None:
                buf = self._zeros(1)
                self._pis_loop(b, Z, buf, 0)
                v = buf[0]
                self._pis_memo[key] = v
                self.ct.memo_entries += 1
            self._add(tgt, idx, 1, v)
        else:
            self._pis_loop(b, Z, tgt, idx)

    def _pis_loop(self, b: int, Z: int, tgt: np.ndarray, idx: int) -> None:
        pre = self.sp.preimage(b, Z)
        for D in submasks(pre):
            if self.sp.image_of(b, D) == Z:
                self._is(b, D, tgt, idx, 1)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("SHRUB_THREADS", "1")))
    except ValueError:
        return 1


def evaluate_batched(
    make: Callable[[np.ndarray, np.ndarray, Counters], Evaluator],
    xs: np.ndarray,
    mods: np.ndarray,
    counters: Counters,
) -> np.ndarray:
    """Evaluate the root total, split across SHRUB_THREADS workers by lane chunks."""
    workers = thread_count()
    if workers == 1 or len(xs) < 2 * workers:
        return make(xs, mods, counters).root_total()
    from concurrent.futures import ThreadPoolExecutor

    chunks = np.array_split(np.arange(len(xs)), workers)
    subs = [Counters() for _ in chunks]
    with ThreadPoolExecutor(workers) as ex:
        parts = list(ex.map(lambda cs: make(xs[cs[0]], mods[cs[0]], cs[1]).root_total(), zip(chunks, subs)))
    for c in subs:
        counters.max_frames = max(counters.max_frames, c.max_frames)
        counters.max_frame_residues = max(counters.max_frame_residues, c.max_frame_residues)
        counters.memo_entries += c.memo_entries
        for k, v in c.calls.items():
            counters.calls[k] = counters.calls.get(k, 0) + v
    return np.concatenate(parts)
