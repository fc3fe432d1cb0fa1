"""Independent set polynomial of a graph given by a tree-model.

States are the labels themselves. The polynomial is evaluated at every
point of F_p for enough primes p > n and its coefficients are recovered
by Chinese remaindering.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .engine import MAX_STATES, Counters, Evaluator, StateSpace, bits, evaluate_batched
from .errors import CapabilityError, ContractViolation, DomainError
from .modmath import PrimeField, crt_combine, crt_primes, crt_reconstruct_all, interpolate_all_mod_p, lanes_for
from .tree_model import TreeModel


def label_mask(labels: Iterable[int]) -> int:
    """Bitmask of 1-indexed labels."""
    m = 0
    for i in labels:
        m |= 1 << (i - 1)
    return m


def is_space(m: TreeModel) -> StateSpace:
    if m.k > MAX_STATES:
        raise CapabilityError(f"k = {m.k} exceeds the bitmask cap of {MAX_STATES}")
    k = m.k
    present = [0] * len(m.parent)
    for a, lab in enumerate(m.labeling):
        for i in lab.values():
            present[a] |= 1 << i
    conflict = {}
    for a, mat in m.matrix.items():
        conflict[a] = [sum(1 << j for j in range(k) if mat[i, j]) for i in range(k)]
    image = {b: list(rho) for b, rho in m.rename.items()}
    leaf_terms = {
        a: {0: [(1, 0)], 1 << m.leaf_label[a]: [(1, 1)]} for a in m.leaf_vertex
    }
    return StateSpace(m, k, list(range(k)), present, conflict, image, leaf_terms)


@dataclass
class SolveStats:
    primes: int = 0
    lanes: int = 0
    seconds: float = 0.0
    counters: Counters = field(default_factory=Counters)

    def frame_bound(self, states: int, depth: int) -> int:
        return (states + 4) * (depth + 1)


def _single(m: TreeModel, s: int, p: int, **kw) -> Evaluator:
    fld = PrimeField(p)
    return Evaluator(is_space(m), np.array([s % fld.p]), np.array([fld.p]), **kw)


def is_polynomial(
    m: TreeModel,
    memoize: bool = False,
    collapse: bool = False,
    stats: SolveStats | None = None,
) -> list[int]:
    """Coefficients q_0..q_n of the independent set polynomial of realize(m)."""
    sp = is_space(m)
    st = stats if stats is not None else SolveStats()
    n = m.n
    limit = (m.k + 4) * (m.depth + 1)
    t0 = time.perf_counter()

    def batch(xs, mods):
        def make(x, md, ct):
            return Evaluator(sp, x, md, memoize=memoize, collapse=collapse, counters=ct, frame_limit=limit)

        return evaluate_batched(make, xs, mods, st.counters)

    coeffs, info = crt_reconstruct_all(batch, n, 1 << n)
    st.primes, st.lanes = info["primes"], info["lanes"]
    st.seconds = time.perf_counter() - t0
    return trim(coeffs)


def is_coefficient(m: TreeModel, target: int, memoize: bool = False, collapse: bool = False) -> int:
    """Single coefficient q_target, interpolating only that index per prime."""
    n = m.n
    if not 0 <= target <= n:
        raise DomainError(f"coefficient index {target} outside [0,{n}]")
    sp = is_space(m)
    primes = crt_primes(n, 1 << n)
    res = []
    for p in primes:
        xs, mods = lanes_for([p])
        vals = Evaluator(sp, xs, mods, memoize=memoize, collapse=collapse).root_total()
        res.append(int(interpolate_all_mod_p(vals, p, target)[target]))
    return crt_combine(res, primes)[0]


def eval_IS(m: TreeModel, a: int, S: int, s: int, fld: PrimeField, memoize: bool = False) -> int:
    """IS(a, S) at x = s modulo p."""
    return int(_single(m, s, fld.p, memoize=memoize).IS(a, S)[0])


def eval_T_chain(
    m: TreeModel, a: int, S: int, alpha_ge: int, c: int, gamma_eq: int, s: int, fld: PrimeField
) -> int:
    """T(a, S, alpha, c, gamma): alpha given by its 2_>= part, gamma by its 1_= part."""
    if alpha_ge & ~S:
        raise ContractViolation("alpha must be defined on S")
    order = bits(alpha_ge)
    if c > len(order) or gamma_eq & ~sum(1 << x for x in order[:c]):
        raise ContractViolation("gamma must live on the first c states of alpha^-1(2_>=)")
    return int(_single(m, s, fld.p).T(a, S, alpha_ge, c, gamma_eq)[0])


def eval_TIS(m: TreeModel, a: int, S: int, beta_eq: int, s: int, fld: PrimeField) -> int:
    """TIS(a, S, beta) with beta^-1(1_=) = beta_eq and 1_>= on the rest of S."""
    if m.is_leaf(a):
        raise ContractViolation("TIS is defined on internal nodes")
    sp = is_space(m)
    for i in bits(S & ~beta_eq):
        if sp.conflict[a][i] & S:
            raise ContractViolation(f"beta is not conflict-free at label {i + 1}")
    return int(_single(m, s, fld.p).TIS(a, S, beta_eq)[0])


def eval_PIS(m: TreeModel, b: int, S: int, s: int, fld: PrimeField) -> int:
    """Sum of IS(b, D) over D whose image under the parent edge renaming is S."""
    if m.parent[b] < 0:
        raise ContractViolation("PIS is undefined at the root")
    return int(_single(m, s, fld.p).PIS(b, S)[0])


def components_of_F(m: TreeModel, a: int, beta_eq: int) -> list[int]:
    """Components of the auxiliary graph on beta^-1(1_=) as label bitmasks."""
    return is_space(m).components(a, beta_eq)


def trim(coeffs: list[int]) -> list[int]:
    """Drop trailing zero coefficients, keeping at least the constant term."""
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def poly_at(coeffs: list[int], s: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * s + c) % p
    return acc
