"""Randomized minimum dominating set through parity counting.

Partitions (T, A, F) of V(G) with no T-F edge are list homomorphisms to
the pattern on {T, A, F} with loops everywhere plus the edges TA and AF.
For a fixed T the vertices not dominated by T may sit in A or F freely,
so the count is odd only if T dominates and the free part is empty.
Random weights isolate a unique minimum-weight dominating set of the
minimum size with probability at least 1/2, which makes that count odd.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .engine import MAX_STATES
from .errors import CapabilityError, DomainError
from .hom_solver import HomInstance, HomTable, count_hom_table, make_pattern
from .tree_model import TreeModel

log = logging.getLogger(__name__)

T, A, F = 0, 1, 2
RNG_NAME = "numpy.random.PCG64"


def taf_pattern():
    return make_pattern(3, [(T, T), (A, A), (F, F), (T, A), (A, F)], [T])


@dataclass(frozen=True)
class DomWeights:
    seed: tuple[int, ...]
    weights: tuple[int, ...]

    def as_dict(self) -> dict[int, int]:
        return dict(enumerate(self.weights))


def sample_weights(n: int, seed: int | tuple[int, ...]) -> DomWeights:
    """Independent uniform weights in [1, 2n], a deterministic function of seed."""
    if n < 1:
        raise DomainError("n must be positive")
    key = (seed,) if isinstance(seed, int) else tuple(seed)
    rng = np.random.Generator(np.random.PCG64(list(key)))
    w = rng.integers(1, 2 * n, size=n, endpoint=True)
    return DomWeights(key, tuple(int(x) for x in w))


def state_mask(k: int, pairs) -> int:
    """Guess over the tracked states from (letter, 1-indexed label) pairs, letter in 'TF'."""
    m = 0
    for letter, i in pairs:
        m |= 1 << ({"T": 0, "F": 1}[letter] * k + i - 1)
    return m


def taf_table(m: TreeModel, w: DomWeights, root_guess: int | None = None, **kw) -> HomTable:
    """Counts of T-F-edge-free partitions by (|T|, weight of T).

    With root_guess = S this is a_{S,c,w}; without it the sum over all S.
    """
    if 2 * m.k > MAX_STATES:
        raise CapabilityError(f"2k = {2 * m.k} exceeds {MAX_STATES}")
    if len(w.weights) != m.n:
        raise DomainError("weight vector length differs from n")
    kw.setdefault("memoize", True)
    kw.setdefault("collapse", True)
    inst = HomInstance(m, taf_pattern(), weights=w.as_dict())
    return count_hom_table(inst, root_guess=root_guess, **kw)


def parity_count(m: TreeModel, w: DomWeights, c: int, weight: int, **kw) -> int:
    """Parity of the number of dominating sets of size c and weight `weight`."""
    return taf_table(m, w, **kw).get(c, weight) % 2


def smallest_odd_size(m: TreeModel, table: HomTable) -> int:
    n = m.n
    for c in range(n + 1):
        for wt in range(2 * n * n + 1):
            if table.get(c, wt) % 2:
                return c
    return n


def single_trial(m: TreeModel, seed: int | tuple[int, ...], **kw) -> int:
    w = sample_weights(m.n, seed)
    return smallest_odd_size(m, taf_table(m, w, **kw))


def min_dominating_set(m: TreeModel, trials: int = 20, seed: int = 0, **kw) -> int:
    """Minimum over trials; never below the true optimum, exact w.p. >= 1 - 2^-trials."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    log.info("domset rng=%s seed=%s trials=%d", RNG_NAME, seed, trials)
    return min(single_trial(m, (seed, t), **kw) for t in range(trials))
