"""Zeta and Moebius transforms and the cover product over small universes.

Set functions are sequences of length 2^u indexed by bitmask. Each
transform comes in a naive O(3^u) form and the O(2^u u) sweep.
"""

from __future__ import annotations

from itertools import product as _cartesian
from typing import Sequence

import numpy as np

from .errors import DomainError

MAX_UNIVERSE = 20


def _universe(f: Sequence) -> int:
    n = len(f)
    u = n.bit_length() - 1
    if n == 0 or 1 << u != n:
        raise DomainError(f"set function length {n} is not a power of two")
    if u > MAX_UNIVERSE:
        raise DomainError(f"universe size {u} exceeds {MAX_UNIVERSE}")
    return u


def submasks(y: int):
    """All X subset of y, starting from y itself and ending with 0."""
    x = y
    while True:
        yield x
        if x == 0:
            return
        x = (x - 1) & y


def zeta_naive(f: Sequence[int]) -> list[int]:
    _universe(f)
    return [sum(f[x] for x in submasks(y)) for y in range(len(f))]


def mobius_naive(f: Sequence[int]) -> list[int]:
    _universe(f)
    out = []
    for y in range(len(f)):
        pc = y.bit_count()
        out.append(sum((-1) ** (pc - x.bit_count()) * f[x] for x in submasks(y)))
    return out


def _sweep(f, sign: int, modulus: int | None):
    u = _universe(f)
    a = np.array(f, dtype=object if modulus is None else np.int64)
    if modulus is not None:
        a %= modulus
    n = len(a)
    for i in range(u):
        bit = 1 << i
        view = a.reshape(n // (2 * bit), 2, bit)
        if sign > 0:
            view[:, 1, :] += view[:, 0, :]
        else:
            view[:, 1, :] -= view[:, 0, :]
        if modulus is not None:
            view[:, 1, :] %= modulus
    return [int(x) for x in a]


def zeta(f: Sequence[int], modulus: int | None = None) -> list[int]:
    """(zeta f)(Y) = sum of f(X) over X subset of Y, by the subset-sum sweep."""
    return _sweep(f, +1, modulus)


def mobius(f: Sequence[int], modulus: int | None = None) -> list[int]:
    """(mu f)(Y) = sum of (-1)^{|Y minus X|} f(X) over X subset of Y."""
    return _sweep(f, -1, modulus)


def cover_product(fs: Sequence[Sequence[int]], target: int) -> int:
    """Sum over covers X_1 u ... u X_t = target of prod f_i(X_i), by enumeration."""
    if not fs:
        return 1 if target == 0 else 0
    u = _universe(fs[0])
    if any(len(f) != 1 << u for f in fs):
        raise DomainError("set functions must share one universe")
    subs = list(submasks(target))
    total = 0
    for choice in _cartesian(subs, repeat=len(fs)):
        acc = 0
        for x in choice:
            acc |= x
        if acc != target:
            continue
        prod = 1
        for f, x in zip(fs, choice):
            prod *= f[x]
            if prod == 0:
                break
        total += prod
    return total


def cover_product_fast(fs: Sequence[Sequence[int]]) -> list[int]:
    """All cover-product values at once: mobius of the pointwise product of zetas."""
    if not fs:
        raise DomainError("need at least one factor")
    zs = [zeta(f) for f in fs]
    prod = [1] * len(zs[0])
    for z in zs:
        prod = [a * b for a, b in zip(prod, z)]
    return mobius(prod)
