"""Prime fields, prime search and Chinese-remainder coefficient reconstruction."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .errors import ContractViolation, DomainError

# Deterministic for n < 3.3e24 (first 13 primes as bases).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)
_DETERMINISTIC_LIMIT = 3317044064679887385961981
_EXTRA_ROUNDS = 64  # error below 4^-64 = 2^-128


def _mr_round(n: int, d: int, r: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    if not all(_mr_round(n, d, r, a) for a in _MR_BASES if a < n):
        return False
    if n < _DETERMINISTIC_LIMIT:
        return True
    rng = random.Random(n)  # reproducible witnesses per candidate
    return all(_mr_round(n, d, r, rng.randrange(2, n - 1)) for _ in range(_EXTRA_ROUNDS))


def next_prime(x: int) -> int:
    """Smallest prime strictly greater than x."""
    if x < 2:
        return 2
    c = x + 1
    if c % 2 == 0:
        c += 1
    while not is_prime(c):
        c += 2
    return c


def primes_between(lo: int, hi: int) -> Iterator[int]:
    """Primes p with lo < p <= hi, ascending."""
    p = next_prime(lo)
    while p <= hi:
        yield p
        p = next_prime(p)


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")

    def reduce(self, a: int) -> int:
        return a % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise DomainError("zero has no inverse")
        return pow(a, -1, self.p)


def mod_pow(base: int, exp: int, fld: PrimeField) -> int:
    """base^exp mod p. Nonzero bases accept any integer exponent (Fermat)."""
    p = fld.p
    base %= p
    if base == 0:
        if exp < 0:
            raise DomainError("negative power of zero")
        return 1 if exp == 0 else 0
    return pow(base, exp % (p - 1), p)


def interpolate_coeff_mod_p(evals, target: int, fld: PrimeField) -> int:
    """Coefficient of x^target of the degree-<p polynomial through evals[s], s in F_p.

    Uses sum_{s != 0} s^j = -[p-1 divides j]: for 1 <= t <= p-2 the
    coefficient is -sum_s P(s) s^{-t}; t = 0 is P(0); t = p-1 picks up
    the remaining mass.
    """
    p = fld.p
    if not 0 <= target < p:
        raise DomainError(f"target {target} outside [0,{p})")
    ev = [int(e) % p for e in evals]
    if len(ev) != p:
        raise DomainError(f"need {p} evaluations, got {len(ev)}")
    if target == 0:
        return ev[0]
    total = sum(ev[1:]) % p
    if target == p - 1:
        return (-total - ev[0]) % p
    acc = 0
    for s in range(1, p):
        acc += ev[s] * pow(s, (p - 1 - target) % (p - 1), p)
    return -acc % p


def interpolate_all_mod_p(evals: np.ndarray, p: int, upto: int) -> np.ndarray:
    """Coefficients 0..upto (upto < p) of the polynomial through evals[0..p-1]."""
    ev = np.asarray(evals, dtype=np.int64) % p
    out = np.zeros(upto + 1, dtype=np.int64)
    out[0] = ev[0]
    if upto == 0:
        return out
    s = np.arange(1, p, dtype=np.int64)
    inv_s = _inv_vec(s, p)
    vals = ev[1:].copy()
    total = int(vals.sum() % p)
    for t in range(1, min(upto, p - 2) + 1):
        vals = vals * inv_s % p
        out[t] = -int(vals.sum() % p) % p
    if upto >= p - 1:
        out[p - 1] = (-total - ev[0]) % p
    return out


def _inv_vec(s: np.ndarray, p: int) -> np.ndarray:
    # s^(p-2) by square and multiply on the whole vector
    result = np.ones_like(s)
    base = s % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def crt_combine(residues: list[int], moduli: list[int]) -> tuple[int, int]:
    """Value mod the product of pairwise coprime moduli."""
    x, m = 0, 1
    for r, q in zip(residues, moduli):
        # x + m*t = r (mod q)
        t = (r - x) * pow(m, -1, q) % q
        x += m * t
        m *= q
    return x, m


def crt_primes(degree_bound: int, bound: int | None = None) -> list[int]:
    """Primes p > degree_bound, ascending, until their product exceeds bound.

    Primes larger than the degree bound keep every coefficient index below
    p, so interpolation over F_p is unique. The default bound is 2^n'.
    """
    if bound is None:
        bound = 1 << degree_bound
    out, prod, p = [], 1, degree_bound
    while prod <= bound:
        p = next_prime(p)
        out.append(p)
        prod *= p
    return out


def crt_reconstruct_coefficient(
    eval_oracle: Callable[[int, int], int],
    degree_bound: int,
    target: int,
    bound: int | None = None,
) -> int:
    """Exact coefficient at ``target`` from point evaluations modulo primes."""
    if not 0 <= target <= degree_bound:
        raise DomainError("target beyond degree bound")
    primes = crt_primes(degree_bound, bound)
    if bound is None and degree_bound >= 1 and primes[-1] > 2 * degree_bound + 2:
        # prime density guarantees this never triggers for n' >= 1
        raise ContractViolation("ran out of primes below 2n'+2")
    res = []
    for p in primes:
        fld = PrimeField(p)
        evals = [eval_oracle(p, s) % p for s in range(p)]
        res.append(interpolate_coeff_mod_p(evals, target, fld))
    value, _ = crt_combine(res, primes)
    return value


def lanes_for(primes: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """All (s, p) evaluation points for a prime list, flattened."""
    xs = np.concatenate([np.arange(p, dtype=np.int64) for p in primes])
    mods = np.concatenate([np.full(p, p, dtype=np.int64) for p in primes])
    return xs, mods


def crt_reconstruct_all(
    batch_eval: Callable[[np.ndarray, np.ndarray], np.ndarray],
    degree_bound: int,
    bound: int | None = None,
) -> tuple[list[int], dict]:
    """All coefficients 0..degree_bound from one batched evaluation.

    ``batch_eval(xs, mods)`` returns the polynomial at xs[i] modulo
    mods[i] for every lane i. Returns the coefficients and run stats.
    """
    primes = crt_primes(degree_bound, bound)
    xs, mods = lanes_for(primes)
    vals = np.asarray(batch_eval(xs, mods), dtype=np.int64) % mods
    per_prime = []
    off = 0
    for p in primes:
        per_prime.append(interpolate_all_mod_p(vals[off : off + p], p, degree_bound))
        off += p
    coeffs = []
    for t in range(degree_bound + 1):
        v, _ = crt_combine([int(c[t]) for c in per_prime], primes)
        coeffs.append(v)
    return coeffs, {"primes": len(primes), "max_prime": primes[-1], "lanes": len(xs)}


def floor_log2(x: int) -> int:
    return x.bit_length() - 1


def ceil_log2(x: int) -> int:
    return 0 if x <= 1 else (x - 1).bit_length()


__all__ = [
    "PrimeField",
    "ceil_log2",
    "crt_combine",
    "crt_primes",
    "crt_reconstruct_all",
    "crt_reconstruct_coefficient",
    "floor_log2",
    "interpolate_all_mod_p",
    "interpolate_coeff_mod_p",
    "is_prime",
    "lanes_for",
    "mod_pow",
    "next_prime",
    "primes_between",
]
