"""Shared random model corpora for the tests."""

import numpy as np

from shrubsolve.models import random_model

MODES = [
    {"memoize": False, "collapse": False},
    {"memoize": True, "collapse": False},
    {"memoize": True, "collapse": True},
]


def models(count, seed, n=(1, 10), d=(1, 3), k=(1, 3), density=None):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        nn = int(rng.integers(n[0], n[1] + 1))
        dd = int(rng.integers(d[0], d[1] + 1))
        kk = int(rng.integers(k[0], k[1] + 1))
        dens = float(rng.uniform(0.2, 0.8)) if density is None else density
        out.append(random_model(nn, dd, kk, rng, density=dens))
    return out
