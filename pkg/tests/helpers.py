"""Independent oracles shared by the test modules."""

import numpy as np

from wfts.spectral import FrequencyGrid, Npsd


def gaussian(grid, mean, std):
    f = grid.frequencies
    return Npsd.from_weights(grid, np.exp(-0.5 * ((f - mean) / std) ** 2))


def gaussian_w2(m1, s1, m2, s2):
    return np.hypot(m1 - m2, s1 - s2)


def sinusoid_wf(a1, b1, a2, b2):
    """WF between exp(j a1 t) + exp(j b1 t) and exp(j a2 t) + exp(j b2 t)."""
    return np.hypot(a1 - a2, b1 - b2) / (2 * np.sqrt(2) * np.pi)


def random_npsd(rng, grid, sparsity=0.3):
    w = rng.random(len(grid))
    w[rng.random(len(grid)) < sparsity] = 0.0
    if not w.any():
        w[rng.integers(len(grid))] = 1.0
    return Npsd.from_weights(grid, w)


def w2_bruteforce(a, b, n=200001):
    """Midpoint-rule W2 from quantiles computed with cumsum (no shared code)."""
    u = (np.arange(n) + 0.5) / n

    def q(s):
        c = np.cumsum(s.mass)
        c /= c[-1]
        i = np.searchsorted(c, u, side="left")
        return s.grid.frequencies[np.minimum(i, len(c) - 1)]

    return float(np.sqrt(np.mean((q(a) - q(b)) ** 2)))


def peak_positions(s, k):
    """Frequencies of the ``k`` largest bins, sorted."""
    return np.sort(s.grid.frequencies[np.argsort(s.mass)[-k:]])
