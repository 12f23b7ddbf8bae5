"""
Consistency of the periodogram under WF.

For a band-limited stationary series, the NPSD of longer and longer
prefixes approaches the true NPSD in WF, while the raw periodogram
ordinates themselves never settle.  The empirical ACF error shrinks at
the same time.
"""

import numpy as np

from wfts import TimeSeries, acf_from_npsd, empirical_acf, npsd, wasserstein
from wfts.synthetic import band_limited

ns = [2 ** 8, 2 ** 10, 2 ** 12, 2 ** 14]
lags = np.arange(33)
W, A = [], []
for seed in range(20):
    x, truth = band_limited(n=2 ** 14, seed=seed)
    r = acf_from_npsd(truth, lags).values
    W.append([wasserstein(npsd(TimeSeries(x.samples[:n])), truth) for n in ns])
    A.append([np.abs(empirical_acf(TimeSeries(x.samples[:n]), 32).values - r).max()
              for n in ns])
print("     n   median WF   median sup ACF error")
for n, w, a in zip(ns, np.median(W, 0), np.median(A, 0)):
    print(f"{n:6d}   {w:.5f}     {a:.4f}")
