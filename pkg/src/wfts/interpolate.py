"""
Geodesic interpolation between time series and between covariance kernels.

A signal path embeds both endpoints as NPSDs on a shared grid, walks the
displacement geodesic between them and resynthesises each point with a
phase policy.  Kernel paths skip the phase entirely: an even NPSD maps to a
real, even covariance by the inverse Fourier transform.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence

import numpy as np

from .errors import AsymmetricSpectrum, BadGrid, TooFewMembers
from .spectral import (FrequencyGrid, InterpolatedPhase, Npsd, RandomPhase,
                       TimeSeries, ZeroPhase, acf_from_npsd, euclidean_phase,
                       fourier, normalize, reconstruct)
from .transport import geodesic

__all__ = ["SignalPath", "KernelPath", "signal_geodesic", "kernel_geodesic",
           "augment", "euclidean_path", "is_even"]


@dataclass(frozen=True, eq=False)
class SignalPath:
    gammas: np.ndarray
    series: List[TimeSeries]
    npsds: List[Npsd]
    phase_policy: str

    def __post_init__(self):
        if not (len(self.gammas) == len(self.series) == len(self.npsds)):
            raise ValueError("gammas, series and npsds must have equal length")

    def __len__(self):
        return len(self.gammas)


@dataclass(frozen=True, eq=False)
class KernelPath:
    gammas: np.ndarray
    lags: np.ndarray
    kernels: np.ndarray  # (n_gammas, n_lags), real
    npsds: List[Npsd]


def _check_gammas(gammas):
    g = np.atleast_1d(np.asarray(gammas, dtype=float))
    if np.any((g < 0) | (g > 1)):
        raise ValueError("gammas must lie in [0, 1]")
    return g


def _shared_spectra(x1, x2, n_freq, grid):
    if grid is None:
        if x1.sample_rate != x2.sample_rate:
            raise BadGrid("series with different sample rates need an explicit grid")
        n = max(len(x1), len(x2))
        n_freq = n if n_freq is None else n_freq
        grid = FrequencyGrid.dft(n_freq, x1.sample_rate)
    return fourier(x1, grid=grid), fourier(x2, grid=grid)


def _npsd_of(spec):
    power = np.abs(spec.coefficients) ** 2
    return Npsd.from_weights(spec.grid, power)


def signal_geodesic(x1, x2, gammas, phase="zero", n_freq=None, grid=None,
                    seed=None, n_samples=None, sample_rate=None, t0=0.0,
                    phase_weighting="literal", real=False):
    """WF interpolants between ``x1`` (gamma = 0) and ``x2`` (gamma = 1).

    Parameters
    ----------
    phase : {"zero", "random", "euclidean"}
        ``"random"`` draws one phase vector from ``seed`` and reuses it for
        every gamma.  ``"euclidean"`` interpolates the endpoint phases
        linearly after reduction mod 2 pi.
    phase_weighting : {"literal", "geodesic"}
        For ``"euclidean"`` only.  ``"literal"`` weights the phase of ``x1`` by
        gamma, ``"geodesic"`` by ``1 - gamma`` (matching the NPSD path).
    n_freq, grid :
        Shared frequency grid; defaults to the DFT grid of the longer series.
    n_samples, sample_rate, t0 :
        Resynthesis sampling; defaults to the grid size and the sampling rate
        implied by the grid, so that on a DFT grid the output's periodogram
        equals the geodesic NPSD.
    """
    g = _check_gammas(gammas)
    spec1, spec2 = _shared_spectra(x1, x2, n_freq, grid)
    s1, s2 = _npsd_of(spec1), _npsd_of(spec2)
    path = geodesic(s1, s2, grid=spec1.grid)
    if phase == "random":
        if seed is None:
            raise ValueError("random phase needs an explicit seed")
        policy = RandomPhase(seed)
    elif phase in ("zero", "euclidean"):
        policy = ZeroPhase()
    else:
        raise ValueError(f"unknown phase policy {phase!r}")
    series, npsds = [], []
    for gamma in g:
        s = path(gamma)
        if phase == "euclidean":
            w = gamma if phase_weighting == "literal" else 1 - gamma
            pol = InterpolatedPhase(spec1.phase, spec2.phase, w)
        else:
            pol = policy
        series.append(reconstruct(s, pol, n_samples=n_samples,
                                  sample_rate=sample_rate, t0=t0, real=real))
        npsds.append(s)
    return SignalPath(g, series, npsds, phase)


def euclidean_path(x1, x2, gammas):
    """Pointwise interpolation ``gamma * x1 + (1 - gamma) * x2`` for comparison."""
    g = _check_gammas(gammas)
    if len(x1) != len(x2):
        raise ValueError("euclidean interpolation needs equal-length series")
    return [TimeSeries(gm * x1.samples + (1 - gm) * x2.samples, x1.sample_rate)
            for gm in g]


def is_even(npsd, tol=1e-6):
    return bool(npsd.grid.is_symmetric()
                and np.max(np.abs(npsd.mass - npsd.mass[::-1])) <= tol)


def kernel_geodesic(k1_npsd, k2_npsd, gammas, lags, sample_rate=1.0):
    """Covariance kernels along the geodesic between two even NPSDs.

    ``lags`` are in units of ``1 / sample_rate``; the kernels are normalised
    (``k(0) == 1``), real and even.
    """
    for name, s in (("first", k1_npsd), ("second", k2_npsd)):
        if not is_even(s):
            raise AsymmetricSpectrum(f"{name} NPSD is not even on a symmetric grid")
    g = _check_gammas(gammas)
    lags = np.asarray(lags, dtype=float)
    path = geodesic(k1_npsd, k2_npsd)
    kernels, npsds = [], []
    for gamma in g:
        s = path(gamma)
        # symmetrise away rebinning round-off before transforming
        s = Npsd(s.grid, 0.5 * (s.mass + s.mass[::-1]))
        k = acf_from_npsd(s, lags, sample_rate)
        k = k.values if hasattr(k, "values") else k
        kernels.append(k.real)
        npsds.append(s)
    return KernelPath(g, lags, np.array(kernels), npsds)


def augment(class_members, gammas, pairs="all", phase="zero", n_freq=None,
            grid=None, seed=None, real=True):
    """Synthetic series along WF geodesics between members of one class.

    Parameters
    ----------
    pairs : "all" or int
        Every unordered pair, or that many distinct pairs drawn with ``seed``.
    real : bool
        Keep the real part of each resynthesis (input classes are usually
        real-valued).

    Returns
    -------
    list of (TimeSeries, Npsd, (i, j), gamma)
    """
    members = list(class_members)
    if len(members) < 2:
        raise TooFewMembers("augmentation needs at least two class members")
    all_pairs = list(combinations(range(len(members)), 2))
    if pairs == "all":
        chosen = all_pairs
    else:
        k = int(pairs)
        if seed is None:
            raise ValueError("random pair selection needs an explicit seed")
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(all_pairs), size=min(k, len(all_pairs)),
                          replace=False)
        chosen = [all_pairs[i] for i in sorted(pick)]
    out = []
    for n, (i, j) in enumerate(chosen):
        phase_seed = None if seed is None else seed + n
        path = signal_geodesic(members[i], members[j], gammas, phase=phase,
                               n_freq=n_freq, grid=grid, seed=phase_seed,
                               n_samples=len(members[i]),
                               sample_rate=members[i].sample_rate, real=real)
        for gm, ts, s in zip(path.gammas, path.series, path.npsds):
            out.append((ts, s, (i, j), float(gm)))
    return out
