"""
Seeded synthetic datasets.

Generative formulas
-------------------
``cos_sinc``
    Class ``cos``: ``cos(2 pi f t) + noise`` with ``f ~ U(1, 5)``.
    Class ``sinc``: ``sinc(a t) + noise`` with ``a ~ U(1, 5)`` and
    ``sinc(x) = sin(pi x) / (pi x)`` (flat spectrum on ``|f| < a/2``).
    Sampled at ``t = -duration/2 + n / sample_rate``; noise is white
    Gaussian with standard deviation ``noise_sigma``.
``agm``
    Asymmetric two-Gaussian mixtures, equal weights, built directly as
    NPSDs on a grid.  The left component sits at ``m ~ U(left_range)`` and
    the right one ``mean_gap`` above it; ``L-AGM`` has left variance = 4 x
    right variance, ``R-AGM`` the reverse.  Each draw of location and width
    produces one sample of each class.  The series are exact resyntheses (seeded random phase) of
    those NPSDs, so their periodograms on the DFT grid equal them.
``sinusoid_pair``
    ``exp(j a t) + exp(j b t)`` (angular frequencies ``a``, ``b``).
``complex_exp``
    ``exp(-alpha t^2) exp(2j pi mu t)``, whose NPSD is
    ``N(mu, alpha / (4 pi^2))``.
``band_limited``
    Three cosines with random frequency, amplitude and phase plus Gaussian
    noise with a flat spectrum on ``|f| < band``; the true NPSD is returned
    alongside.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import BadSpec
from .spectral import FrequencyGrid, Npsd, RandomPhase, TimeSeries, reconstruct

__all__ = ["Dataset", "cos_sinc", "agm", "agm_npsds", "sinusoid_pair",
           "complex_exp", "band_limited", "generate_synthetic", "gaussian_npsd"]


@dataclass(eq=False)
class Dataset:
    series: List[TimeSeries]
    labels: Optional[list] = None
    fold: Optional[list] = None
    source: str = ""
    format: str = ""

    def __post_init__(self):
        n = len(self.series)
        if self.labels is not None and len(self.labels) != n:
            raise ValueError("labels length must match the series count")
        if self.fold is not None and len(self.fold) != n:
            raise ValueError("fold length must match the series count")

    def __len__(self):
        return len(self.series)

    def subset(self, keep):
        keep = list(keep)
        pick = lambda xs: None if xs is None else [xs[i] for i in keep]
        return Dataset([self.series[i] for i in keep], pick(self.labels),
                       pick(self.fold), self.source, self.format)


def _need_seed(seed):
    if seed is None:
        raise BadSpec("synthetic generators need an explicit seed")
    return np.random.default_rng(seed)


def cos_sinc(n_per_class=25, noise_sigma=0.05, seed=None, sample_rate=20.0,
             duration=20.0):
    rng = _need_seed(seed)
    if n_per_class < 1 or noise_sigma < 0:
        raise BadSpec("cos_sinc needs n_per_class >= 1 and noise_sigma >= 0")
    t = -duration / 2 + np.arange(int(round(duration * sample_rate))) / sample_rate
    series, labels = [], []
    for i, f in enumerate(rng.uniform(1, 5, n_per_class)):
        x = np.cos(2 * np.pi * f * t) + noise_sigma * rng.standard_normal(t.size)
        series.append(TimeSeries(x, sample_rate, f"cos{i}"))
        labels.append("cos")
    for i, a in enumerate(rng.uniform(1, 5, n_per_class)):
        x = np.sinc(a * t) + noise_sigma * rng.standard_normal(t.size)
        series.append(TimeSeries(x, sample_rate, f"sinc{i}"))
        labels.append("sinc")
    return Dataset(series, labels, source="synthetic:cos_sinc", format="synthetic")


def gaussian_npsd(grid, means, stds, weights=None):
    """Mixture of Gaussian densities evaluated at the grid points."""
    f = grid.frequencies
    means = np.atleast_1d(means)
    stds = np.atleast_1d(stds)
    w = np.ones(means.size) if weights is None else np.asarray(weights, float)
    dens = sum(wi * np.exp(-0.5 * ((f - m) / s) ** 2) / s
               for wi, m, s in zip(w, means, stds))
    return Npsd.from_weights(grid, dens)


def agm_npsds(n_per_class=100, mean_gap=0.15, seed=None, n_freq=512,
              sample_rate=1.0, left_range=(-0.1, 0.0), right_std=(0.01, 0.03)):
    """L-AGM and R-AGM NPSDs on the DFT grid of ``n_freq`` points.

    Draws are paired: the i-th R-AGM sample mirrors the variances of the
    i-th L-AGM sample at the same location, so both classes share one
    distribution of translations.  Locations and widths are in units of
    ``sample_rate``.
    """
    rng = _need_seed(seed)
    if n_per_class < 1 or mean_gap <= 0:
        raise BadSpec("agm needs n_per_class >= 1 and mean_gap > 0")
    grid = FrequencyGrid.dft(n_freq, sample_rate)
    left = rng.uniform(*left_range, n_per_class) * sample_rate
    narrow = rng.uniform(*right_std, n_per_class) * sample_rate
    wide = 2.0 * narrow  # variance ratio 4
    out, labels = [], []
    for label in ("L-AGM", "R-AGM"):
        for m, sn, sw in zip(left, narrow, wide):
            stds = (sw, sn) if label == "L-AGM" else (sn, sw)
            out.append(gaussian_npsd(grid, (m, m + mean_gap * sample_rate), stds))
            labels.append(label)
    return out, labels


def agm(n_per_class=100, mean_gap=0.15, seed=None, n_freq=512, sample_rate=1.0):
    rng = _need_seed(seed)
    npsds, labels = agm_npsds(n_per_class, mean_gap, seed, n_freq, sample_rate)
    phase_seeds = rng.integers(0, 2**63 - 1, len(npsds))
    series = [TimeSeries(reconstruct(s, RandomPhase(int(ps))).samples,
                         sample_rate, f"{l}{i}")
              for i, (s, l, ps) in enumerate(zip(npsds, labels, phase_seeds))]
    return Dataset(series, labels, source="synthetic:agm", format="synthetic")


def sinusoid_pair(a, b, n=4096, sample_rate=4.0):
    t = np.arange(n) / sample_rate
    return TimeSeries(np.exp(1j * a * t) + np.exp(1j * b * t), sample_rate,
                      f"sinusoid({a:g},{b:g})")


def complex_exp(mu, alpha, sample_rate=10.0, half_width=8.0):
    if alpha <= 0:
        raise BadSpec("complex_exp needs alpha > 0")
    t = np.arange(-half_width, half_width, 1 / sample_rate)
    return TimeSeries(np.exp(-alpha * t ** 2) * np.exp(2j * np.pi * mu * t),
                      sample_rate, f"cexp({mu:g},{alpha:g})")


def band_limited(n=2**14, seed=None, band=0.2, noise_fraction=0.5,
                 truth_points=2**16):
    """Stationary real series with a known band-limited NPSD.

    Returns ``(series, true_npsd)``; the truth lives on the DFT grid of
    ``truth_points`` samples (unit sample rate), and the sinusoid
    frequencies are drawn on that grid so the line spectrum is exact.
    """
    rng = _need_seed(seed)
    if not 0 < band < 0.5 or not 0 <= noise_fraction < 1:
        raise BadSpec("band must lie in (0, 0.5) and noise_fraction in [0, 1)")
    grid = FrequencyGrid.dft(truth_points, 1.0)
    f = grid.frequencies
    step = grid.spacing
    freqs = np.round(rng.uniform(0.02, band * 0.95, 3) / step) * step
    amps = rng.uniform(0.5, 1.5, 3)
    phases = rng.uniform(0, 2 * np.pi, 3)
    line_power = amps ** 2 / 2
    noise_var = noise_fraction / (1 - noise_fraction) * line_power.sum()

    t = np.arange(n)
    x = sum(a * np.cos(2 * np.pi * fr * t + ph)
            for a, fr, ph in zip(amps, freqs, phases))
    # flat-band noise by spectral synthesis over a longer window, then cut
    m = 4 * n
    spec = np.zeros(m, dtype=complex)
    k = np.fft.fftfreq(m)
    inband = np.abs(k) < band
    spec[inband] = rng.standard_normal(inband.sum()) + 1j * rng.standard_normal(inband.sum())
    noise = np.fft.ifft(spec).real
    noise *= np.sqrt(noise_var) / noise.std()
    x = x + noise[:n]

    mass = np.zeros(f.size)
    inband = np.abs(f) < band
    mass[inband] = noise_var / inband.sum()
    for p, fr in zip(line_power, freqs):
        for s in (fr, -fr):
            mass[grid.nearest(s)] += p / 2
    return TimeSeries(x, 1.0, "band_limited"), Npsd.from_weights(grid, mass)


_GENERATORS = {
    "cos_sinc": cos_sinc,
    "agm": agm,
    "sinusoid_pair": lambda **kw: Dataset([sinusoid_pair(**kw)], None,
                                          source="synthetic:sinusoid_pair"),
    "complex_exp": lambda **kw: Dataset([complex_exp(**kw)], None,
                                        source="synthetic:complex_exp"),
    "band_limited": lambda **kw: Dataset([band_limited(**kw)[0]], None,
                                         source="synthetic:band_limited"),
}
_GENERATORS["ar_band_limited"] = _GENERATORS["band_limited"]


def generate_synthetic(kind, **params):
    """Dispatch to a named generator; see the module docstring."""
    try:
        gen = _GENERATORS[kind]
    except KeyError:
        raise BadSpec(f"unknown synthetic dataset {kind!r}; "
                      f"expected one of {sorted(_GENERATORS)}") from None
    try:
        return gen(**params)
    except TypeError as exc:
        raise BadSpec(str(exc)) from None
