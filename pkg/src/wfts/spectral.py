"""
Fourier embeddings of time series.

A time series is mapped to its periodogram, which normalised to unit mass
gives the normalised power spectral density (NPSD) that every other module
works with.  NPSDs are stored as *cell masses* on a uniform frequency grid
(a probability mass function over bins); densities are ``mass / spacing``.

The module also pairs NPSDs with autocorrelation functions through the
normalised Bochner relation, and maps an NPSD plus a phase back to a
sampled signal.

Frequencies are in cycles per unit time throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union
import warnings

import numpy as np

from .errors import (BadGrid, EmptySeries, LagOutOfRange, PhaseLengthMismatch,
                     WFDiagnostic, ZeroPower)

__all__ = [
    "TimeSeries", "FrequencyGrid", "Spectrum", "Psd", "Npsd", "Acf",
    "ZeroPhase", "FixedPhase", "RandomPhase", "InterpolatedPhase",
    "euclidean_phase", "fourier", "periodogram", "normalize", "npsd",
    "empirical_acf", "npsd_from_acf", "acf_from_npsd", "reconstruct",
]

# rows of the (time x frequency) exponential matrix built at once
_CHUNK = 512


def _readonly(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled, possibly complex, signal."""

    samples: np.ndarray
    sample_rate: float = 1.0
    id: Optional[str] = None

    def __post_init__(self):
        x = np.asarray(self.samples)
        if x.ndim != 1 or x.size == 0:
            raise EmptySeries("time series needs a nonempty 1-D sample vector")
        if not np.all(np.isfinite(x)):
            raise ValueError("time series contains non-finite samples")
        if not (np.isfinite(self.sample_rate) and self.sample_rate > 0):
            raise ValueError(f"sample_rate must be > 0, got {self.sample_rate}")
        object.__setattr__(self, "samples",
                           _readonly(np.array(x, dtype=np.complex128)))
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    def __len__(self):
        return self.samples.size

    @property
    def is_real(self):
        return bool(np.all(self.samples.imag == 0))

    @property
    def times(self):
        return np.arange(len(self)) / self.sample_rate

    def demean(self):
        return TimeSeries(self.samples - self.samples.mean(),
                          self.sample_rate, self.id)


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Strictly increasing, uniformly spaced frequencies."""

    frequencies: np.ndarray

    def __post_init__(self):
        f = np.array(self.frequencies, dtype=float)
        if f.ndim != 1 or f.size < 2:
            raise BadGrid("a frequency grid needs at least 2 points")
        if not np.all(np.isfinite(f)):
            raise BadGrid("grid frequencies must be finite")
        d = np.diff(f)
        if np.any(d <= 0):
            raise BadGrid("grid frequencies must be strictly increasing")
        step = (f[-1] - f[0]) / (f.size - 1)
        # relative tolerance on the step, plus rounding of the values themselves
        tol = 1e-12 * step + 8 * np.finfo(float).eps * np.abs(f).max()
        if np.max(np.abs(d - step)) > tol:
            raise BadGrid("grid frequencies must be uniformly spaced")
        object.__setattr__(self, "frequencies", _readonly(f))

    @classmethod
    def linspace(cls, fmin, fmax, n):
        if n < 2:
            raise BadGrid("a frequency grid needs at least 2 points")
        return cls(np.linspace(fmin, fmax, int(n)))

    @classmethod
    def dft(cls, n, sample_rate=1.0):
        """The two-sided DFT grid ``fftshift(fftfreq(n, 1/sample_rate))``."""
        if n < 2:
            raise BadGrid("a frequency grid needs at least 2 points")
        n = int(n)
        k = np.arange(n) - n // 2
        return cls(k * (sample_rate / n))

    def __len__(self):
        return self.frequencies.size

    @property
    def spacing(self):
        f = self.frequencies
        return float((f[-1] - f[0]) / (f.size - 1))

    @property
    def fmin(self):
        return float(self.frequencies[0])

    @property
    def fmax(self):
        return float(self.frequencies[-1])

    def same_as(self, other, rtol=1e-12):
        if other is self:
            return True
        return (len(self) == len(other)
                and np.allclose(self.frequencies, other.frequencies,
                                rtol=0, atol=rtol * max(self.spacing, 1.0)))

    def is_symmetric(self, tol=1e-9):
        f = self.frequencies
        return bool(np.allclose(f, -f[::-1], rtol=0, atol=tol * self.spacing))

    def nearest(self, freq):
        """Index of the grid point closest to ``freq``."""
        i = np.rint((np.asarray(freq) - self.fmin) / self.spacing).astype(int)
        return np.clip(i, 0, len(self) - 1)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Complex Fourier coefficients on a grid."""

    grid: FrequencyGrid
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.complex128)
        if c.shape != (len(self.grid),):
            raise BadGrid("one coefficient per grid frequency is required")
        object.__setattr__(self, "coefficients", _readonly(c))

    @property
    def magnitude(self):
        return np.abs(self.coefficients)

    @property
    def phase(self):
        return np.angle(self.coefficients)


@dataclass(frozen=True, eq=False)
class Psd:
    grid: FrequencyGrid
    power: np.ndarray

    def __post_init__(self):
        p = np.array(self.power, dtype=float)
        if p.shape != (len(self.grid),):
            raise BadGrid("one power value per grid frequency is required")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("power must be finite and nonnegative")
        object.__setattr__(self, "power", _readonly(p))

    @property
    def total(self):
        return float(self.power.sum())


@dataclass(frozen=True, eq=False)
class Npsd:
    """Unit-mass spectral distribution stored as per-bin masses."""

    grid: FrequencyGrid
    mass: np.ndarray

    def __post_init__(self):
        m = np.array(self.mass, dtype=float)
        if m.shape != (len(self.grid),):
            raise BadGrid("one mass value per grid frequency is required")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise ValueError("NPSD mass must be finite and nonnegative")
        if abs(m.sum() - 1.0) > 1e-9:
            raise ValueError(f"NPSD mass must sum to 1, got {m.sum()!r}")
        object.__setattr__(self, "mass", _readonly(m))

    @classmethod
    def from_weights(cls, grid, weights):
        """Normalise arbitrary nonnegative weights (or density values)."""
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if not total > 0:
            raise ZeroPower("weights must have positive total")
        return cls(grid, w / total)

    @classmethod
    def dirac(cls, grid, freq):
        m = np.zeros(len(grid))
        m[grid.nearest(freq)] = 1.0
        return cls(grid, m)

    @property
    def frequencies(self):
        return self.grid.frequencies

    @property
    def density(self):
        return self.mass / self.grid.spacing

    @property
    def support(self):
        return np.flatnonzero(self.mass > 0)

    def mean(self):
        return float(self.mass @ self.grid.frequencies)

    def moment(self, order=2):
        return float(self.mass @ np.abs(self.grid.frequencies) ** order)

    def variance(self):
        mu = self.mean()
        return float(self.mass @ (self.grid.frequencies - mu) ** 2)

    def as_psd(self):
        return Psd(self.grid, self.mass)


@dataclass(frozen=True, eq=False)
class Acf:
    """Normalised autocorrelation at lags ``0, 1, ..., len-1`` (in samples)."""

    values: np.ndarray
    sample_rate: float = 1.0

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.ndim != 1 or v.size == 0:
            raise LagOutOfRange("an ACF needs at least the zero lag")
        if abs(v[0] - 1.0) > 1e-9:
            raise ValueError("ACF must equal 1 at lag 0")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def lags(self):
        return np.arange(self.values.size)

    def __len__(self):
        return self.values.size


# -- phase policies ---------------------------------------------------------

@dataclass(frozen=True)
class ZeroPhase:
    def phases(self, n):
        return np.zeros(n)


@dataclass(frozen=True, eq=False)
class FixedPhase:
    values: np.ndarray

    def phases(self, n):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (n,):
            raise PhaseLengthMismatch(
                f"expected {n} phase values, got {v.shape}")
        return v


@dataclass(frozen=True)
class RandomPhase:
    seed: int

    def phases(self, n):
        return np.random.default_rng(self.seed).uniform(0, 2 * np.pi, n)


@dataclass(frozen=True, eq=False)
class InterpolatedPhase:
    """Euclidean phase interpolation, ``gamma`` weighting ``phi1``."""

    phi1: np.ndarray
    phi2: np.ndarray
    gamma: float

    def phases(self, n):
        p1 = np.asarray(self.phi1, dtype=float)
        p2 = np.asarray(self.phi2, dtype=float)
        if p1.shape != (n,) or p2.shape != (n,):
            raise PhaseLengthMismatch(
                f"expected {n} phase values, got {p1.shape} and {p2.shape}")
        return euclidean_phase(p1, p2, self.gamma)


def euclidean_phase(phi1, phi2, gamma):
    """``gamma * (phi1 mod 2pi) + (1 - gamma) * (phi2 mod 2pi)``."""
    two_pi = 2 * np.pi
    return gamma * np.mod(phi1, two_pi) + (1 - gamma) * np.mod(phi2, two_pi)


_POLICIES = {"zero": ZeroPhase}


def _as_policy(phase):
    if isinstance(phase, str):
        try:
            return _POLICIES[phase]()
        except KeyError:
            raise ValueError(f"unknown phase policy {phase!r}") from None
    if isinstance(phase, np.ndarray):
        return FixedPhase(phase)
    return phase


# -- transforms ---------------------------------------------------------------

def _check_series(ts):
    if len(ts) < 2:
        raise EmptySeries("spectral operations need at least 2 samples")


def _dtft(x, sample_rate, freqs, sign=-1.0, t0=0.0):
    """sum_n x[n] exp(sign * 2j pi f t_n) for every f, with t_n = t0 + n/fs."""
    t = t0 + np.arange(x.size) / sample_rate
    out = np.empty(freqs.size, dtype=np.complex128)
    for s in range(0, freqs.size, _CHUNK):
        f = freqs[s:s + _CHUNK]
        out[s:s + _CHUNK] = np.exp(sign * 2j * np.pi * np.outer(f, t)) @ x
    return out


def _window(name, n):
    if name is None or name in ("rect", "boxcar", "rectangular"):
        return None
    if name in ("hann", "hanning"):
        return np.hanning(n)
    if name == "hamming":
        return np.hamming(n)
    if name == "blackman":
        return np.blackman(n)
    raise ValueError(f"unknown window {name!r}")


def _resolve_grid(n, sample_rate, n_freq, grid):
    if grid is not None:
        return grid, False
    if n_freq is None:
        n_freq = n
    if n_freq < 2:
        raise BadGrid("n_freq must be at least 2")
    if n_freq < n:
        raise BadGrid(f"n_freq={n_freq} is below the segment length {n}")
    return FrequencyGrid.dft(n_freq, sample_rate), True


def _coefficients(x, sample_rate, grid, on_dft):
    if on_dft:
        n_freq = len(grid)
        return np.fft.fftshift(np.fft.fft(x, n_freq))
    return _dtft(x, sample_rate, grid.frequencies)


def fourier(ts, n_freq=None, grid=None):
    """Fourier coefficients of ``ts`` on the DFT grid or on a user grid.

    Without ``grid`` the coefficients are the zero-padded DFT of length
    ``n_freq`` (default: the series length) arranged on the two-sided grid
    ``[-fs/2, fs/2)``.  With ``grid`` the discrete-time Fourier transform is
    evaluated directly at the requested frequencies.  Time starts at 0.
    """
    _check_series(ts)
    g, on_dft = _resolve_grid(len(ts), ts.sample_rate, n_freq, grid)
    return Spectrum(g, _coefficients(ts.samples, ts.sample_rate, g, on_dft))


def periodogram(ts, n_freq=None, grid=None, window=None, segments=1,
                overlap=0.5):
    """Plain periodogram ``|X(f)|^2 / (n * fs)``.

    Parameters
    ----------
    ts : TimeSeries
    n_freq : int, optional
        Number of points of the two-sided DFT grid (zero padding when larger
        than the series).  Defaults to the series length.
    grid : FrequencyGrid, optional
        Evaluate on this grid instead (direct transform, no FFT).
    window : str, optional
        Taper name (``"hann"``, ``"hamming"``, ``"blackman"``); rectangular
        when omitted.  Power is scaled by ``sum(w**2)`` instead of ``n``.
    segments, overlap :
        Welch averaging over ``segments`` equal segments overlapping by the
        given fraction.  ``segments=1`` is the plain periodogram.
    """
    _check_series(ts)
    x = ts.samples
    fs = ts.sample_rate
    segments = int(segments)
    if segments < 1:
        raise ValueError("segments must be >= 1")
    if segments == 1:
        seg_len, step = x.size, 0
    else:
        if not 0 <= overlap < 1:
            raise ValueError("overlap must lie in [0, 1)")
        seg_len = int(x.size / (1 + (segments - 1) * (1 - overlap)))
        step = int(round(seg_len * (1 - overlap))) or 1
        if seg_len < 2:
            raise EmptySeries("series too short for the requested segments")
    g, on_dft = _resolve_grid(seg_len, fs, n_freq, grid)
    w = _window(window, seg_len)
    norm = seg_len if w is None else float(w @ w)
    acc = np.zeros(len(g))
    for i in range(segments):
        seg = x[i * step:i * step + seg_len]
        if w is not None:
            seg = seg * w
        acc += np.abs(_coefficients(seg, fs, g, on_dft)) ** 2
    return Psd(g, acc / (segments * norm * fs))


def normalize(psd):
    total = psd.power.sum()
    if not total > 0:
        raise ZeroPower("PSD has no power to normalise")
    return Npsd(psd.grid, psd.power / total)


def npsd(ts, n_freq=None, grid=None, **kwargs):
    """Shorthand for ``normalize(periodogram(ts, ...))``."""
    return normalize(periodogram(ts, n_freq=n_freq, grid=grid, **kwargs))


def empirical_acf(ts, max_lag):
    """Biased sample ACF ``c(h) / c(0)`` with ``c(h) = (1/n) sum y_t conj(y_{t+h})``.

    The conjugate sits on the *later* sample.  For complex series this is the
    conjugate of the ACF paired with the NPSD by :func:`acf_from_npsd`; the
    two agree for real series.
    """
    _check_series(ts)
    y = ts.samples
    n = y.size
    max_lag = int(max_lag)
    if not 0 <= max_lag < n:
        raise LagOutOfRange(f"max_lag must lie in [0, {n - 1}], got {max_lag}")
    c = np.array([np.dot(y[:n - h], np.conj(y[h:])) for h in range(max_lag + 1)]) / n
    if c[0].real <= 0:
        raise ZeroPower("series has zero energy")
    return Acf(c / c[0].real, ts.sample_rate)


def npsd_from_acf(acf, grid, return_clipped=False):
    """NPSD from a normalised ACF via the discrete Bochner transform.

    ``s(f) = sum_{|h| < L} r(h) exp(-2j pi f h / fs)`` using ``r(-h) =
    conj(r(h))``.  Negative values produced by lag truncation are clipped to
    zero before renormalising; the clipped mass fraction is reported when
    ``return_clipped`` is set and a :class:`WFDiagnostic` is emitted when it
    exceeds ``1e-9``.
    """
    if not isinstance(grid, FrequencyGrid):
        raise BadGrid("npsd_from_acf needs a FrequencyGrid")
    r = acf.values
    f = grid.frequencies / acf.sample_rate
    # r(0) + 2 Re sum_{h>0} r(h) e^{-2j pi f h}
    s = np.full(f.size, r[0].real)
    if r.size > 1:
        h = np.arange(1, r.size)
        for start in range(0, f.size, _CHUNK):
            fb = f[start:start + _CHUNK]
            e = np.exp(-2j * np.pi * np.outer(fb, h))
            s[start:start + _CHUNK] += 2 * (e @ r[1:]).real
    negative = -s[s < 0].sum()
    s = np.clip(s, 0, None)
    total = s.sum()
    if not total > 0:
        raise ZeroPower("ACF transforms to an all-nonpositive spectrum")
    clipped = float(negative / (total + negative))
    if clipped > 1e-9:
        warnings.warn(f"clipped {clipped:.3g} of spectral mass below zero",
                      WFDiagnostic, stacklevel=2)
    out = Npsd(grid, s / total)
    return (out, clipped) if return_clipped else out


def acf_from_npsd(npsd, lags, sample_rate=1.0):
    """``r(h) = sum_k mass_k exp(+2j pi h f_k / fs)`` at each lag.

    Lags are in samples and may be non-integer or negative (useful for
    kernels).  Returns an :class:`Acf` when ``lags`` is ``0..L-1``, a plain
    complex array otherwise.
    """
    lags = np.asarray(lags, dtype=float)
    f = npsd.grid.frequencies / sample_rate
    sup = npsd.support
    m = npsd.mass[sup]
    r = np.empty(lags.size, dtype=np.complex128)
    for start in range(0, lags.size, _CHUNK):
        hb = lags[start:start + _CHUNK]
        r[start:start + _CHUNK] = np.exp(2j * np.pi * np.outer(hb, f[sup])) @ m
    if lags.size and np.array_equal(lags, np.arange(lags.size)):
        r[0] = 1.0  # exact by construction: masses sum to one
        return Acf(r, sample_rate)
    return r


def reconstruct(npsd, phase="zero", n_samples=None, sample_rate=None, t0=0.0,
                real=False):
    """Sample ``sum_k sqrt(mass_k) exp(j phi_k) exp(2j pi f_k t)``.

    Parameters
    ----------
    npsd : Npsd
    phase : {"zero"} or phase policy or array
        ``ZeroPhase()``, ``FixedPhase(values)``, ``RandomPhase(seed)`` or
        ``InterpolatedPhase(phi1, phi2, gamma)``; an array is a fixed phase.
    n_samples : int
        Defaults to the grid size.
    sample_rate : float
        Defaults to ``len(grid) * spacing`` so that a DFT grid maps back to
        its own sampling.
    t0 : float
        Time of the first sample.
    real : bool
        Return the real part only.

    The output is scaled to unit energy, ``sum |x|^2 == 1``.
    """
    g = npsd.grid
    n = len(g)
    phi = _as_policy(phase).phases(n)
    if n_samples is None:
        n_samples = n
    if sample_rate is None:
        sample_rate = n * g.spacing
    n_samples = int(n_samples)
    if n_samples < 1:
        raise EmptySeries("n_samples must be positive")
    coef = np.sqrt(npsd.mass) * np.exp(1j * phi)
    sup = np.flatnonzero(coef != 0)
    x = np.zeros(n_samples, dtype=np.complex128)
    t = t0 + np.arange(n_samples) / sample_rate
    for start in range(0, n_samples, _CHUNK):
        tb = t[start:start + _CHUNK]
        x[start:start + _CHUNK] = (
            np.exp(2j * np.pi * np.outer(tb, g.frequencies[sup])) @ coef[sup])
    if real:
        x = x.real.astype(np.complex128)
    energy = np.sum(np.abs(x) ** 2)
    if energy > 0:
        x = x / np.sqrt(energy)
    return TimeSeries(x, sample_rate)
