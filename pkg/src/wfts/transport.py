"""
One-dimensional optimal transport between NPSDs.

In 1-D every transport computation reduces to quantile functions.  An NPSD
on a grid has a step quantile function; two of them are compared exactly by
merging their breakpoints on ``(0, 1]``, so no quadrature is involved.
Operations that produce new measures (geodesic points, barycenters,
exp-maps) yield atoms at arbitrary frequencies, which are re-binned onto a
target grid by splitting each atom's mass linearly between its two
neighbouring grid points (``method="linear"``, preserves the mean) or by
moving it to the nearest grid point (``method="nearest"``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence
import warnings

import numpy as np

from .errors import BadOrder, EmptyFamily, GridMismatch, WeightMismatch, WFDiagnostic
from .spectral import FrequencyGrid, Npsd, TimeSeries, normalize, periodogram

__all__ = [
    "QuantileFunction", "TransportPath", "LogMap", "quantile_function",
    "rebin", "wasserstein", "wasserstein_matrix", "wf_distance", "geodesic",
    "barycenter_quantile", "wf_barycenter", "class_distance", "log_map",
    "exp_map", "common_grid",
]


@dataclass(frozen=True, eq=False)
class QuantileFunction:
    """Right-continuous step map on (0, 1).

    ``F(u) = values[i]`` for ``knots[i-1] < u <= knots[i]`` (``knots[-1] = 0``).
    """

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        u = np.array(self.knots, dtype=float)
        v = np.array(self.values, dtype=float)
        if u.ndim != 1 or u.shape != v.shape or u.size == 0:
            raise ValueError("knots and values must be equal-length 1-D arrays")
        if abs(u[-1] - 1.0) > 1e-12:
            raise ValueError("the last knot must be 1")
        if u[0] <= 0 or np.any(np.diff(u) <= 0):
            raise ValueError("knots must be strictly increasing in (0, 1]")
        if np.any(np.diff(v) < 0):
            raise ValueError("quantile values must be nondecreasing")
        u[-1] = 1.0
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "knots", u)
        object.__setattr__(self, "values", v)

    def __call__(self, u):
        i = np.searchsorted(self.knots, u, side="left")
        return self.values[np.clip(i, 0, self.values.size - 1)]

    @property
    def masses(self):
        return np.diff(self.knots, prepend=0.0)

    def to_npsd(self, grid, method="linear"):
        return rebin(self.values, self.masses, grid, method=method)


def quantile_function(npsd):
    """Step quantile function: smallest grid frequency with cumulative mass >= u."""
    if isinstance(npsd, QuantileFunction):
        return npsd
    sup = npsd.support
    cum = np.cumsum(npsd.mass[sup])
    cum /= cum[-1]
    keep = np.diff(cum, prepend=0.0) > 0
    return QuantileFunction(cum[keep], npsd.grid.frequencies[sup][keep])


def _merged(quantiles):
    u = np.unique(np.concatenate([q.knots for q in quantiles]))
    u = u[u > 0]
    u[-1] = 1.0
    du = np.diff(u, prepend=0.0)
    vals = [q(u) for q in quantiles]
    return u, du, vals


def rebin(positions, masses, grid, method="linear"):
    """Assign point masses to grid bins, preserving total mass.

    Atoms outside the grid are clamped to the end bins with a diagnostic.
    """
    x = np.asarray(positions, dtype=float)
    m = np.asarray(masses, dtype=float)
    n = len(grid)
    idx = (x - grid.fmin) / grid.spacing
    lo_out = idx < -1e-9
    hi_out = idx > n - 1 + 1e-9
    if m[lo_out | hi_out].sum() > 1e-12:
        warnings.warn(
            f"{m[lo_out | hi_out].sum():.3g} of mass fell outside the grid "
            f"[{grid.fmin:g}, {grid.fmax:g}] and was clamped to its ends",
            WFDiagnostic, stacklevel=2)
    idx = np.clip(idx, 0, n - 1)
    out = np.zeros(n)
    if method == "nearest":
        np.add.at(out, np.rint(idx).astype(int), m)
    elif method == "linear":
        lo = np.floor(idx)
        w = idx - lo
        # keep atoms that sit on a grid point within rounding in one bin
        w[w < 1e-9] = 0.0
        up = w > 1 - 1e-9
        lo[up] += 1
        w[up] = 0.0
        lo = lo.astype(int)
        hi = np.minimum(lo + 1, n - 1)
        out += np.bincount(lo, weights=m * (1 - w), minlength=n)
        out += np.bincount(hi, weights=m * w, minlength=n)
    else:
        raise ValueError(f"unknown rebinning method {method!r}")
    out = np.clip(out, 0, None)
    return Npsd(grid, out / out.sum())


def wasserstein(a, b, p=2.0):
    """Exact ``W_p`` between two NPSDs (or quantile functions).

    ``W_p^p = int_0^1 |F_a^-(u) - F_b^-(u)|^p du`` evaluated piecewise over the
    merged breakpoints; grids may differ.
    """
    if p < 1:
        raise BadOrder(f"W_p needs p >= 1, got {p}")
    qa, qb = quantile_function(a), quantile_function(b)
    _, du, (va, vb) = _merged((qa, qb))
    d = np.abs(va - vb)
    if p == 2:
        return float(np.sqrt(du @ (d * d)))
    if p == 1:
        return float(du @ d)
    return float((du @ d ** p) ** (1.0 / p))


def _worker_count():
    import os
    try:
        return max(1, int(os.environ.get("WF_THREADS", "1")))
    except ValueError:
        return 1


def wasserstein_matrix(rows, cols=None, p=2.0):
    """Pairwise ``W_p`` matrix; ``WF_THREADS`` caps the worker threads.

    Every entry is computed independently, so the result does not depend on
    the number of workers.
    """
    qr = [quantile_function(s) for s in rows]
    symmetric = cols is None
    qc = qr if symmetric else [quantile_function(s) for s in cols]
    out = np.zeros((len(qr), len(qc)))

    def fill(i):
        start = i + 1 if symmetric else 0
        for j in range(start, len(qc)):
            out[i, j] = wasserstein(qr[i], qc[j], p)

    workers = _worker_count()
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(fill, range(len(qr))))
    else:
        for i in range(len(qr)):
            fill(i)
    if symmetric:
        out = out + out.T
    return out


def wf_distance(x, y, n_freq=None, grid=None, **periodogram_kw):
    """Wasserstein-Fourier distance: ``W2`` between the series' NPSDs."""
    sx = normalize(periodogram(x, n_freq=n_freq, grid=grid, **periodogram_kw))
    sy = normalize(periodogram(y, n_freq=n_freq, grid=grid, **periodogram_kw))
    return wasserstein(sx, sy, 2.0)


def common_grid(*npsds):
    """The shared grid of ``npsds``, or a grid covering all of them at the
    finest of their spacings."""
    grids = [s.grid for s in npsds]
    g0 = grids[0]
    if all(g0.same_as(g) for g in grids[1:]):
        return g0
    step = min(g.spacing for g in grids)
    lo = min(g.fmin for g in grids)
    hi = max(g.fmax for g in grids)
    n = int(np.ceil((hi - lo) / step - 1e-9)) + 1
    return FrequencyGrid(lo + step * np.arange(n))


class TransportPath:
    """Constant-speed displacement geodesic between two NPSDs.

    ``path(0)`` is the source, ``path(1)`` the target; ``path.quantile(g)`` is
    the exact (un-binned) interpolant ``(1-g) F_a^- + g F_b^-``.
    """

    def __init__(self, source, target, grid=None, method="linear"):
        self.source = source
        self.target = target
        self.grid = grid if grid is not None else common_grid(source, target)
        self.method = method
        self._u, self._du, (self._va, self._vb) = _merged(
            (quantile_function(source), quantile_function(target)))

    def quantile(self, gamma):
        v = (1 - gamma) * self._va + gamma * self._vb
        keep = self._du > 0
        # merge equal consecutive values into single knots
        u, v = self._u[keep], v[keep]
        last = np.r_[v[1:] != v[:-1], True]
        return QuantileFunction(u[last], v[last])

    def __call__(self, gamma):
        if gamma == 0 and self.source.grid.same_as(self.grid):
            return self.source
        if gamma == 1 and self.target.grid.same_as(self.grid):
            return self.target
        v = (1 - gamma) * self._va + gamma * self._vb
        return rebin(v, self._du, self.grid, method=self.method)

    evaluate = __call__

    def length(self):
        return float(np.sqrt(self._du @ (self._va - self._vb) ** 2))


def geodesic(a, b, grid=None, method="linear"):
    return TransportPath(a, b, grid=grid, method=method)


def _weights(n, weights):
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise WeightMismatch(f"expected {n} weights, got {w.shape}")
    if np.any(w < 0) or abs(w.sum() - 1) > 1e-9:
        raise WeightMismatch("weights must be nonnegative and sum to 1")
    return w


def barycenter_quantile(family, weights=None):
    """Exact barycenter quantile ``sum_i w_i F_i^-`` as a step function."""
    family = list(family)
    if not family:
        raise EmptyFamily("barycenter of an empty family")
    w = _weights(len(family), weights)
    u, du, vals = _merged([quantile_function(s) for s in family])
    v = np.tensordot(w, np.array(vals), axes=1)
    last = np.r_[v[1:] != v[:-1], True]
    return QuantileFunction(u[last], v[last])


def wf_barycenter(family, weights=None, grid=None, method="linear"):
    """Wasserstein barycenter re-binned to ``grid`` (default: shared grid)."""
    family = list(family)
    if not family:
        raise EmptyFamily("barycenter of an empty family")
    q = barycenter_quantile(family, weights)
    if grid is None:
        grid = common_grid(*family)
    if len(family) == 1 and family[0].grid.same_as(grid):
        return family[0]
    return q.to_npsd(grid, method=method)


def _divergence(tag):
    tag = tag.upper()
    if tag == "W2":
        return wasserstein
    from . import classify
    if tag == "L2":
        return classify.l2_distance
    if tag == "KL":
        return classify.kl_divergence
    raise ValueError(f"unknown divergence {tag!r}")


def class_distance(s, class_set, divergence="W2"):
    """``min_{s' in C} d(s, s')`` and the index of the minimiser."""
    class_set = list(class_set)
    if not class_set:
        raise EmptyFamily("class distance to an empty class")
    d = _divergence(divergence)
    dist = np.array([d(s, c) for c in class_set])
    i = int(np.argmin(dist))
    return float(dist[i]), i


@dataclass(frozen=True, eq=False)
class LogMap:
    """Tangent vector at ``base``: one displacement per support bin of ``base``."""

    base: Npsd
    displacement: np.ndarray

    def __post_init__(self):
        d = np.array(self.displacement, dtype=float)
        if d.shape != (self.base.support.size,):
            raise ValueError("one displacement value per support bin of the base")
        if not np.all(np.isfinite(d)):
            raise ValueError("displacement must be finite")
        d.setflags(write=False)
        object.__setattr__(self, "displacement", d)

    @property
    def positions(self):
        return self.base.grid.frequencies[self.base.support]

    @property
    def weights(self):
        return self.base.mass[self.base.support]

    def norm(self):
        return float(np.sqrt(self.weights @ self.displacement ** 2))


def log_map(s, barycenter):
    """``F_s^- o F_bar - id`` on the support of ``barycenter``.

    Each barycenter atom covers an interval of quantile levels; its
    displacement is the average of ``F_s^-`` over that interval (the
    barycentric projection of the monotone plan), which reduces to the
    pointwise formula when atoms are small.
    """
    base_sup = barycenter.support
    cum = np.cumsum(barycenter.mass[base_sup])
    cum /= cum[-1]
    qs = quantile_function(s)
    # integral of F_s^- from 0 to each barycenter level, exactly
    u = np.unique(np.concatenate([cum, qs.knots]))
    du = np.diff(u, prepend=0.0)
    integral = np.cumsum(du * qs(u))
    at_levels = integral[np.searchsorted(u, cum)]
    width = np.diff(cum, prepend=0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        avg = np.diff(at_levels, prepend=0.0) / width
    avg = np.where(width > 0, avg, qs(cum))
    # averages of a nondecreasing function over consecutive intervals are
    # nondecreasing; restore that where levels near 1 lost precision
    avg = np.maximum.accumulate(avg)
    return LogMap(barycenter, avg - barycenter.grid.frequencies[base_sup])


def exp_map(l, grid=None, method="linear"):
    """Push the base forward through ``f -> f + displacement(f)``.

    A non-monotone map is still applied (mass lands where it is sent) but
    raises a :class:`WFDiagnostic`.
    """
    dest = l.positions + l.displacement
    # reversals far below the grid step are rounding, not a folded map
    if np.any(np.diff(dest) < -1e-6 * l.base.grid.spacing):
        warnings.warn("id + displacement is not monotone; the pushforward "
                      "leaves the geodesically convex region",
                      WFDiagnostic, stacklevel=2)
    return rebin(dest, l.weights, grid if grid is not None else l.base.grid,
                 method=method)
