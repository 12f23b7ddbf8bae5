"""
Principal geodesic analysis of NPSD families.

Tangent-space PCA at the Wasserstein barycenter: every NPSD is log-mapped
to a displacement field on the barycenter support, the centered fields are
decomposed with PCA under the barycenter-weighted inner product
``<f, g> = sum_i f_i g_i sbar_i``, and components are pushed back to
distributions through the exponential map.  This is the usual fast
approximation of PGA; geodesics in Wasserstein space are not exactly images
of tangent lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
from typing import List, Optional
import warnings

import numpy as np

from .errors import BadK, IndexOutOfRange, WFDiagnostic
from .spectral import FrequencyGrid, Npsd
from .transport import LogMap, exp_map, log_map, wf_barycenter, wasserstein

__all__ = ["PgaModel", "fit_pga", "project", "component_curve",
           "explained_variance", "reconstruct_family"]

SCHEMA_VERSION = 1


@dataclass(frozen=True, eq=False)
class PgaModel:
    barycenter: Npsd
    mean_logmap: LogMap
    eigenvalues: np.ndarray      # (K,)
    eigenvectors: np.ndarray     # (K, n_support), sbar-orthonormal
    scores: np.ndarray           # (N, K)
    total_variance: float
    logmaps: np.ndarray = field(repr=False)  # (N, n_support), uncentered

    @property
    def n_components(self):
        return self.eigenvalues.size

    @property
    def n_samples(self):
        return self.scores.shape[0]

    @property
    def weights(self):
        return self.barycenter.mass[self.barycenter.support]

    def gram(self):
        """Barycenter-weighted Gram matrix of the eigenvectors."""
        v = self.eigenvectors
        return (v * self.weights) @ v.T

    def tangent(self, coefficients):
        """``mean_logmap + sum_k c_k v_k`` as a :class:`LogMap`."""
        c = np.asarray(coefficients, dtype=float)
        disp = self.mean_logmap.displacement + c @ self.eigenvectors[:c.size]
        return LogMap(self.barycenter, disp)

    def to_dict(self):
        g = self.barycenter.grid
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "pga",
            "grid": g.frequencies.tolist(),
            "barycenter": self.barycenter.mass.tolist(),
            "mean_logmap": self.mean_logmap.displacement.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.eigenvectors.tolist(),
            "scores": self.scores.tolist(),
            "total_variance": self.total_variance,
            "logmaps": self.logmaps.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        grid = FrequencyGrid(np.array(d["grid"]))
        bary = Npsd(grid, np.array(d["barycenter"]))
        return cls(
            barycenter=bary,
            mean_logmap=LogMap(bary, np.array(d["mean_logmap"])),
            eigenvalues=np.array(d["eigenvalues"], dtype=float),
            eigenvectors=np.array(d["eigenvectors"], dtype=float).reshape(
                len(d["eigenvalues"]), -1),
            scores=np.array(d["scores"], dtype=float).reshape(
                -1, len(d["eigenvalues"])),
            total_variance=float(d["total_variance"]),
            logmaps=np.array(d["logmaps"], dtype=float),
        )

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _orient(v, w):
    """Sign so the weighted mean is >= 0; near-zero means defer to the first
    nonzero entry."""
    m = w @ v
    scale = np.sqrt(w @ v ** 2)
    if abs(m) > 1e-10 * max(scale, 1e-300):
        return v if m > 0 else -v
    nz = np.flatnonzero(np.abs(v) > 1e-12 * max(np.abs(v).max(), 1e-300))
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def _complete_basis(vecs, w, n_missing):
    """Extend weighted-orthonormal ``vecs`` with ``n_missing`` further
    weighted-orthonormal vectors (Gram-Schmidt on coordinate vectors)."""
    basis = list(vecs)
    dim = w.size
    for e in range(dim):
        if n_missing == 0:
            break
        u = np.zeros(dim)
        u[e] = 1.0
        for b in basis:
            u = u - (w @ (u * b)) * b
        nrm = np.sqrt(w @ u ** 2)
        if nrm > 1e-8:
            basis.append(_orient(u / nrm, w))
            n_missing -= 1
    return basis[len(vecs):]


def fit_pga(family, n_components, grid=None):
    """Fit tangent PCA at the barycenter of ``family``.

    Uses the N x N Gram matrix of centered log-maps (dual PCA).  Eigenvalues
    are those of the empirical covariance operator with ``1/N``
    normalisation; scores are ``<l_n - mean, v_k>``.  Components whose
    eigenvalue vanishes get arbitrary weighted-orthonormal directions and
    zero scores, with a diagnostic.
    """
    family = list(family)
    n = len(family)
    if n < 2:
        raise BadK("PGA needs at least two NPSDs")
    k = int(n_components)
    if not 1 <= k <= n - 1:
        raise BadK(f"n_components must lie in [1, {n - 1}], got {k}")
    bary = wf_barycenter(family, grid=grid)
    logs = np.array([log_map(s, bary).displacement for s in family])
    w = bary.mass[bary.support]
    mean = logs.mean(axis=0)
    centered = logs - mean
    gram = (centered * w) @ centered.T / n
    gram = 0.5 * (gram + gram.T)
    vals, vecs = np.linalg.eigh(gram)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    total = float(np.clip(vals, 0, None).sum())
    eigvals, eigvecs = [], []
    for j in range(k):
        lam = vals[j]
        if not (total > 0 and lam > 1e-12 * total):
            break
        v = centered.T @ vecs[:, j] / np.sqrt(n * lam)
        eigvals.append(lam)
        eigvecs.append(_orient(v, w))
    n_zero = k - len(eigvals)
    if n_zero:
        warnings.warn(f"{n_zero} of {k} components carry no variance",
                      WFDiagnostic, stacklevel=2)
        eigvecs += _complete_basis(eigvecs, w, n_zero)
        eigvals += [0.0] * n_zero
    eigvecs = np.array(eigvecs)
    scores = (centered * w) @ eigvecs.T
    scores[:, len(eigvals) - n_zero:] = 0.0
    # exact zero column means, independent of rounding in the projections
    scores -= scores.mean(axis=0)
    return PgaModel(
        barycenter=bary,
        mean_logmap=LogMap(bary, mean),
        eigenvalues=np.clip(np.array(eigvals), 0, None),
        eigenvectors=eigvecs,
        scores=scores,
        total_variance=total,
        logmaps=logs,
    )


def _check_k(model, k):
    if not 0 <= k < model.n_components:
        raise IndexOutOfRange(
            f"component {k} out of range [0, {model.n_components - 1}]")


def project(model, n, k, grid=None):
    """Score ``t_{k,n}`` and the projection ``exp(mean + t_{k,n} v_k)``.

    Indices are 0-based.
    """
    _check_k(model, k)
    if not 0 <= n < model.n_samples:
        raise IndexOutOfRange(f"sample {n} out of range [0, {model.n_samples - 1}]")
    t = float(model.scores[n, k])
    disp = model.mean_logmap.displacement + t * model.eigenvectors[k]
    return t, exp_map(LogMap(model.barycenter, disp), grid=grid)


def component_curve(model, k, t_values, grid=None):
    """NPSDs ``exp(mean + t v_k)`` for each ``t``."""
    _check_k(model, k)
    out = []
    for t in np.atleast_1d(t_values):
        disp = model.mean_logmap.displacement + t * model.eigenvectors[k]
        out.append(exp_map(LogMap(model.barycenter, disp), grid=grid))
    return out


def explained_variance(model):
    if model.total_variance <= 0:
        warnings.warn("family has no variance; explained variance is zero",
                      WFDiagnostic, stacklevel=2)
        return np.zeros(model.n_components)
    return model.eigenvalues / model.total_variance


def reconstruct_family(model, n_used=None, grid=None):
    """Exp-map reconstructions of every sample from its first ``n_used``
    scores."""
    n_used = model.n_components if n_used is None else int(n_used)
    out = []
    for n in range(model.n_samples):
        disp = (model.mean_logmap.displacement
                + model.scores[n, :n_used] @ model.eigenvectors[:n_used])
        out.append(exp_map(LogMap(model.barycenter, disp), grid=grid))
    return out
