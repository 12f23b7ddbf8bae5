"""
Distance-based classifiers on NPSD embeddings.

Features are divergences between a sample and per-class prototypes.  The
pairing of divergence and prototype is fixed: ``W2`` uses Wasserstein
barycenters, ``L2`` and ``KL`` use Euclidean (bin-wise) means.  ``KL`` is
always evaluated as ``KL(sample || prototype)``, which is finite whenever
the prototype is a Euclidean mean of a family containing the sample.

Binary models use the three-parameter logistic form
``p(C0|s) = 1 / (1 + exp(-a + b d(s, p0) - c d(s, p1)))`` with class 0 the
lexicographically first label.  Multiclass models use the softmax
``p(Ci|s) ∝ exp(-(a_i + sum_k b_ik d(s, p_k)))``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
import json
from typing import List, Optional, Sequence
import warnings

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, log_expit, logsumexp

from .errors import (EmptyTraining, FoldMismatch, GridMismatch, SingleClass,
                     WFDiagnostic)
from .spectral import FrequencyGrid, Npsd
from .transport import quantile_function, wasserstein, wf_barycenter

__all__ = [
    "DIVERGENCES", "l2_distance", "kl_divergence", "divergence",
    "prototypes", "LogisticModel", "KnnModel", "fit_logistic",
    "predict_proba", "predict", "fit_knn", "knn_classify", "CVResult",
    "ModelSpec", "cross_validate", "distance_matrix",
]

DIVERGENCES = ("W2", "L2", "KL")
SCHEMA_VERSION = 1


def _same_grid(a, b):
    if not a.grid.same_as(b.grid):
        raise GridMismatch("NPSDs live on different grids")


def l2_distance(a, b):
    _same_grid(a, b)
    d = a.mass - b.mass
    return float(np.sqrt(d @ d))


def kl_divergence(s, sbar):
    """``sum s log(s / sbar)`` with ``0 log 0 = 0``; ``inf`` on support violation."""
    _same_grid(s, sbar)
    p, q = s.mass, sbar.mass
    on = p > 0
    if np.any(q[on] == 0):
        return float("inf")
    return float(max(p[on] @ np.log(p[on] / q[on]), 0.0))


def _tag(d):
    t = str(d).upper()
    if t not in DIVERGENCES:
        raise ValueError(f"unknown divergence {d!r}; expected one of {DIVERGENCES}")
    return t


def divergence(tag):
    return {"W2": wasserstein, "L2": l2_distance, "KL": kl_divergence}[_tag(tag)]


def _euclidean_mean(family):
    return Npsd(family[0].grid, np.mean([s.mass for s in family], axis=0))


def prototypes(npsds, labels, tag):
    """Per-class prototypes in sorted label order."""
    tag = _tag(tag)
    classes = sorted(set(labels))
    labels = np.asarray(labels, dtype=object)
    protos = []
    for c in classes:
        members = [s for s, l in zip(npsds, labels) if l == c]
        if tag == "W2":
            protos.append(wf_barycenter(members, grid=members[0].grid))
        else:
            protos.append(_euclidean_mean(members))
    return classes, protos


def prototype_rule(tag):
    return "wasserstein_barycenter" if _tag(tag) == "W2" else "euclidean_mean"


def distance_matrix(samples, references, tag, p=2.0):
    """``d(samples[i], references[j])``; ``WF_THREADS`` caps threads for ``W2``."""
    tag = _tag(tag)
    if tag == "W2":
        from .transport import wasserstein_matrix
        return wasserstein_matrix(samples, references, p)
    f = divergence(tag)
    return np.array([[f(s, r) for r in references] for s in samples])


# -- logistic / softmax -----------------------------------------------------------


@dataclass(eq=False)
class LogisticModel:
    """Fitted distance-logistic (binary) or distance-softmax model.

    ``params`` is ``[alpha, beta, gamma]`` for the binary form, and a
    ``(n_classes, 1 + n_classes)`` array of rows ``[alpha_i, beta_i^1, ...]``
    for the softmax form.
    """

    kind: str
    divergence: str
    classes: list
    prototypes: list
    params: np.ndarray
    scale: Optional[np.ndarray] = None
    history: list = field(default_factory=list, repr=False)
    converged: bool = True

    @property
    def prototype_rule(self):
        return prototype_rule(self.divergence)

    def features(self, s):
        d = divergence(self.divergence)
        f = np.array([d(s, p) for p in self.prototypes])
        return f if self.scale is None else f / self.scale

    def to_dict(self):
        g = self.prototypes[0].grid
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "divergence": self.divergence,
            "prototype_rule": self.prototype_rule,
            "classes": list(self.classes),
            "grid": g.frequencies.tolist(),
            "prototypes": [p.mass.tolist() for p in self.prototypes],
            "params": np.asarray(self.params).tolist(),
            "scale": None if self.scale is None else self.scale.tolist(),
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, d):
        grid = FrequencyGrid(np.array(d["grid"]))
        return cls(
            kind=d["kind"], divergence=d["divergence"],
            classes=list(d["classes"]),
            prototypes=[Npsd(grid, np.array(m)) for m in d["prototypes"]],
            params=np.array(d["params"], dtype=float),
            scale=None if d.get("scale") is None else np.array(d["scale"]),
            converged=d.get("converged", True),
        )

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _binary_logit0(theta, F):
    """log-odds of class 0: ``alpha - beta d0 + gamma d1``."""
    return theta[0] - theta[1] * F[:, 0] + theta[2] * F[:, 1]


def _binary_nll(theta, F, y0, eps):
    z = _binary_logit0(theta, F)
    # y0 = 1 for class 0
    ll = y0 * log_expit(z) + (1 - y0) * log_expit(-z)
    r = expit(z) - y0  # d(-ll)/dz
    n = F.shape[0]
    grad = np.array([r.sum(), -(r @ F[:, 0]), r @ F[:, 1]]) / n
    return -ll.mean() + 0.5 * eps * theta @ theta, grad + eps * theta


def _softmax_scores(theta, F, k):
    W = theta.reshape(k, k + 1)
    X = np.hstack([np.ones((F.shape[0], 1)), F])
    return -(X @ W.T), X


def _softmax_nll(theta, F, Y, eps):
    k = Y.shape[1]
    S, X = _softmax_scores(theta, F, k)
    lse = logsumexp(S, axis=1, keepdims=True)
    logp = S - lse
    n = F.shape[0]
    nll = -(Y * logp).sum() / n
    # dS/dW_i = -X ; d nll / dS = P - Y
    G = -((np.exp(logp) - Y).T @ X) / n
    return nll + 0.5 * eps * theta @ theta, G.ravel() + eps * theta


def fit_logistic(npsds, labels, divergence="W2", kind=None, penalty=1e-6,
                 standardize=False, gtol=1e-6, maxiter=500):
    """Maximum-likelihood fit of the distance-logistic model.

    Parameters
    ----------
    kind : {"logistic", "softmax"}, optional
        Defaults to ``"logistic"`` for two classes and ``"softmax"`` above.
    penalty : float
        Ridge weight on the parameters; keeps separable problems finite.
    standardize : bool
        Divide each distance feature by its training standard deviation.

    The optimiser is BFGS with a strong-Wolfe line search from a zero start,
    stopping at gradient norm ``gtol`` or ``maxiter`` iterations.  The
    objective after each iteration is recorded in ``model.history``.
    """
    npsds = list(npsds)
    labels = list(labels)
    if not npsds:
        raise EmptyTraining("no training samples")
    if len(npsds) != len(labels):
        raise ValueError("one label per NPSD is required")
    tag = _tag(divergence)
    classes, protos = prototypes(npsds, labels, tag)
    if len(classes) < 2:
        raise SingleClass("training data holds a single class")
    if kind is None:
        kind = "logistic" if len(classes) == 2 else "softmax"
    if kind == "logistic" and len(classes) != 2:
        raise ValueError("the three-parameter logistic model is binary; "
                         "use kind='softmax'")
    F = distance_matrix(npsds, protos, tag)
    scale = None
    if standardize:
        scale = F.std(axis=0)
        scale[scale == 0] = 1.0
        F = F / scale
    index = {c: i for i, c in enumerate(classes)}
    y = np.array([index[l] for l in labels])
    if kind == "logistic":
        fun = _binary_nll
        args = (F, (y == 0).astype(float), penalty)
        theta0 = np.zeros(3)
    else:
        k = len(classes)
        fun = _softmax_nll
        args = (F, np.eye(k)[y], penalty)
        theta0 = np.zeros(k * (k + 1))
    history = [fun(theta0, *args)[0]]
    res = minimize(fun, theta0, args=args, jac=True, method="BFGS",
                   callback=lambda th: history.append(fun(th, *args)[0]),
                   options={"gtol": gtol, "maxiter": maxiter})
    params = res.x if kind == "logistic" else res.x.reshape(len(classes), -1)
    if not np.all(np.isfinite(params)):
        raise FloatingPointError("logistic fit diverged")
    return LogisticModel(kind, tag, classes, protos, params, scale, history,
                         bool(res.success))


def _proba_from_features(model, F):
    F = np.atleast_2d(F)
    if model.kind == "logistic":
        z = _binary_logit0(model.params, F)
        p0 = expit(z)
        return np.column_stack([p0, 1 - p0])
    k = len(model.classes)
    S, _ = _softmax_scores(np.ravel(model.params), F, k)
    return np.exp(S - logsumexp(S, axis=1, keepdims=True))


def predict_proba(model, s):
    """Class probabilities (in ``model.classes`` order) for one NPSD or a list."""
    if isinstance(s, Npsd):
        return _proba_from_features(model, model.features(s))[0]
    F = np.array([model.features(x) for x in s])
    return _proba_from_features(model, F)


def predict(model, samples):
    samples = [samples] if isinstance(samples, Npsd) else list(samples)
    if isinstance(model, KnnModel):
        return [knn_classify(model, s)[0] for s in samples]
    P = predict_proba(model, samples)
    return [model.classes[i] for i in np.argmax(P, axis=1)]


# -- nearest neighbours ----------------------------------------------------


@dataclass(eq=False)
class KnnModel:
    train: list
    labels: list
    k: int = 6
    divergence: str = "W2"

    def __post_init__(self):
        if not self.train:
            raise EmptyTraining("KNN needs training samples")
        if len(self.train) != len(self.labels):
            raise ValueError("one label per training NPSD is required")
        if not 1 <= self.k <= len(self.train):
            raise ValueError(f"k must lie in [1, {len(self.train)}]")
        self.divergence = _tag(self.divergence)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "knn",
            "divergence": self.divergence,
            "k": self.k,
            "labels": list(self.labels),
            "grid": self.train[0].grid.frequencies.tolist(),
            "train": [s.mass.tolist() for s in self.train],
        }

    @classmethod
    def from_dict(cls, d):
        grid = FrequencyGrid(np.array(d["grid"]))
        return cls([Npsd(grid, np.array(m)) for m in d["train"]],
                   list(d["labels"]), int(d["k"]), d["divergence"])


def fit_knn(npsds, labels, k=6, divergence="W2"):
    return KnnModel(list(npsds), list(labels), k, divergence)


def _vote(distances, labels, k):
    order = np.lexsort((np.arange(distances.size), distances))
    nearest = order[:k]
    if np.all(np.isinf(distances[nearest])):
        warnings.warn("all neighbours at infinite divergence; "
                      "falling back to the global majority class",
                      WFDiagnostic, stacklevel=3)
        counts = Counter(labels)
        top = max(counts.values())
        # first label (by training order) among the most frequent
        label = next(l for l in labels if counts[l] == top)
        return label, nearest
    counts = Counter(labels[i] for i in nearest)
    top = max(counts.values())
    # tied classes: the one owning the nearest neighbour wins
    label = next(labels[i] for i in nearest if counts[labels[i]] == top)
    return label, nearest


def knn_classify(model, s, distances=None):
    """Majority label among the ``k`` nearest training NPSDs.

    Ties between distances go to the lower training index; ties between
    classes go to the class of the nearest neighbour.  Infinite divergences
    rank last.
    """
    if distances is None:
        d = divergence(model.divergence)
        distances = np.array([d(s, t) for t in model.train])
    label, nearest = _vote(np.asarray(distances, dtype=float), model.labels,
                           model.k)
    return label, nearest


# -- cross validation -------------------------------------------------------


@dataclass(frozen=True)
class ModelSpec:
    model: str = "knn"          # knn | logistic | softmax
    divergence: str = "W2"
    k: int = 6
    penalty: float = 1e-6
    standardize: bool = False


@dataclass(frozen=True)
class CVResult:
    accuracies: tuple
    mean: float
    stderr: float

    def to_dict(self):
        return {"accuracies": list(self.accuracies), "mean": self.mean,
                "stderr": self.stderr}


def _splits(n, split, folds=None):
    kind = split.get("kind", "random_splits")
    seed = split.get("seed")
    if seed is None:
        raise ValueError("split spec needs an explicit seed")
    if kind == "random_splits":
        n_splits = int(split.get("n", 10))
        frac = float(split.get("train_fraction", 0.8))
        n_train = int(round(frac * n))
        if not 0 < n_train < n:
            raise ValueError("train_fraction leaves an empty train or test set")
        rng = np.random.default_rng(seed)
        for _ in range(n_splits):
            perm = rng.permutation(n)
            yield np.sort(perm[:n_train]), np.sort(perm[n_train:])
    elif kind == "kfold":
        n_splits = int(split.get("n", 10))
        if folds is not None:
            folds = np.asarray(folds)
            if folds.shape != (n,):
                raise FoldMismatch("one fold id per sample is required")
            ids = np.unique(folds)
            if "n" in split and ids.size != n_splits:
                raise FoldMismatch(
                    f"dataset defines {ids.size} folds, split spec asks {n_splits}")
        else:
            rng = np.random.default_rng(seed)
            folds = np.empty(n, dtype=int)
            folds[rng.permutation(n)] = np.arange(n) % n_splits
            ids = np.arange(n_splits)
        for f in ids:
            test = np.flatnonzero(folds == f)
            yield np.flatnonzero(folds != f), test
    else:
        raise ValueError(f"unknown split kind {kind!r}")


def cross_validate(npsds, labels, spec=ModelSpec(), split=None, folds=None,
                   model_factory=None):
    """Accuracy over train/test splits: per split, mean, standard error.

    ``split`` is ``{"kind": "random_splits", "n": 10, "train_fraction": 0.8,
    "seed": s}`` or ``{"kind": "kfold", "n": 10, "seed": s}``; ``folds``
    (one id per sample) overrides the random fold assignment.  The standard
    error is the sample standard deviation over splits divided by
    ``sqrt(n_splits)``.

    ``model_factory(train_npsds, train_labels)`` may replace ``spec``; it
    must return an object with ``predict(list_of_npsds) -> labels``.
    """
    npsds = list(npsds)
    labels = list(labels)
    if not npsds:
        raise EmptyTraining("no samples")
    split = split or {"kind": "random_splits", "n": 10,
                      "train_fraction": 0.8, "seed": 0}
    tag = _tag(spec.divergence)
    full = None
    if model_factory is None and spec.model == "knn":
        full = distance_matrix(npsds, npsds, tag)
    accs = []
    for train, test in _splits(len(npsds), split, folds):
        tr_s = [npsds[i] for i in train]
        tr_l = [labels[i] for i in train]
        te_l = [labels[i] for i in test]
        if model_factory is not None:
            pred = model_factory(tr_s, tr_l).predict([npsds[i] for i in test])
        elif spec.model == "knn":
            model = fit_knn(tr_s, tr_l, min(spec.k, len(train)), tag)
            pred = [knn_classify(model, None, full[i, train])[0] for i in test]
        else:
            model = fit_logistic(tr_s, tr_l, tag, kind=spec.model,
                                 penalty=spec.penalty,
                                 standardize=spec.standardize)
            pred = predict(model, [npsds[i] for i in test])
        accs.append(float(np.mean([p == t for p, t in zip(pred, te_l)])))
    a = np.array(accs)
    se = float(a.std(ddof=1) / np.sqrt(a.size)) if a.size > 1 else 0.0
    return CVResult(tuple(accs), float(a.mean()), se)
