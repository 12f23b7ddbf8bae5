"""
Command-line front end and experiment runner.

Every subcommand resolves its arguments into an :class:`ExperimentConfig`,
runs it, and writes two files next to ``--out``:

``<out>.json``
    The report: ``schema_version``, the resolved config (including the
    seed) and every computed number at full precision.
``<out>.csv``
    Plot-ready long format with columns ``series_id, x, y, group``.

``wfts rerun report.json`` re-executes the config embedded in a report.
Failures exit with status 1 and a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional

import numpy as np

from . import __version__
from .classify import ModelSpec, cross_validate, distance_matrix
from .errors import BadSpec, WFError
from .interpolate import signal_geodesic
from .io import FORMATS, atomic_write, load_ucr, save_ucr
from .pga import explained_variance, fit_pga
from .spectral import FrequencyGrid, npsd
from .synthetic import generate_synthetic
from .transport import wasserstein, wf_barycenter

__all__ = ["ExperimentConfig", "run", "main", "SCHEMA_VERSION", "TASKS"]

SCHEMA_VERSION = 1
TASKS = ("psd", "dist", "interpolate", "barycenter", "pga", "classify", "synth")
_DIVERGENCES = {"w2": "W2", "l2": "L2", "kl": "KL"}
_SEEDED = ("cos_sinc", "agm", "band_limited", "ar_band_limited")


@dataclass
class ExperimentConfig:
    task: str
    inputs: List[str] = field(default_factory=list)
    format: str = "tsv_label_first"
    labeled: bool = True
    folds: bool = False
    demean: bool = False
    sample_rate: float = 1.0
    n_freq: Optional[int] = None
    grid_min: Optional[float] = None
    grid_max: Optional[float] = None
    divergence: str = "w2"
    model: str = "knn"
    k: int = 6
    splits: int = 10
    train_frac: float = 0.8
    split_kind: str = "random_splits"
    seed: int = 0
    out: str = "wfts_report"
    pair: List[int] = field(default_factory=lambda: [0, 1])
    n_gammas: int = 10
    phase: str = "zero"
    n_components: int = 2
    label: Optional[str] = None
    synth_kind: Optional[str] = None
    synth_params: dict = field(default_factory=dict)

    def validate(self):
        if self.task not in TASKS:
            raise BadSpec(f"unknown task {self.task!r}")
        if self.format not in FORMATS:
            raise BadSpec(f"unknown format {self.format!r}")
        if self.divergence.lower() not in _DIVERGENCES:
            raise BadSpec(f"unknown divergence {self.divergence!r}")
        if self.model not in ("knn", "logistic", "softmax"):
            raise BadSpec(f"unknown model {self.model!r}")
        if (self.grid_min is None) != (self.grid_max is None):
            raise BadSpec("--grid-min and --grid-max go together")
        if self.seed is None:
            raise BadSpec("a seed is required")
        if self.task == "synth" and not self.synth_kind:
            raise BadSpec("synth needs a dataset kind")
        if self.task not in ("synth",) and not self.inputs:
            raise BadSpec(f"task {self.task} needs at least one input file")
        return self

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise BadSpec(f"unknown config keys {sorted(extra)}")
        return cls(**d)


# -- helpers ---------------------------------------------------------------


def _load(cfg):
    datasets = [load_ucr(p, cfg.format, cfg.labeled, cfg.folds, cfg.sample_rate,
                         cfg.demean)
                for p in cfg.inputs]
    series, labels, folds = [], [], []
    for ds in datasets:
        series += ds.series
        labels += ds.labels if ds.labels is not None else [None] * len(ds)
        folds += ds.fold if ds.fold is not None else [None] * len(ds)
    return series, labels, (folds if cfg.folds else None)


def _grid(cfg, series):
    if cfg.grid_min is not None:
        n = cfg.n_freq or max(len(s) for s in series)
        return FrequencyGrid.linspace(cfg.grid_min, cfg.grid_max, n)
    rates = {s.sample_rate for s in series}
    if len(rates) > 1:
        raise BadSpec("series have different sample rates; give grid bounds")
    n = cfg.n_freq or max(len(s) for s in series)
    return FrequencyGrid.dft(n, rates.pop())


def _rows_for(series_id, x, y, group):
    return [(series_id, float(a), float(b), group) for a, b in zip(x, y)]


def _csv_text(rows):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series_id", "x", "y", "group"])
    for sid, x, y, g in rows:
        w.writerow([sid, repr(x), repr(y), "" if g is None else g])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    return x


# -- tasks -----------------------------------------------------------------


def _task_psd(cfg):
    series, labels, _ = _load(cfg)
    grid = _grid(cfg, series)
    rows, out = [], []
    for i, ts in enumerate(series):
        s = npsd(ts, grid=grid)
        rows += _rows_for(i, grid.frequencies, s.mass, labels[i])
        out.append({"mean": s.mean(), "variance": s.variance()})
    return {"grid": grid.frequencies, "npsds": out}, rows


def _task_dist(cfg):
    series, labels, _ = _load(cfg)
    if len(series) < 2:
        raise BadSpec("dist needs at least two series")
    grid = _grid(cfg, series)
    S = [npsd(ts, grid=grid) for ts in series]
    tag = _DIVERGENCES[cfg.divergence.lower()]
    D = distance_matrix(S, S, tag)
    i, j = cfg.pair
    rows = [(a, float(b), float(D[a, b]), tag)
            for a in range(len(S)) for b in range(len(S))]
    return {"divergence": tag, "pair": [i, j], "distance": float(D[i, j]),
            "matrix": D}, rows


def _task_interpolate(cfg):
    series, labels, _ = _load(cfg)
    i, j = cfg.pair
    x1, x2 = series[i], series[j]
    grid = _grid(cfg, [x1, x2])
    gammas = np.linspace(0.0, 1.0, cfg.n_gammas)
    path = signal_geodesic(x1, x2, gammas, phase=cfg.phase, grid=grid,
                           seed=cfg.seed, n_samples=max(len(x1), len(x2)),
                           sample_rate=x1.sample_rate, real=True)
    rows = []
    for n, (g, ts) in enumerate(zip(path.gammas, path.series)):
        rows += _rows_for(n, ts.times, ts.samples.real, f"gamma={g!r}")
    means = [s.mean() for s in path.npsds]
    return {"gammas": gammas, "npsd_means": means,
            "distance": wasserstein(path.npsds[0], path.npsds[-1])}, rows


def _task_barycenter(cfg):
    series, labels, _ = _load(cfg)
    if cfg.label is not None:
        series = [s for s, l in zip(series, labels) if l == cfg.label]
        if not series:
            raise BadSpec(f"no series carry label {cfg.label!r}")
    grid = _grid(cfg, series)
    S = [npsd(ts, grid=grid) for ts in series]
    bary = wf_barycenter(S, grid=grid)
    rows = _rows_for("barycenter", grid.frequencies, bary.mass, cfg.label)
    return {"n_members": len(S), "barycenter": bary.mass,
            "grid": grid.frequencies, "mean": bary.mean(),
            "dispersion": float(np.mean([wasserstein(s, bary) ** 2 for s in S]))}, rows


def _task_pga(cfg):
    series, labels, _ = _load(cfg)
    grid = _grid(cfg, series)
    S = [npsd(ts, grid=grid) for ts in series]
    model = fit_pga(S, cfg.n_components, grid=grid)
    rows = []
    for n in range(model.n_samples):
        for k in range(model.n_components):
            rows.append((n, float(k), float(model.scores[n, k]), labels[n]))
    return {"eigenvalues": model.eigenvalues,
            "explained_variance": explained_variance(model),
            "scores": model.scores, "labels": labels,
            "total_variance": model.total_variance}, rows


def _task_classify(cfg):
    series, labels, folds = _load(cfg)
    if any(l is None for l in labels):
        raise BadSpec("classification needs labelled input")
    grid = _grid(cfg, series)
    S = [npsd(ts, grid=grid) for ts in series]
    spec = ModelSpec(model=cfg.model, divergence=_DIVERGENCES[cfg.divergence.lower()],
                     k=cfg.k)
    split = {"kind": cfg.split_kind, "n": cfg.splits,
             "train_fraction": cfg.train_frac, "seed": cfg.seed}
    res = cross_validate(S, labels, spec, split, folds=folds)
    rows = [(n, float(n), a, "accuracy") for n, a in enumerate(res.accuracies)]
    return res.to_dict(), rows


def _task_synth(cfg):
    params = dict(cfg.synth_params)
    if cfg.synth_kind in _SEEDED:
        params.setdefault("seed", cfg.seed)
    ds = generate_synthetic(cfg.synth_kind, **params)
    data_path = cfg.out + (".data.csv" if cfg.format == "csv" else ".data.tsv")
    if ds.labels is None:
        ds.labels = [cfg.synth_kind] * len(ds)
    real = all(ts.is_real for ts in ds.series)
    if real:
        save_ucr(ds, data_path, cfg.format)
    rows = []
    for n, ts in enumerate(ds.series):
        rows += _rows_for(n, ts.times, ts.samples.real, ds.labels[n])
    return {"n_series": len(ds), "labels": ds.labels, "source": ds.source,
            "data_file": data_path if real else None}, rows


_RUNNERS = {
    "psd": _task_psd, "dist": _task_dist, "interpolate": _task_interpolate,
    "barycenter": _task_barycenter, "pga": _task_pga,
    "classify": _task_classify, "synth": _task_synth,
}


def run(config):
    """Execute ``config`` and write ``<out>.json`` and ``<out>.csv``.

    Returns the report dictionary.
    """
    cfg = config if isinstance(config, ExperimentConfig) else \
        ExperimentConfig.from_dict(config)
    cfg.validate()
    os.makedirs(os.path.dirname(os.path.abspath(cfg.out)), exist_ok=True)
    results, rows = _RUNNERS[cfg.task](cfg)
    report = {
        "schema_version": SCHEMA_VERSION,
        "wfts_version": __version__,
        "task": cfg.task,
        "seed": cfg.seed,
        "config": asdict(cfg),
        "results": _jsonable(results),
    }
    text = json.dumps(report, indent=1, allow_nan=True)
    atomic_write(cfg.out + ".json", text)
    atomic_write(cfg.out + ".csv", _csv_text(rows))
    return report


# -- argument parsing --------------------------------------------------------


def _params(items):
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise BadSpec(f"--param expects key=value, got {item!r}")
        try:
            out[key] = json.loads(val)
        except json.JSONDecodeError:
            out[key] = val
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="wfts", description=(
        "Wasserstein-Fourier analysis of time series: spectra, distances, "
        "interpolation, barycenters, PGA and classification."))
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="task", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("inputs", nargs="*", help="dataset files")
    common.add_argument("--format", choices=FORMATS, default="tsv_label_first")
    common.add_argument("--unlabeled", dest="labeled", action="store_false",
                        help="rows carry no leading label column")
    common.add_argument("--folds", action="store_true",
                        help="second column holds a predefined fold id")
    common.add_argument("--demean", action="store_true",
                        help="subtract each series' mean before analysis")
    common.add_argument("--sample-rate", type=float, default=1.0)
    common.add_argument("--n-freq", type=int)
    common.add_argument("--grid-min", type=float)
    common.add_argument("--grid-max", type=float)
    common.add_argument("--divergence", choices=sorted(_DIVERGENCES), default="w2")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="wfts_report",
                        help="output stem; writes <out>.json and <out>.csv")

    sub.add_parser("psd", parents=[common], help="NPSD of every series")
    d = sub.add_parser("dist", parents=[common], help="pairwise distances")
    d.add_argument("--pair", type=int, nargs=2, default=[0, 1])
    ip = sub.add_parser("interpolate", parents=[common],
                        help="WF geodesic between two series")
    ip.add_argument("--pair", type=int, nargs=2, default=[0, 1])
    ip.add_argument("--gammas", dest="n_gammas", type=int, default=10)
    ip.add_argument("--phase", choices=["zero", "random", "euclidean"],
                    default="zero")
    b = sub.add_parser("barycenter", parents=[common], help="WF barycenter")
    b.add_argument("--label", help="restrict to one class")
    pg = sub.add_parser("pga", parents=[common], help="principal geodesic analysis")
    pg.add_argument("--n-components", type=int, default=2)
    c = sub.add_parser("classify", parents=[common], help="cross-validated accuracy")
    c.add_argument("--model", choices=["logistic", "softmax", "knn"], default="knn")
    c.add_argument("--k", type=int, default=6)
    c.add_argument("--splits", type=int, default=10)
    c.add_argument("--train-frac", type=float, default=0.8)
    c.add_argument("--kfold", dest="split_kind", action="store_const",
                   const="kfold", default="random_splits")
    s = sub.add_parser("synth", parents=[common], help="generate a synthetic dataset")
    s.add_argument("--kind", dest="synth_kind", required=True)
    s.add_argument("--param", dest="synth_params", action="append",
                   metavar="KEY=VALUE")
    r = sub.add_parser("rerun", help="re-execute the config inside a report")
    r.add_argument("report")
    r.add_argument("--out", help="override the output stem")
    return p


def config_from_args(ns):
    d = vars(ns).copy()
    if "synth_params" in d:
        d["synth_params"] = _params(d["synth_params"])
    return ExperimentConfig.from_dict(d)


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.task == "rerun":
            with open(ns.report, encoding="utf-8") as fh:
                cfg = ExperimentConfig.from_dict(json.load(fh)["config"])
            if ns.out:
                cfg.out = ns.out
        else:
            cfg = config_from_args(ns)
        run(cfg)
    except (WFError, ValueError, OSError, KeyError, IndexError) as exc:
        err = {"schema_version": SCHEMA_VERSION, "error": type(exc).__name__,
               "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return 1
    print(cfg.out + ".json")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
