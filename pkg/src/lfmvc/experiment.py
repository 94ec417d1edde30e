"""Experiment configuration, grid execution and result emission."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
import csv
import json
import logging
from pathlib import Path
import time

import numpy as np

from . import analysis, baselines, io
from .errors import ConfigError, DataError, InconsistentViews, LFMVCError
from .fusion_global import EPS0, LAMBDA_GRID, MAX_ITER, lf_mvc_gam
from .fusion_local import TAU_FRACTION, build_local_aggregates, solve_local
from .kernels import KernelSpec, compute_kernel, preprocess as preprocess_kernel, validate_and_symmetrize
from .metrics import NMI_CONVENTION, evaluate
from .partition import base_partitions, lloyd_round, regularizer_partition, tau_from_fraction, top_k_eigvecs

log = logging.getLogger(__name__)

ALGORITHMS = ("a_mkkm", "sb_kkm", "mkkm", "lf_gam", "lf_lam")
CELL_COLUMNS = ("cell", "lambda", "tau_fraction", "tau", "view", "restart", "restart_seed",
                "acc", "nmi", "purity", "objective_final", "iterations", "converged", "inertia", "error")


@dataclass
class ExperimentConfig:
    label_file: str = None
    kernel_files: list = field(default_factory=list)
    feature_files: list = field(default_factory=list)
    kernel_specs: list = field(default_factory=list)
    k: int = None
    algorithm: str = "lf_lam"
    lambda_grid: list = field(default_factory=lambda: list(LAMBDA_GRID))
    tau_fraction_grid: list = field(default_factory=lambda: [TAU_FRACTION])
    restarts: int = 50
    eps0: float = EPS0
    max_iter: int = MAX_ITER
    seed: int = 0
    preprocess: bool = True
    retain_iterates: bool = False
    row_normalize: bool = True
    workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if int(self.restarts) < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.algorithm in ("lf_gam", "lf_lam"):
            if not self.lambda_grid:
                raise ConfigError("lambda_grid must be non-empty")
            if any(lam < 0 for lam in self.lambda_grid):
                raise ConfigError("lambda values must be >= 0")
        if self.algorithm == "lf_lam":
            if not self.tau_fraction_grid:
                raise ConfigError("tau_fraction_grid must be non-empty")
            if any(not 0 < t <= 1 for t in self.tau_fraction_grid):
                raise ConfigError("tau fractions must lie in (0, 1]")
        if not self.eps0 > 0 or int(self.max_iter) < 1 or int(self.workers) < 1:
            raise ConfigError("need eps0 > 0, max_iter >= 1, workers >= 1")
        if bool(self.kernel_files) == bool(self.feature_files):
            raise ConfigError("give exactly one of kernel_files or feature_files")
        if self.feature_files and self.kernel_specs and len(self.kernel_specs) not in (1, len(self.feature_files)):
            raise ConfigError("kernel_specs needs one entry, or one per feature file")
        if self.label_file is None:
            raise ConfigError("label_file is required")
        for spec in self.kernel_specs:
            KernelSpec.from_dict(spec)

    @classmethod
    def from_dict(cls, d, base_dir=None):
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        d = dict(d)
        if base_dir is not None:
            base = Path(base_dir)
            for key in ("kernel_files", "feature_files"):
                d[key] = [str(base / p) for p in d.get(key, [])]
            if d.get("label_file") is not None:
                d["label_file"] = str(base / d["label_file"])
        return cls(**d)

    @classmethod
    def from_file(cls, path, overrides=None):
        path = Path(path)
        try:
            d = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        d.update(overrides or {})
        return cls.from_dict(d, base_dir=path.parent)

    def snapshot(self):
        # workers is an execution detail; results must not depend on it
        out = asdict(self)
        out.pop("workers")
        return out


# --------------------------------------------------------------------------
# data loading
# --------------------------------------------------------------------------

def load_dataset(config):
    """Return ``(kernels, truth, k)`` for a config."""
    truth = io.read_labels(config.label_file)
    if config.feature_files:
        specs = [KernelSpec.from_dict(s) for s in config.kernel_specs] or [KernelSpec()]
        if len(specs) == 1:
            specs = specs * len(config.feature_files)
        kernels = []
        for path, spec in zip(config.feature_files, specs):
            kernels.append(compute_kernel(io.read_features(path), spec))
    else:
        kernels = [validate_and_symmetrize(io.read_kernel(path)) for path in config.kernel_files]
    sources = config.feature_files or config.kernel_files
    n = truth.size
    for path, K in zip(sources, kernels):
        if K.shape[0] != n:
            raise InconsistentViews(f"{path}: {K.shape[0]} samples, labels have {n}")
    if config.preprocess:
        kernels = [preprocess_kernel(K) for K in kernels]
    k = int(config.k) if config.k is not None else int(truth.max()) + 1
    if truth.max() >= k:
        raise DataError(f"labels must lie in [0, {k}), found {truth.max()}")
    return kernels, truth, k


# --------------------------------------------------------------------------
# grid execution
# --------------------------------------------------------------------------

def cell_seed(seed, index):
    state = np.random.SeedSequence([int(seed), int(index)]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


@dataclass
class RunRecord:
    config: dict
    meta: dict
    cells: list
    summary: dict
    timings: dict = field(default_factory=dict)
    traces: dict = field(default_factory=dict)

    def to_json(self):
        doc = {"config": self.config, "meta": self.meta, "summary": self.summary,
               "cells": [{c: cell[c] for c in CELL_COLUMNS} for cell in self.cells]}
        return json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def _groups(config, m):
    """Solver groups in cell order: ``(lambda, tau_fraction, view)`` triples."""
    if config.algorithm == "lf_lam":
        return [(lam, tau, None) for lam in config.lambda_grid for tau in config.tau_fraction_grid]
    if config.algorithm == "lf_gam":
        return [(lam, None, None) for lam in config.lambda_grid]
    if config.algorithm == "sb_kkm":
        return [(None, None, p) for p in range(m)]
    return [(None, None, None)]


class _Shared:
    """Per-dataset quantities every solver group reuses (computed lazily, once)."""

    def __init__(self, kernels, k):
        self.kernels = kernels
        self.k = k
        self.partitions = None
        self.M = None
        self.aggregates = {}

    def prepare(self, config):
        if config.algorithm in ("lf_gam", "lf_lam"):
            self.partitions = base_partitions(self.kernels, self.k)
            self.M = regularizer_partition(self.kernels, self.k)
        if config.algorithm == "lf_lam":
            n = self.kernels[0].shape[0]
            for frac in config.tau_fraction_grid:
                tau = tau_from_fraction(frac, n)
                if tau not in self.aggregates:
                    self.aggregates[tau] = build_local_aggregates(self.kernels, self.M, tau)


def _solve_group(shared, config, lam, tau_frac, view):
    """Return ``(relaxed partition, objective, iterations, converged, trace rows, tau)``."""
    k = shared.k
    alg = config.algorithm
    if alg == "a_mkkm":
        H = top_k_eigvecs(sum(shared.kernels) / len(shared.kernels), k)
        return H, None, None, None, None, None
    if alg == "sb_kkm":
        return top_k_eigvecs(shared.kernels[view], k), None, None, None, None, None
    if alg == "mkkm":
        st = baselines.mkkm(shared.kernels, k, eps0=config.eps0, max_iter=config.max_iter)
        return st.H, st.objective_trace[-1], st.iterations, st.converged, None, None
    retain = config.retain_iterates
    tau = None
    if alg == "lf_gam":
        res = lf_mvc_gam(shared.partitions, shared.M, lam, config.eps0, config.max_iter, retain)
    else:
        tau = tau_from_fraction(tau_frac, shared.kernels[0].shape[0])
        res = solve_local(shared.partitions, shared.M, shared.aggregates[tau], lam,
                          config.eps0, config.max_iter, retain)
    rows = None
    if retain:
        gap = analysis.gap_trace(res, shared.partitions)
        rows = [(i, obj, float(gap.obj1[i]), float(gap.obj2[i]), float(gap.obj3[i]))
                for i, obj in enumerate(res.objective_trace)]
    return res.F, res.objective, res.iterations, res.converged, rows, tau


def _run_group(shared, config, truth, group, first_index):
    lam, tau_frac, view = group
    base = {"lambda": lam, "tau_fraction": tau_frac, "tau": None, "view": view}
    cells, timings = [], {}
    t0 = time.perf_counter()
    try:
        P, obj, iters, conv, rows, tau = _solve_group(shared, config, lam, tau_frac, view)
        err = None
    except LFMVCError as exc:
        P, obj, iters, conv, rows, tau = None, None, None, None, None, None
        err = f"{type(exc).__name__}: {exc}"
    base["tau"] = tau
    solve_ms = (time.perf_counter() - t0) * 1e3
    for r in range(config.restarts):
        idx = first_index + r
        t1 = time.perf_counter()
        seed = cell_seed(config.seed, idx)
        cell = dict(base, cell=idx, restart=r, restart_seed=seed, acc=None, nmi=None, purity=None,
                    objective_final=obj, iterations=iters, converged=conv, inertia=None, error=err)
        if err is None:
            try:
                labels, inertia = lloyd_round(P, shared.k, restarts=1, seed=seed,
                                              row_normalize=config.row_normalize)
                cell.update(evaluate(labels, truth), inertia=inertia)
            except LFMVCError as exc:
                cell["error"] = f"{type(exc).__name__}: {exc}"
        cells.append(cell)
        timings[idx] = (time.perf_counter() - t1) * 1e3 + (solve_ms if r == 0 else 0.0)
    traces = {first_index: rows} if rows is not None else {}
    return cells, timings, traces


def _summarize(cells, config, m):
    ok = [c for c in cells if c["error"] is None]
    summary = {"n_cells": len(cells), "failed_cells": len(cells) - len(ok)}
    if not ok:
        return summary
    best = max(ok, key=lambda c: (c["acc"], -c["cell"]))
    honest = min(ok, key=lambda c: (c["inertia"], c["cell"]))
    summary["best_by_acc"] = {key: best[key] for key in ("cell", "lambda", "tau_fraction", "view", "acc", "nmi", "purity")}
    summary["best_by_objective"] = {"criterion": "min_lloyd_inertia",
                                    **{key: honest[key] for key in ("cell", "lambda", "tau_fraction", "view", "acc", "nmi", "purity")}}
    for metric in ("acc", "nmi", "purity"):
        vals = np.array([c[metric] for c in ok])
        summary[f"{metric}_mean"] = float(vals.mean())
        summary[f"{metric}_std"] = float(vals.std())
    if config.algorithm == "sb_kkm":
        per_view = []
        for p in range(m):
            vals = [c["acc"] for c in ok if c["view"] == p]
            per_view.append({"view": p, "best_acc": max(vals) if vals else None,
                             "mean_acc": float(np.mean(vals)) if vals else None})
        summary["per_view"] = per_view
        summary["best_view"] = best["view"]
    return summary


def run_experiment(config, kernels=None, truth=None, k=None, workers=None):
    """Run every grid cell of ``config``.

    Cells are numbered lambda-major, then tau, then restart; cell ``i``
    rounds with a Lloyd seed derived from ``(config.seed, i)``. The record
    does not depend on ``workers``.
    """
    if kernels is None:
        kernels, truth, k = load_dataset(config)
    elif k is None:
        k = int(np.max(truth)) + 1
    workers = int(workers or config.workers)
    shared = _Shared(kernels, k)
    groups = _groups(config, len(kernels))
    cells, timings, traces = [], {}, {}
    try:
        shared.prepare(config)
        prepared_error = None
    except LFMVCError as exc:
        prepared_error = exc
    if prepared_error is not None:
        err = f"{type(prepared_error).__name__}: {prepared_error}"
        for g, (lam, tau, view) in enumerate(groups):
            for r in range(config.restarts):
                idx = g * config.restarts + r
                cells.append({c: None for c in CELL_COLUMNS} | {"cell": idx, "lambda": lam, "tau_fraction": tau,
                                                                  "view": view, "restart": r,
                                                                  "restart_seed": cell_seed(config.seed, idx),
                                                                  "error": err})
    else:
        jobs = [(g, i * config.restarts) for i, g in enumerate(groups)]
        if workers == 1:
            results = [_run_group(shared, config, truth, g, i) for g, i in jobs]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda job: _run_group(shared, config, truth, *job), jobs))
        for c, t, tr in results:
            cells.extend(c)
            timings.update(t)
            traces.update(tr)
    meta = {"n": int(kernels[0].shape[0]), "m": len(kernels), "k": int(k),
            "nmi_convention": NMI_CONVENTION, "cell_order": "lambda, tau_fraction, view, restart"}
    return RunRecord(config=config.snapshot(), meta=meta, cells=cells,
                     summary=_summarize(cells, config, len(kernels)), timings=timings, traces=traces)


def emit_results(record, out_dir):
    """Write results.json, cells.csv and any trace_<cell>.csv files; return their paths."""
    if not record.cells:
        raise ValueError("record has no grid cells; nothing to write")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = []
        path = out / "results.json"
        path.write_text(record.to_json())
        written.append(path)
        path = out / "cells.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CELL_COLUMNS + ("wall_time_ms",))
            for cell in record.cells:
                row = ["" if cell[c] is None else cell[c] for c in CELL_COLUMNS]
                w.writerow(row + [f"{record.timings.get(cell['cell'], float('nan')):.3f}"])
        written.append(path)
        for idx, rows in sorted(record.traces.items()):
            path = out / f"trace_{idx}.csv"
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["iteration", "objective", "obj1", "obj2", "obj3"])
                w.writerows([i, repr(float(a)), repr(b), repr(c), repr(d)] for i, a, b, c, d in rows)
            written.append(path)
    except OSError as exc:
        raise OSError(f"writing results to {out}: {exc}") from exc
    return written
