"""Experiment runner, sweeps and artifact emission.

Every CSV written here starts with the resolved configuration as ``#``
lines, so a file can be traced back to (and re-run from) its settings.
"""

from __future__ import annotations

import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .config import ExperimentSpec, SweepJob, SweepSpec
from .distributions import sample_by_name
from .errors import DivergenceError
from .io import read_samples, write_samples, write_table
from .maps import apply_map, fit_map, load_map, save_map
from .metrics import MetricReport, angles_unit, histogram, metric_report, radii
from .optimizer import TRAJECTORY_COLUMNS, TrajectoryRecord, optimize_samples
from .rng import derive_seed
from .special import ChiModel, chi_pdf
from .svg import histogram_svg, line_chart_svg, scatter_svg, write_svg

__all__ = [
    "ExperimentResult",
    "initial_samples",
    "run_experiment",
    "write_experiment",
    "evaluate_samples",
    "write_evaluation",
    "map_samples",
    "run_sweep",
    "SWEEP_COLUMNS",
    "trajectory_correlation",
]


def initial_samples(spec: ExperimentSpec) -> np.ndarray:
    if spec.init is not None:
        Z, _ = read_samples(spec.init)
        return Z
    return sample_by_name(spec.distribution, spec.n_samples, [spec.seed, 0], **spec.params)


def optimizer_seed(spec: ExperimentSpec) -> int:
    return derive_seed(spec.seed, spec.job_index, 1)


def metric_seed(spec: ExperimentSpec) -> int:
    # independent of job_index: configs sharing a seed are measured against
    # the same reference draws
    return derive_seed(spec.seed, 2)


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    init: np.ndarray
    final: Optional[np.ndarray]
    records: List[TrajectoryRecord] = field(default_factory=list)
    error: Optional[str] = None
    diverged_at: Optional[int] = None
    seconds: float = 0.0


def run_experiment(spec: ExperimentSpec, init: Optional[np.ndarray] = None) -> ExperimentResult:
    """Optimize ``init`` (or freshly drawn samples) under ``spec``.

    Divergence is caught and reported in the result instead of raised.
    """
    Z0 = initial_samples(spec) if init is None else np.asarray(init, dtype=float)
    t0 = time.perf_counter()
    try:
        final, records = optimize_samples(
            Z0, spec.loss, spec.schedule, optimizer_seed(spec), spec.record_every
        )
    except DivergenceError as exc:
        return ExperimentResult(spec, Z0, None, [], str(exc), exc.step,
                                time.perf_counter() - t0)
    return ExperimentResult(spec, Z0, final, records, seconds=time.perf_counter() - t0)


def trajectory_rows(records: List[TrajectoryRecord]):
    return [r.row() for r in records]


def trajectory_correlation(records: List[TrajectoryRecord]) -> float:
    """Pearson correlation of the unweighted radial loss with the E2MC diagnostic."""
    a = np.array([r.radial_gaussianization for r in records])
    b = np.array([r.e2mc for r in records])
    ok = np.isfinite(a) & np.isfinite(b)
    a, b = a[ok], b[ok]
    if a.size < 3 or a.std() == 0 or b.std() == 0:
        return float("nan")
    return float(np.corrcoef(a, b)[0, 1])


def write_experiment(res: ExperimentResult, out_dir: str, plot: bool = True) -> dict:
    """trajectory.csv, final.csv (and init.csv when sampled), scatter.svg."""
    header = res.spec.resolved()
    paths = {}
    os.makedirs(out_dir, exist_ok=True)
    if res.spec.init is None:
        paths["init"] = os.path.join(out_dir, "init.csv")
        write_samples(paths["init"], res.init, header)
    paths["trajectory"] = os.path.join(out_dir, "trajectory.csv")
    write_table(paths["trajectory"], TRAJECTORY_COLUMNS, trajectory_rows(res.records), header)
    if res.final is not None:
        paths["final"] = os.path.join(out_dir, "final.csv")
        write_samples(paths["final"], res.final, header)
        if plot and res.final.shape[1] >= 2:
            paths["scatter"] = os.path.join(out_dir, "scatter.svg")
            write_svg(paths["scatter"], scatter_svg(res.final, "optimized samples (grey: initial)",
                                                    extra=res.init))
    return paths


# ------------------------------------------------------------- evaluation


def evaluate_samples(Z, seed: int = 0, reps: int = 5) -> MetricReport:
    return metric_report(Z, seed=seed, reps=reps)


def write_evaluation(Z, out_dir: str, seed: int = 0, reps: int = 5, comments=None,
                     bins: int = 60, plot: bool = True) -> dict:
    """metrics.csv, radius/angle histogram CSVs and SVGs."""
    os.makedirs(out_dir, exist_ok=True)
    report = evaluate_samples(Z, seed, reps)
    paths = {"metrics": os.path.join(out_dir, "metrics.csv")}
    write_table(paths["metrics"], MetricReport.columns(), [report.row()], comments)
    d = Z.shape[1]
    r = radii(Z)
    edges, heights = histogram(r, bins, (0.0, float(r.max()) * 1.02 or 1.0))
    paths["radius_hist"] = os.path.join(out_dir, "radius_hist.csv")
    write_table(paths["radius_hist"], ["left", "right", "density"],
                zip(edges[:-1], edges[1:], heights), comments)
    if plot:
        grid = np.linspace(0.0, edges[-1], 200)
        paths["radius_svg"] = os.path.join(out_dir, "radius_hist.svg")
        write_svg(paths["radius_svg"], histogram_svg(
            edges, heights, "radius histogram", "radius",
            overlay=(grid, chi_pdf(ChiModel(d), grid)), overlay_label=f"chi({d}) density"))
    if d == 2:
        u = angles_unit(Z)
        edges, heights = histogram(u, bins, (0.0, 1.0))
        paths["angle_hist"] = os.path.join(out_dir, "angle_hist.csv")
        write_table(paths["angle_hist"], ["left", "right", "density"],
                    zip(edges[:-1], edges[1:], heights), comments)
        if plot:
            paths["angle_svg"] = os.path.join(out_dir, "angle_hist.svg")
            write_svg(paths["angle_svg"], histogram_svg(
                edges, heights, "angle histogram", "angle / 2pi",
                overlay=(np.array([0.0, 1.0]), np.array([1.0, 1.0])), overlay_label="uniform"))
    return {"report": report, "paths": paths}


def map_samples(Z, kind: str, out_dir: str, seed: int = 0, reps: int = 5, map_in=None,
                comments=None) -> dict:
    """Fit (or load) a pushforward map, apply it and report before/after."""
    os.makedirs(out_dir, exist_ok=True)
    pm = load_map(map_in) if map_in else fit_map(Z, kind)
    Y = apply_map(pm, Z)
    before = evaluate_samples(Z, seed, reps)
    after = evaluate_samples(Y, seed, reps)
    paths = {
        "mapped": os.path.join(out_dir, "mapped.csv"),
        "metrics": os.path.join(out_dir, "metrics.csv"),
        "map": os.path.join(out_dir, "map.csv"),
    }
    write_samples(paths["mapped"], Y, comments)
    write_table(paths["metrics"], ["stage"] + MetricReport.columns(),
                [["before"] + before.row(), ["after"] + after.row()], comments)
    save_map(pm, paths["map"], comments)
    return {"map": pm, "mapped": Y, "before": before, "after": after, "paths": paths}


# ----------------------------------------------------------------- sweeps

SETTING_COLUMNS = ("method", "alpha", "lr", "beta1", "beta2", "lambda2", "lambda3", "w1_weight")
SWEEP_COLUMNS = (
    ("config", "seed") + SETTING_COLUMNS
    + ("status", "diverged_at", "w1_gaussian_init", "w1_gaussian_init_se")
    + tuple("final_" + c for c in MetricReport.columns())
    + ("final_loss", "best_loss", "final_kl_to_chi", "final_e2mc", "corr_radial_e2mc")
)


def _run_job(job: SweepJob, out_dir: Optional[str], save_samples: bool):
    spec = job.spec
    Z0 = initial_samples(spec)
    init_rep = evaluate_samples(Z0, metric_seed(spec), spec.metrics_reps)
    res = run_experiment(spec, Z0)
    s = dict(job.settings)
    row = [job.config_index, job.seed] + [s[c] for c in SETTING_COLUMNS]
    nan = float("nan")
    if res.final is None:
        row += ["diverged", res.diverged_at, init_rep.w1_2d_to_gaussian, init_rep.w1_2d_to_gaussian_se]
        row += [nan] * len(MetricReport.columns()) + [nan] * 5
    else:
        fin = evaluate_samples(res.final, metric_seed(spec), spec.metrics_reps)
        totals = [r.total for r in res.records]
        last = res.records[-1]
        row += ["ok", -1, init_rep.w1_2d_to_gaussian, init_rep.w1_2d_to_gaussian_se]
        row += fin.row()
        row += [last.total, float(np.nanmin(totals)), last.kl_to_chi, last.e2mc,
                trajectory_correlation(res.records)]
    if out_dir is not None:
        jdir = os.path.join(out_dir, "jobs", f"c{job.config_index:04d}_s{job.seed}")
        os.makedirs(jdir, exist_ok=True)
        write_table(os.path.join(jdir, "trajectory.csv"), TRAJECTORY_COLUMNS,
                    trajectory_rows(res.records), spec.resolved())
        if save_samples and res.final is not None:
            write_samples(os.path.join(jdir, "final.csv"), res.final, spec.resolved())
    return job.key, row


def _job_entry(args):
    job, out_dir, save_samples = args
    try:
        return _run_job(job, out_dir, save_samples)
    except Exception as exc:  # recorded per row; the sweep keeps going
        s = dict(job.settings)
        row = [job.config_index, job.seed] + [s[c] for c in SETTING_COLUMNS]
        row += [f"error: {type(exc).__name__}: {exc}"]
        row += [float("nan")] * (len(SWEEP_COLUMNS) - len(row))
        return job.key, row


def aggregate(rows, statistic: str = "best"):
    """Per (method, alpha): the config minimizing mean-over-seeds final W1.

    ``statistic="mean"`` averages the per-config means over the grid instead.
    Returns rows ``(method, alpha, value, config)``.
    """
    col = SWEEP_COLUMNS.index("final_w1_2d_to_gaussian")
    by_cfg = {}
    for row in rows:
        if row[SWEEP_COLUMNS.index("status")] != "ok":
            continue
        alpha = row[3]
        if isinstance(alpha, float) and math.isnan(alpha):
            alpha = "nan"
        key = (row[2], alpha, row[0])
        by_cfg.setdefault(key, []).append(row[col])
    groups = {}
    for (method, alpha, cfg), vals in by_cfg.items():
        groups.setdefault((method, alpha), []).append((float(np.mean(vals)), cfg))
    out = []
    for (method, alpha), items in sorted(groups.items(), key=lambda kv: (kv[0][0], _num(kv[0][1]))):
        if statistic == "best":
            value, cfg = min(items)
        else:
            value, cfg = float(np.mean([v for v, _ in items])), -1
        out.append((method, alpha, value, cfg))
    return out


def _num(x):
    return x if isinstance(x, float) and not math.isnan(x) else -1.0


def run_sweep(sweep: SweepSpec, out_dir: Optional[str] = None, jobs: Optional[int] = None,
              save_samples: bool = False, log=sys.stderr, plot: bool = True) -> List[list]:
    """Run every (config, seed) job and return the rows sorted by (config, seed)."""
    job_list = sweep.jobs_list()
    n_cfg, n_seed = sweep.size()
    jobs = sweep.jobs if jobs is None else int(jobs)
    if log is not None:
        print(f"sweep: {n_cfg} configs x {n_seed} seeds = {len(job_list)} jobs "
              f"({jobs} parallel)", file=log, flush=True)
    payload = [(job, out_dir, save_samples) for job in job_list]
    if jobs <= 1 or len(job_list) <= 1:
        results = [_job_entry(p) for p in payload]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_job_entry, payload))
    rows = [row for _, row in sorted(results, key=lambda kr: kr[0])]
    if out_dir is not None:
        write_sweep_outputs(sweep, rows, out_dir, plot)
    return rows


def write_sweep_outputs(sweep: SweepSpec, rows, out_dir: str, plot: bool = True) -> dict:
    header = sweep.resolved()
    paths = {
        "results": os.path.join(out_dir, "results.csv"),
        "summary": os.path.join(out_dir, "summary.csv"),
    }
    write_table(paths["results"], SWEEP_COLUMNS, rows, header)
    best = aggregate(rows, "best")
    mean = aggregate(rows, "mean")
    write_table(paths["summary"], ["aggregation", "method", "alpha", "w1_to_gaussian", "config"],
                [("best",) + r for r in best] + [("mean",) + r for r in mean], header)
    if plot:
        series = {}
        for method, alpha, value, _ in best:
            xs, ys = series.setdefault(method, ([], []))
            xs.append(alpha)
            ys.append(value)
        paths["plot"] = os.path.join(out_dir, "summary.svg")
        write_svg(paths["plot"], line_chart_svg(
            series, "W1 to N(0, I) after optimization (best over grid)",
            "mixture weight alpha", "W1 to N(0, I)"))
    return paths
