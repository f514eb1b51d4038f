"""Two-block partition reports with bootstrapped uncertainty."""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import partial

import numpy as np

from .errors import DegenerateDataError, ValidationError
from .ordination import (PartitionResult, cca_explained, partition_from_r2,
                         varpart_two)
from .resample import BootstrapSummary, bootstrap_statistic
from .tables import CommunityTable, PredictorBlock, require_aligned

#: Fixed fraction names used in reports and serialized output.
FRACTION_NAMES = ("env_pure", "spatial_including_shared", "residual")


@dataclass(frozen=True)
class AnalysisReport:
    """Variance-partition point estimates plus bootstrap uncertainty.

    ``fractions`` is the three-way rollup (pure first block, second block
    including the shared part, residual); it sums to 1. ``uncertainty``
    maps each fraction name to its bootstrap summary. ``runtime_seconds``
    is wall-clock time and is the one field expected to differ between
    otherwise identical runs.
    """

    dataset_name: str
    method: str
    log1p: bool
    seed: int
    bootstrap_replicates: int
    partition: PartitionResult
    fractions: dict[str, float]
    uncertainty: dict[str, BootstrapSummary]
    runtime_seconds: float


def _cca_partition(y: np.ndarray, x: np.ndarray, w: np.ndarray,
                   log1p: bool) -> PartitionResult:
    keep_rows = y.sum(axis=1) > 0
    keep_cols = y.sum(axis=0) > 0
    if int(keep_rows.sum()) < 3:
        raise DegenerateDataError(
            f"only {int(keep_rows.sum())} non-empty sites remain")
    if int(keep_cols.sum()) < 1:
        raise DegenerateDataError("every species column is empty")
    ym = y[np.ix_(keep_rows, keep_cols)]
    if log1p:
        ym = np.log1p(ym)
    xm = x[keep_rows]
    wm = w[keep_rows]
    r2_x = cca_explained(ym, xm)[2]
    r2_w = cca_explained(ym, wm)[2]
    r2_xw = cca_explained(ym, np.hstack([xm, wm]))[2]
    return partition_from_r2(r2_x, r2_w, r2_xw)


def trend_surface(block: PredictorBlock) -> PredictorBlock:
    """Expand a 2-column coordinate block to (x, y, x^2, xy, y^2).

    Raw site coordinates make a poor linear predictor set; the second-order
    polynomial surface lets broad spatial gradients and simple curvature be
    captured. Only defined for exactly two columns.
    """
    if block.n_columns != 2:
        raise ValidationError(
            f"trend surface needs exactly 2 coordinate columns, "
            f"block {block.name!r} has {block.n_columns}")
    x = block.values[:, 0]
    y = block.values[:, 1]
    expanded = np.column_stack([x, y, x * x, x * y, y * y])
    return PredictorBlock(block.name, block.site_ids, expanded)


def partition_tables(table, env, spatial, method: str = "cca",
                     log1p: bool | None = None) -> PartitionResult:
    """Partition a community table between two predictor blocks.

    ``method`` is ``cca`` (chi-square inertia) or ``rda`` (linear, with the
    small-sample adjustment). ``log1p`` defaults to on for ``cca`` and off
    for ``rda``.
    """
    if method not in ("cca", "rda"):
        raise ValidationError(f"unknown method {method!r}")
    if log1p is None:
        log1p = method == "cca"
    y = table.values if isinstance(table, CommunityTable) else np.asarray(
        table, dtype=float)
    x = env.values if isinstance(env, PredictorBlock) else np.asarray(
        env, dtype=float)
    w = spatial.values if isinstance(spatial, PredictorBlock) else np.asarray(
        spatial, dtype=float)
    if method == "cca":
        return _cca_partition(y, x, w, log1p)
    ym = np.log1p(y) if log1p else y
    return varpart_two(ym, env, spatial)


def _rollup_statistic(table, blocks, method: str, log1p: bool):
    part = partition_tables(table, blocks[0], blocks[1], method, log1p)
    return part.rollup()


def run_analysis(table: CommunityTable, env: PredictorBlock,
                 spatial: PredictorBlock, *, seed: int, method: str = "cca",
                 m_replicates: int = 1000,
                 log1p: bool | None = None,
                 dataset_name: str = "community") -> AnalysisReport:
    """Full analysis: point partition plus bootstrap uncertainty per fraction."""
    start = time.perf_counter()
    require_aligned(table, env, spatial)
    if log1p is None:
        log1p = method == "cca"
    part = partition_tables(table, env, spatial, method, log1p)
    rollup = part.rollup()
    if abs(sum(rollup) - 1.0) > 1e-9:
        raise DegenerateDataError("partition rollup does not sum to 1")
    statistic = partial(_rollup_statistic, method=method, log1p=log1p)
    summaries = bootstrap_statistic(
        table, [env, spatial], statistic, m_replicates, seed,
        names=FRACTION_NAMES)
    return AnalysisReport(
        dataset_name=dataset_name,
        method=method,
        log1p=log1p,
        seed=seed,
        bootstrap_replicates=m_replicates,
        partition=part,
        fractions=dict(zip(FRACTION_NAMES, rollup)),
        uncertainty=dict(zip(FRACTION_NAMES, summaries)),
        runtime_seconds=time.perf_counter() - start,
    )


def report_to_dict(report: AnalysisReport) -> dict:
    """JSON-ready dict with a stable key order."""
    part = report.partition
    return {
        "dataset_name": report.dataset_name,
        "method": report.method,
        "log1p": report.log1p,
        "seed": report.seed,
        "bootstrap_replicates": report.bootstrap_replicates,
        "partition": {
            "frac_pure_x": part.frac_pure_x,
            "frac_shared": part.frac_shared,
            "frac_pure_w": part.frac_pure_w,
            "frac_residual": part.frac_residual,
            "r2_x": part.r2_x,
            "r2_w": part.r2_w,
            "r2_xw": part.r2_xw,
        },
        "fractions": {k: report.fractions[k] for k in FRACTION_NAMES},
        "uncertainty": {
            k: {
                "mean": s.mean,
                "sd": s.sd,
                "relative_uncertainty": s.relative_uncertainty,
                "ci95_low": s.ci95_low,
                "ci95_high": s.ci95_high,
                "replicate_count": s.replicate_count,
                "redraw_count": s.redraw_count,
            }
            for k, s in ((k, report.uncertainty[k]) for k in FRACTION_NAMES)
        },
        "runtime_seconds": report.runtime_seconds,
    }


def format_report(report: AnalysisReport) -> str:
    """Human-readable text rendering (the one place percentages appear)."""
    lines = [
        f"dataset: {report.dataset_name}",
        f"method: {report.method} (log1p {'on' if report.log1p else 'off'}), "
        f"bootstrap M={report.bootstrap_replicates}, seed={report.seed}",
        "",
        f"{'fraction':<28}{'estimate':>10}{'boot mean':>11}{'sd':>8}"
        f"{'rel.unc':>9}  {'95% CI':>18}",
    ]
    labels = {
        "env_pure": "environment (pure)",
        "spatial_including_shared": "spatial (incl. shared)",
        "residual": "residual",
    }
    for key in FRACTION_NAMES:
        s = report.uncertainty[key]
        ci = f"[{100 * s.ci95_low:.1f}%, {100 * s.ci95_high:.1f}%]"
        lines.append(
            f"{labels[key]:<28}{100 * report.fractions[key]:>9.1f}%"
            f"{100 * s.mean:>10.1f}%{100 * s.sd:>7.1f}%"
            f"{100 * s.relative_uncertainty:>8.1f}%  {ci:>18}")
    lines.append("")
    lines.append(f"runtime: {report.runtime_seconds:.2f} s")
    return "\n".join(lines)
