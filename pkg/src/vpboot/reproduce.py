"""Builders for the canned simulation-study artifacts.

Each figure id maps to one study: a results CSV, a chart, and a JSON
document of trend/correlation checks. Figure builders are deterministic
functions of ``(seed, scale)``; thread count only affects speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .experiments import (CCA_NOISE_LEVELS, CCA_SAMPLE_SIZES,
                          DEFAULT_NOISE_LEVELS, DEFAULT_SAMPLE_SIZES,
                          DEFAULT_Y_MAX_GRID, DEFAULT_Y_OPT_GRID,
                          bootstrap_validation, cca_validation,
                          optimum_distance_configs, pearson_r,
                          sample_size_configs, sampling_range_configs,
                          spearman_rho, sweep_optimum_distance,
                          sweep_sample_size, sweep_sampling_range)
from .errors import ValidationError
from .svgplot import line_chart, scatter_chart
from .synth import ScenarioConfig

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5", "fig6")

#: Replicates per scenario at each scale.
SCALE_REPLICATES = {"desk": 200, "paper": 1000}

SWEEP_COLUMNS = (
    "figure", "sigma_noise", "n_sites", "y_max", "y_opt2", "replicates",
    "cell_seed", "observed_mean_r2", "observed_sd",
    "observed_relative_error", "bootstrap_relative_error",
)
CCA_COLUMNS = (
    "figure", "sigma_noise", "n_sites", "n_species", "repeat", "replicates",
    "cell_seed", "mean_proportion", "observed_sd",
    "observed_relative_error", "bootstrap_relative_error",
)

#: Observed-error band used for the bootstrap-validation correlation check.
VALIDATION_BAND = (0.03, 1.0)
#: Span the many-species study's observed errors must at least cover.
CCA_SPAN = (0.01, 0.25)


@dataclass(frozen=True)
class FigureResult:
    """Everything one reproduction run produces, before any file is written."""

    figure: str
    columns: tuple[str, ...]
    rows: list[dict]
    checks: list[dict]
    svg: str

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)


def _sweep_rows(figure: str, outcomes) -> list[dict]:
    rows = []
    for o in outcomes:
        cfg = o.config
        rows.append({
            "figure": figure,
            "sigma_noise": cfg.sigma_noise,
            "n_sites": cfg.n_sites,
            "y_max": cfg.y_max,
            "y_opt2": cfg.niches[1].y_opt,
            "replicates": cfg.replicates,
            "cell_seed": cfg.seed,
            "observed_mean_r2": o.observed_mean_r2,
            "observed_sd": o.observed_sd,
            "observed_relative_error": o.observed_relative_error,
            "bootstrap_relative_error": o.bootstrap_relative_error,
        })
    return rows


def _series_by_noise(outcomes, x_of, noise_levels):
    series = []
    for noise in noise_levels:
        cells = [o for o in outcomes if o.config.sigma_noise == noise]
        xs = [x_of(o.config) for o in cells]
        ys = [o.observed_mean_r2 for o in cells]
        errs = [o.observed_sd / math.sqrt(o.config.replicates) for o in cells]
        series.append((f"noise={noise:g}", xs, ys, errs))
    return series


def _trend_check(name: str, outcomes, x_of, noise: float) -> dict:
    cells = [o for o in outcomes if o.config.sigma_noise == noise]
    xs = [x_of(o.config) for o in cells]
    rels = [o.observed_relative_error for o in cells]
    rho = spearman_rho(xs, rels)
    return {
        "name": name,
        "sigma_noise": noise,
        "spearman_rho": rho,
        "threshold": -0.9,
        "passed": rho <= -0.9,
    }


def build_fig2(base: ScenarioConfig, threads: int = 1) -> FigureResult:
    """Estimate precision versus number of sites, per noise level."""
    outcomes = sweep_sample_size(base, threads=threads)
    checks = [_trend_check("relative_error_decreases_with_sample_size",
                           outcomes, lambda c: c.n_sites,
                           DEFAULT_NOISE_LEVELS[0])]
    svg = line_chart(
        _series_by_noise(outcomes, lambda c: c.n_sites, DEFAULT_NOISE_LEVELS),
        title="Gradient contribution vs number of sites",
        x_label="number of sites", y_label="mean adjusted R2 (+/- SE)",
        x_log=True, y_log=True)
    return FigureResult("fig2", SWEEP_COLUMNS, _sweep_rows("fig2", outcomes),
                        checks, svg)


def build_fig3(base: ScenarioConfig, threads: int = 1) -> FigureResult:
    """Effect size and precision versus sampled range of the second gradient."""
    outcomes = sweep_sampling_range(base, threads=threads)
    noise = DEFAULT_NOISE_LEVELS[0]
    checks = [_trend_check("relative_error_grows_as_range_shrinks",
                           outcomes, lambda c: c.y_max, noise)]
    low = [o for o in outcomes
           if o.config.sigma_noise == noise and o.config.y_max == DEFAULT_Y_MAX_GRID[0]]
    high = [o for o in outcomes
            if o.config.sigma_noise == noise and o.config.y_max == DEFAULT_Y_MAX_GRID[-1]]
    mean_low = low[0].observed_mean_r2
    mean_high = high[0].observed_mean_r2
    checks.append({
        "name": "mean_effect_shrinks_with_range",
        "sigma_noise": noise,
        "mean_r2_at_narrowest": mean_low,
        "mean_r2_at_full_range": mean_high,
        "passed": mean_low < mean_high,
    })
    svg = line_chart(
        _series_by_noise(outcomes, lambda c: c.y_max, DEFAULT_NOISE_LEVELS),
        title="Gradient contribution vs sampled range",
        x_label="sampled range of second gradient (y_max)",
        y_label="mean adjusted R2 (+/- SE)", x_log=False, y_log=True)
    return FigureResult("fig3", SWEEP_COLUMNS, _sweep_rows("fig3", outcomes),
                        checks, svg)


def build_fig4(base: ScenarioConfig, threads: int = 1) -> FigureResult:
    """Effect size and precision versus separation of the niche optima."""
    outcomes = sweep_optimum_distance(base, threads=threads)
    checks = [_trend_check("relative_error_decreases_with_separation",
                           outcomes, lambda c: c.niches[1].y_opt,
                           DEFAULT_NOISE_LEVELS[0])]
    svg = line_chart(
        _series_by_noise(outcomes, lambda c: c.niches[1].y_opt,
                         DEFAULT_NOISE_LEVELS),
        title="Gradient contribution vs niche separation",
        x_label="optimum of second species on second gradient",
        y_label="mean adjusted R2 (+/- SE)", x_log=False, y_log=True)
    return FigureResult("fig4", SWEEP_COLUMNS, _sweep_rows("fig4", outcomes),
                        checks, svg)


def validation_pool(base: ScenarioConfig) -> list[ScenarioConfig]:
    """Union of all sweep cells: the scenario pool for bootstrap validation."""
    return (sample_size_configs(base)
            + sampling_range_configs(base)
            + optimum_distance_configs(base))


def build_fig5(base: ScenarioConfig, threads: int = 1) -> FigureResult:
    """Observed versus bootstrap-estimated relative error over all sweep cells."""
    outcomes = bootstrap_validation(validation_pool(base), threads=threads)
    observed = [o.observed_relative_error for o in outcomes]
    estimated = [o.bootstrap_relative_error for o in outcomes]
    lo, hi = VALIDATION_BAND
    band = [(x, y) for x, y in zip(observed, estimated) if lo <= x <= hi]
    checks = []
    if len(band) >= 3:
        r, t, df = pearson_r([p[0] for p in band], [p[1] for p in band])
        band_check = {"pearson_r": r, "t": t, "df": df,
                      "passed": r >= 0.85}
    else:
        band_check = {"pearson_r": None, "t": None, "df": None, "passed": False}
    band_check.update({
        "name": "band_correlation", "band_low": lo, "band_high": hi,
        "n_pairs": len(band), "threshold": 0.85,
    })
    checks.append(band_check)
    above = [(x, y) for x, y in zip(observed, estimated) if x > hi]
    mean_diff = (sum(y - x for x, y in above) / len(above)) if above else None
    checks.append({
        "name": "overestimates_above_band",
        "n_pairs": len(above),
        "mean_signed_difference": mean_diff,
        "passed": bool(above) and mean_diff > 0,
    })
    svg = scatter_chart(
        observed, estimated,
        title="Bootstrap-estimated vs observed relative error",
        x_label="observed relative error",
        y_label="bootstrap-estimated relative error", log=True)
    return FigureResult("fig5", SWEEP_COLUMNS, _sweep_rows("fig5", outcomes),
                        checks, svg)


def build_fig6(base: ScenarioConfig, threads: int = 1) -> FigureResult:
    """Bootstrap validation on randomly assembled five-species communities."""
    outcomes, report = cca_validation(
        m_replicates=base.replicates, seed=base.seed, threads=threads)
    observed = [o.observed_relative_error for o in outcomes]
    lo, hi = CCA_SPAN
    checks = [
        {
            "name": "pooled_correlation",
            "n_pairs": report["n_pairs"],
            "pearson_r": report["pearson_r"],
            "t": report["t"],
            "df": report["df"],
            "threshold": 0.9,
            "passed": report["pearson_r"] >= 0.9,
        },
        {
            "name": "observed_error_span",
            "min_observed": min(observed),
            "max_observed": max(observed),
            "span_low": lo,
            "span_high": hi,
            "passed": min(observed) <= lo and max(observed) >= hi,
        },
    ]
    rows = [{
        "figure": "fig6",
        "sigma_noise": o.sigma_noise,
        "n_sites": o.n_sites,
        "n_species": 5,
        "repeat": o.repeat,
        "replicates": base.replicates,
        "cell_seed": o.seed,
        "mean_proportion": o.mean_proportion,
        "observed_sd": o.observed_sd,
        "observed_relative_error": o.observed_relative_error,
        "bootstrap_relative_error": o.bootstrap_relative_error,
    } for o in outcomes]
    svg = scatter_chart(
        observed, [o.bootstrap_relative_error for o in outcomes],
        title="Bootstrap-estimated vs observed relative error (many species)",
        x_label="observed relative error",
        y_label="bootstrap-estimated relative error", log=True)
    return FigureResult("fig6", CCA_COLUMNS, rows, checks, svg)


_BUILDERS = {
    "fig2": build_fig2,
    "fig3": build_fig3,
    "fig4": build_fig4,
    "fig5": build_fig5,
    "fig6": build_fig6,
}


def build_figure(figure: str, seed: int, scale: str = "desk",
                 threads: int = 1) -> FigureResult:
    """Run one study end to end and return its artifacts."""
    if figure not in _BUILDERS:
        raise ValidationError(
            f"unknown figure id {figure!r}; expected one of {FIGURE_IDS}")
    if scale not in SCALE_REPLICATES:
        raise ValidationError(f"unknown scale {scale!r}; expected desk or paper")
    base = ScenarioConfig(seed=seed, replicates=SCALE_REPLICATES[scale])
    return _BUILDERS[figure](base, threads=threads)
