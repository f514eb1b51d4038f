"""Replicated simulation studies: parameter sweeps and bootstrap validation.

Each sweep runs a grid of scenarios, re-generating every scenario many times
to measure how precisely a variance-partitioning statistic is recovered. The
validation studies then compare that observed run-to-run error against the
error a site bootstrap estimates from single datasets.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial

import numpy as np

from .errors import DegenerateDataError, ValidationError
from .ordination import (adjusted_r2, cca_explained, center_columns,
                         numerical_rank, rda_r2)
from .resample import bootstrap_statistic
from .rng import derive_seed
from .synth import (ScenarioConfig, SpeciesNiche, generate_complex_dataset,
                    generate_dataset)
from .tables import as_matrix

DEFAULT_NOISE_LEVELS = (0.01, 0.05, 0.1)
DEFAULT_SAMPLE_SIZES = (25, 50, 100, 250, 500, 1000)
DEFAULT_Y_MAX_GRID = tuple(round(0.1 * k, 1) for k in range(1, 11))
DEFAULT_Y_OPT_GRID = tuple(round(0.1 * k, 1) for k in range(0, 11))
CCA_SAMPLE_SIZES = (20, 40, 60, 80, 100)
CCA_NOISE_LEVELS = (0.0, 0.01, 0.05, 0.1)

# Path tags for deriving per-cell master seeds; distinct per sweep family.
_TAG_SAMPLE_SIZE = 11
_TAG_RANGE = 12
_TAG_OPTIMUM = 13
_TAG_VALIDATION_TABLE = 14
_TAG_CCA = 15


def predictor_effect_r2(table, env, mode: str = "semipartial") -> float:
    """Adjusted explained-variance contribution of the second gradient.

    ``semipartial`` (the default) is the joint fit minus the fit on the
    first column alone, so it isolates what the second column adds.
    ``marginal`` fits the second column by itself.
    """
    ym = as_matrix(table)
    em = as_matrix(env)
    if em.shape[1] != 2:
        raise ValidationError("environment block must have exactly 2 columns")
    n = ym.shape[0]

    def _adjusted(block: np.ndarray) -> float:
        m = numerical_rank(center_columns(block))
        return adjusted_r2(rda_r2(ym, block), n, m)

    if mode == "marginal":
        return _adjusted(em[:, 1:2])
    if mode == "semipartial":
        return _adjusted(em) - _adjusted(em[:, 0:1])
    raise ValidationError(f"unknown mode {mode!r}")


def relative_error(sd: float, mean: float) -> float:
    """Spread relative to the magnitude of the mean (infinite at mean 0)."""
    if mean == 0.0:
        return math.nan if sd == 0.0 else math.inf
    return sd / abs(mean)


@dataclass(frozen=True)
class ScenarioOutcome:
    """Replication summary of one scenario.

    ``observed_relative_error`` is the across-replicate standard deviation
    relative to the magnitude of the mean. ``bootstrap_relative_error`` is
    filled by the validation studies and stays None inside plain sweeps.
    """

    config: ScenarioConfig
    observed_mean_r2: float
    observed_sd: float
    observed_relative_error: float
    bootstrap_relative_error: float | None = None
    r2_values: tuple[float, ...] = ()


def run_replicated_scenario(config: ScenarioConfig,
                            mode: str = "semipartial") -> ScenarioOutcome:
    """Generate ``config.replicates`` datasets and summarise the effect size."""
    values = np.empty(config.replicates)
    for r in range(config.replicates):
        table, env = generate_dataset(config, replicate=r)
        values[r] = predictor_effect_r2(table, env, mode)
    mean = float(values.mean())
    sd = float(values.std(ddof=1)) if config.replicates > 1 else 0.0
    return ScenarioOutcome(
        config=config,
        observed_mean_r2=mean,
        observed_sd=sd,
        observed_relative_error=relative_error(sd, mean),
        r2_values=tuple(float(v) for v in values),
    )


def _run_cells(configs, mode: str, threads: int) -> list[ScenarioOutcome]:
    fn = partial(run_replicated_scenario, mode=mode)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, configs))
    return [fn(c) for c in configs]


def sample_size_configs(base: ScenarioConfig,
                        sizes=DEFAULT_SAMPLE_SIZES,
                        noise_levels=DEFAULT_NOISE_LEVELS) -> list[ScenarioConfig]:
    """Grid of configs varying the number of sites at each noise level.

    All cells within one noise level share a derived seed, so they see the
    same site draws (common random numbers) and differ only in the swept
    parameter. Per-cell marginals are unaffected; cross-cell comparisons
    lose most of their Monte Carlo noise.
    """
    return [
        replace(base, n_sites=int(n), sigma_noise=float(noise),
                seed=derive_seed(base.seed, _TAG_SAMPLE_SIZE, j))
        for j, noise in enumerate(noise_levels)
        for n in sizes
    ]


def sampling_range_configs(base: ScenarioConfig,
                           y_max_values=DEFAULT_Y_MAX_GRID,
                           noise_levels=DEFAULT_NOISE_LEVELS) -> list[ScenarioConfig]:
    """Grid of configs shrinking the sampled range of the second gradient.

    Cells within a noise level share a seed (common random numbers), so the
    gradient positions scale smoothly with the range cap instead of being
    redrawn per cell.
    """
    return [
        replace(base, y_max=float(v), sigma_noise=float(noise),
                seed=derive_seed(base.seed, _TAG_RANGE, j))
        for j, noise in enumerate(noise_levels)
        for v in y_max_values
    ]


def optimum_distance_configs(base: ScenarioConfig,
                             y_opt_values=DEFAULT_Y_OPT_GRID,
                             noise_levels=DEFAULT_NOISE_LEVELS) -> list[ScenarioConfig]:
    """Grid of configs moving the second species' optimum along the gradient.

    The first species keeps its optimum at the foot of the gradient; only
    the separation between the two optima changes. Cells within a noise
    level share a seed (common random numbers).
    """
    if len(base.niches) != 2:
        raise ValidationError("optimum-distance sweep needs a 2-species base config")
    first, second = base.niches
    return [
        replace(base,
                niches=(SpeciesNiche(first.x_opt, 0.0),
                        SpeciesNiche(second.x_opt, float(v))),
                sigma_noise=float(noise),
                seed=derive_seed(base.seed, _TAG_OPTIMUM, j))
        for j, noise in enumerate(noise_levels)
        for v in y_opt_values
    ]


def sweep_sample_size(base: ScenarioConfig, sizes=DEFAULT_SAMPLE_SIZES,
                      noise_levels=DEFAULT_NOISE_LEVELS,
                      mode: str = "semipartial",
                      threads: int = 1) -> list[ScenarioOutcome]:
    """Precision of the effect estimate as the number of sites grows."""
    return _run_cells(sample_size_configs(base, sizes, noise_levels), mode, threads)


def sweep_sampling_range(base: ScenarioConfig, y_max_values=DEFAULT_Y_MAX_GRID,
                         noise_levels=DEFAULT_NOISE_LEVELS,
                         mode: str = "semipartial",
                         threads: int = 1) -> list[ScenarioOutcome]:
    """Effect size and precision as the sampled gradient range narrows."""
    return _run_cells(sampling_range_configs(base, y_max_values, noise_levels),
                      mode, threads)


def sweep_optimum_distance(base: ScenarioConfig, y_opt_values=DEFAULT_Y_OPT_GRID,
                           noise_levels=DEFAULT_NOISE_LEVELS,
                           mode: str = "semipartial",
                           threads: int = 1) -> list[ScenarioOutcome]:
    """Effect size and precision as the niche optima separate."""
    return _run_cells(optimum_distance_configs(base, y_opt_values, noise_levels),
                      mode, threads)


def _effect_statistic(table, blocks, mode: str) -> float:
    return predictor_effect_r2(table, blocks[0], mode)


def _validated_outcome(config: ScenarioConfig,
                       observed: ScenarioOutcome | None, *,
                       n_validation: int, mode: str) -> ScenarioOutcome:
    outcome = observed if observed is not None else run_replicated_scenario(
        config, mode)
    statistic = partial(_effect_statistic, mode=mode)
    spreads = []
    for v in range(n_validation):
        table, env = generate_dataset(config, replicate=config.replicates + v)
        summary = bootstrap_statistic(
            table, [env], statistic, config.replicates,
            derive_seed(config.seed, _TAG_VALIDATION_TABLE, v),
            names=("effect_r2",))[0]
        spreads.append(summary.sd)
    # Both error measures are scaled by the same across-replicate mean, so
    # the comparison isolates how well the bootstrap spread tracks the true
    # run-to-run spread. Dividing each table's spread by its own bootstrap
    # mean instead would blow up whenever that mean sits near zero.
    estimate = relative_error(float(np.mean(spreads)), outcome.observed_mean_r2)
    return replace(outcome, bootstrap_relative_error=estimate)


def bootstrap_validation(scenarios, n_validation: int = 10,
                         mode: str = "semipartial", threads: int = 1,
                         observed_outcomes=None) -> list[ScenarioOutcome]:
    """Observed versus bootstrap-estimated relative error per scenario.

    For each scenario the observed error comes from full re-generation
    (reused from ``observed_outcomes`` when provided); the bootstrap error
    is the mean bootstrap standard deviation over ``n_validation`` fresh
    datasets, divided by the scenario's mean effect size so that both error
    measures share one denominator.
    """
    scenarios = list(scenarios)
    if observed_outcomes is None:
        observed = [None] * len(scenarios)
    else:
        observed = list(observed_outcomes)
        if len(observed) != len(scenarios):
            raise ValidationError("one observed outcome per scenario required")
        for cfg, out in zip(scenarios, observed):
            if out.config != cfg:
                raise ValidationError(
                    "observed outcomes do not match the scenario list")
    fn = partial(_validated_outcome, n_validation=n_validation, mode=mode)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, scenarios, observed))
    return [fn(cfg, out) for cfg, out in zip(scenarios, observed)]


def cca_proportion(table, env) -> float:
    """Explained-inertia share of the log-transformed table.

    All-zero species columns and all-zero sites are removed first; bootstrap
    resamples produce them routinely. Fewer than 3 usable sites or 2 usable
    species is reported as degenerate.
    """
    ym = as_matrix(table)
    em = as_matrix(env)
    if ym.shape[0] != em.shape[0]:
        raise ValidationError("table and environment must share rows")
    keep_rows = ym.sum(axis=1) > 0
    keep_cols = ym.sum(axis=0) > 0
    if int(keep_rows.sum()) < 3 or int(keep_cols.sum()) < 2:
        raise DegenerateDataError(
            f"only {int(keep_rows.sum())} non-empty sites and "
            f"{int(keep_cols.sum())} non-empty species remain")
    pruned = ym[np.ix_(keep_rows, keep_cols)]
    _, _, proportion = cca_explained(np.log1p(pruned), em[keep_rows])
    return proportion


def _cca_statistic(table, blocks) -> float:
    return cca_proportion(table, blocks[0])


@dataclass(frozen=True)
class CcaScenarioOutcome:
    """One repeat of one cell of the many-species validation grid."""

    n_sites: int
    sigma_noise: float
    repeat: int
    seed: int
    mean_proportion: float
    observed_sd: float
    observed_relative_error: float
    bootstrap_relative_error: float


def _cca_repeat(item, m_replicates: int, n_validation: int,
                n_species: int) -> CcaScenarioOutcome:
    n_sites, sigma_noise, repeat, cell_seed = item
    values = np.empty(m_replicates)
    for r in range(m_replicates):
        table, env = generate_complex_dataset(
            n_sites, n_species=n_species, sigma_noise=sigma_noise,
            seed=cell_seed, replicate=r)
        values[r] = cca_proportion(table, env)
    mean = float(values.mean())
    sd = float(values.std(ddof=1))
    spreads = []
    for v in range(n_validation):
        table, env = generate_complex_dataset(
            n_sites, n_species=n_species, sigma_noise=sigma_noise,
            seed=cell_seed, replicate=m_replicates + v)
        summary = bootstrap_statistic(
            table, [env], _cca_statistic, m_replicates,
            derive_seed(cell_seed, _TAG_VALIDATION_TABLE, v),
            names=("cca_proportion",))[0]
        spreads.append(summary.sd)
    return CcaScenarioOutcome(
        n_sites=int(n_sites),
        sigma_noise=float(sigma_noise),
        repeat=int(repeat),
        seed=int(cell_seed),
        mean_proportion=mean,
        observed_sd=sd,
        observed_relative_error=relative_error(sd, mean),
        bootstrap_relative_error=relative_error(float(np.mean(spreads)), mean),
    )


def cca_validation(sizes=CCA_SAMPLE_SIZES, noise_levels=CCA_NOISE_LEVELS,
                   repeats: int = 5, m_replicates: int = 200,
                   n_validation: int = 10, n_species: int = 5, seed: int = 0,
                   threads: int = 1):
    """Bootstrap-error validation on randomly assembled many-species communities.

    Every (size, noise) cell is repeated ``repeats`` times with fresh niche
    optima. Returns ``(outcomes, report)`` where the report carries the
    pooled correlation between observed and bootstrap-estimated relative
    errors across all repeats.
    """
    items = [
        (n, noise, rep, derive_seed(seed, _TAG_CCA, i, j, rep))
        for i, n in enumerate(sizes)
        for j, noise in enumerate(noise_levels)
        for rep in range(repeats)
    ]
    fn = partial(_cca_repeat, m_replicates=m_replicates,
                 n_validation=n_validation, n_species=n_species)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(fn, items))
    else:
        outcomes = [fn(item) for item in items]
    observed = [o.observed_relative_error for o in outcomes]
    estimated = [o.bootstrap_relative_error for o in outcomes]
    r, t, df = pearson_r(observed, estimated)
    report = {"pearson_r": r, "t": t, "df": df, "n_pairs": len(outcomes)}
    return outcomes, report


def pearson_r(xs, ys) -> tuple[float, float, int]:
    """Product-moment correlation with its t statistic and degrees of freedom.

    ``t = r * sqrt(df / (1 - r^2))`` with ``df = n - 2``; a perfect
    correlation reports an infinite t.
    """
    x = np.asarray(xs, dtype=float).reshape(-1)
    y = np.asarray(ys, dtype=float).reshape(-1)
    if x.shape != y.shape:
        raise ValidationError("inputs must have equal length")
    if x.size < 3:
        raise ValidationError("need at least 3 pairs")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("inputs contain non-finite values")
    xd = x - x.mean()
    yd = y - y.mean()
    sxx = float(xd @ xd)
    syy = float(yd @ yd)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateDataError("an input has zero variance")
    # One sqrt of the product keeps exactly proportional inputs at r = +/-1.
    r = float(xd @ yd) / math.sqrt(sxx * syy)
    r = min(max(r, -1.0), 1.0)
    df = x.size - 2
    if abs(r) == 1.0:
        t = math.copysign(math.inf, r)
    else:
        t = r * math.sqrt(df / (1.0 - r * r))
    return r, t, df


def _ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0  # ties share the mean rank
        i = j + 1
    return ranks


def spearman_rho(xs, ys) -> float:
    """Rank correlation; ties get average ranks."""
    x = np.asarray(xs, dtype=float).reshape(-1)
    y = np.asarray(ys, dtype=float).reshape(-1)
    if x.shape != y.shape:
        raise ValidationError("inputs must have equal length")
    return pearson_r(_ranks(x), _ranks(y))[0]
