"""Replicated scenario studies, sweeps, and the validation machinery."""

import math
from dataclasses import replace

import numpy as np
import pytest

from vpboot.errors import DegenerateDataError, ValidationError
from vpboot.experiments import (bootstrap_validation, cca_proportion,
                                cca_validation, optimum_distance_configs,
                                pearson_r, predictor_effect_r2,
                                relative_error, run_replicated_scenario,
                                sample_size_configs, spearman_rho,
                                sweep_optimum_distance, sweep_sample_size,
                                sweep_sampling_range)
from vpboot.ordination import (adjusted_r2, center_columns, numerical_rank,
                               rda_r2)
from vpboot.synth import ScenarioConfig, SpeciesNiche, generate_dataset
from vpboot.tables import CommunityTable


def test_pearson_r_reference_values():
    r, t, df = pearson_r([1.0, 2.0, 3.0], [2.0, 4.0, 6.0])
    assert r == 1.0 and math.isinf(t) and t > 0 and df == 1

    r, t, _ = pearson_r([1.0, 2.0, 3.0], [3.0, 2.0, 1.0])
    assert r == -1.0 and math.isinf(t) and t < 0

    r, t, _ = pearson_r([1.0, 2.0, 4.0], [1.0, 2.0, 4.0])
    assert r == 1.0 and math.isinf(t) and t > 0

    r, t, df = pearson_r([1, 2, 3, 4], [1, 3, 2, 4])
    assert r == pytest.approx(0.8, abs=1e-12)
    assert df == 2
    assert t == pytest.approx(0.8 * math.sqrt(2 / (1 - 0.64)), abs=1e-12)


def test_pearson_r_input_validation():
    with pytest.raises(ValidationError):
        pearson_r([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValidationError):
        pearson_r([1.0, 2.0, 3.0], [1.0, 2.0])
    with pytest.raises(ValidationError):
        pearson_r([1.0, 2.0, float("nan")], [1.0, 2.0, 3.0])
    with pytest.raises(DegenerateDataError):
        pearson_r([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])


def test_spearman_rho_ranks_with_ties():
    assert spearman_rho([1, 2, 3, 4], [10, 100, 1000, 10000]) == 1.0
    assert spearman_rho([1, 2, 3, 4], [4, 3, 2, 1]) == -1.0
    assert spearman_rho([1, 2, 2, 3], [10, 20, 20, 30]) == 1.0
    xs = [1.0, 2.0, 3.0, 4.0, 5.0]
    assert spearman_rho(xs, np.exp(xs)) == 1.0


def test_relative_error_conventions():
    assert relative_error(0.2, 0.4) == pytest.approx(0.5)
    assert relative_error(0.2, -0.4) == pytest.approx(0.5)
    assert relative_error(0.3, 0.0) == math.inf
    assert math.isnan(relative_error(0.0, 0.0))


def test_predictor_effect_matches_manual_decomposition():
    config = ScenarioConfig(seed=6, n_sites=60)
    table, env = generate_dataset(config)
    ym, em = table.values, env.values
    n = ym.shape[0]

    def adjusted(block):
        return adjusted_r2(rda_r2(ym, block), n,
                           numerical_rank(center_columns(block)))

    semipartial = predictor_effect_r2(table, env)
    assert semipartial == pytest.approx(
        adjusted(em) - adjusted(em[:, 0:1]), abs=1e-12)

    marginal = predictor_effect_r2(table, env, mode="marginal")
    assert marginal == pytest.approx(adjusted(em[:, 1:2]), abs=1e-12)

    with pytest.raises(ValidationError):
        predictor_effect_r2(table, np.ones((n, 3)))
    with pytest.raises(ValidationError):
        predictor_effect_r2(table, env, mode="other")


def test_replicated_scenario_is_deterministic_and_self_consistent():
    config = ScenarioConfig(seed=10, n_sites=30, replicates=25)
    first = run_replicated_scenario(config)
    second = run_replicated_scenario(config)
    assert first == second
    values = np.array(first.r2_values)
    assert values.size == 25
    assert first.observed_mean_r2 == pytest.approx(values.mean(), abs=1e-15)
    assert first.observed_sd == pytest.approx(values.std(ddof=1), abs=1e-15)
    assert first.observed_relative_error == pytest.approx(
        relative_error(first.observed_sd, first.observed_mean_r2), abs=1e-15)
    assert first.bootstrap_relative_error is None


def test_null_configuration_has_vanishing_effect():
    config = ScenarioConfig(
        seed=11, n_sites=100, sigma_noise=0.0, y_max=0.05, replicates=20,
        niches=(SpeciesNiche(0.25, 0.0), SpeciesNiche(0.75, 0.0)))
    outcome = run_replicated_scenario(config)
    assert abs(outcome.observed_mean_r2) < 0.02


def test_more_sites_mean_less_relative_error():
    small = ScenarioConfig(seed=12, n_sites=25, replicates=1000)
    large = ScenarioConfig(seed=12, n_sites=100, replicates=1000)
    assert (run_replicated_scenario(large).observed_relative_error
            < run_replicated_scenario(small).observed_relative_error)


def test_noise_floor_persists_at_large_samples():
    base = ScenarioConfig(seed=23, replicates=100)
    quiet, loud = sweep_sample_size(base, sizes=(1000,),
                                    noise_levels=(0.01, 0.1))
    assert loud.observed_relative_error > quiet.observed_relative_error


def test_null_second_optimum_keeps_range_sweep_flat():
    base = ScenarioConfig(
        seed=24, replicates=20, n_sites=50,
        niches=(SpeciesNiche(0.25, 0.0), SpeciesNiche(0.75, 0.0)))
    outcomes = sweep_sampling_range(base, y_max_values=(0.1, 0.5, 1.0),
                                    noise_levels=(0.01,))
    assert all(abs(o.observed_mean_r2) < 0.02 for o in outcomes)


def test_mean_effect_rises_with_separation():
    base = ScenarioConfig(seed=25, replicates=60)
    outcomes = sweep_optimum_distance(base, noise_levels=(0.01,))
    rho = spearman_rho([o.config.niches[1].y_opt for o in outcomes],
                       [o.observed_mean_r2 for o in outcomes])
    assert rho >= 0.9


def test_single_cell_sweep_equals_direct_run():
    base = ScenarioConfig(seed=13, n_sites=10, replicates=15)
    outcomes = sweep_sample_size(base, sizes=(40,), noise_levels=(0.01,))
    assert len(outcomes) == 1
    assert outcomes[0] == run_replicated_scenario(outcomes[0].config)
    assert outcomes[0].config.n_sites == 40


def test_sweep_cells_share_seeds_within_a_noise_level():
    base = ScenarioConfig(seed=14)
    configs = sample_size_configs(base, sizes=(25, 50), noise_levels=(0.01, 0.1))
    assert configs[0].seed == configs[1].seed
    assert configs[2].seed == configs[3].seed
    assert configs[0].seed != configs[2].seed
    assert configs[0].seed != base.seed


def test_optimum_sweep_pins_the_first_species_and_needs_two():
    base = ScenarioConfig(seed=15)
    configs = optimum_distance_configs(base, y_opt_values=(0.0, 0.4),
                                       noise_levels=(0.01,))
    assert [c.niches[1].y_opt for c in configs] == [0.0, 0.4]
    assert all(c.niches[0].y_opt == 0.0 for c in configs)
    assert all(c.niches[0].x_opt == base.niches[0].x_opt for c in configs)

    three_species = replace(
        base, niches=(SpeciesNiche(0.2, 0.0), SpeciesNiche(0.5, 0.5),
                      SpeciesNiche(0.8, 1.0)))
    with pytest.raises(ValidationError):
        optimum_distance_configs(three_species)


def test_parallel_sweep_matches_serial():
    base = ScenarioConfig(seed=16, replicates=10)
    serial = sweep_sample_size(base, sizes=(10, 15), noise_levels=(0.05,))
    parallel = sweep_sample_size(base, sizes=(10, 15), noise_levels=(0.05,),
                                 threads=2)
    assert serial == parallel


def test_easy_scenario_bootstrap_tracks_observed_error():
    config = ScenarioConfig(seed=17, replicates=200)
    outcome, = bootstrap_validation([config])
    assert outcome.observed_relative_error < 0.2
    assert outcome.bootstrap_relative_error < 0.2
    ratio = outcome.bootstrap_relative_error / outcome.observed_relative_error
    assert 0.7 < ratio < 1.4


def test_easiest_cell_has_small_well_matched_errors():
    config = ScenarioConfig(seed=17, n_sites=1000, replicates=200)
    outcome, = bootstrap_validation([config])
    assert outcome.observed_relative_error < 0.05
    assert outcome.bootstrap_relative_error < 0.05
    ratio = outcome.bootstrap_relative_error / outcome.observed_relative_error
    assert 0.5 < ratio < 2.0


def test_bootstrap_validation_reuses_observed_outcomes():
    config = ScenarioConfig(seed=18, n_sites=30, replicates=40)
    fresh, = bootstrap_validation([config], n_validation=3)
    observed = run_replicated_scenario(config)
    reused, = bootstrap_validation([config], n_validation=3,
                                   observed_outcomes=[observed])
    assert fresh == reused

    with pytest.raises(ValidationError):
        bootstrap_validation([config], observed_outcomes=[])
    other = run_replicated_scenario(replace(config, seed=19))
    with pytest.raises(ValidationError):
        bootstrap_validation([config], observed_outcomes=[other])


def test_cca_proportion_prunes_empty_lines():
    values = np.array([
        [5.0, 1.0, 0.0],
        [0.0, 0.0, 0.0],
        [2.0, 4.0, 0.0],
        [1.0, 3.0, 0.0],
    ])
    ids = ("a", "b", "c", "d")
    table = CommunityTable(ids, ("s1", "s2", "s3"), values)
    env = np.arange(8, dtype=float).reshape(4, 2)
    pruned = cca_proportion(table, env)
    direct = cca_proportion(
        CommunityTable(("a", "c", "d"), ("s1", "s2"),
                       values[[0, 2, 3]][:, :2]),
        env[[0, 2, 3]])
    assert pruned == pytest.approx(direct, abs=1e-12)

    with pytest.raises(ValidationError):
        cca_proportion(table, env[:3])
    sparse = CommunityTable(ids, ("s1", "s2"),
                            [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 2.0]])
    with pytest.raises(DegenerateDataError):
        cca_proportion(sparse, env)


def test_cca_validation_small_grid():
    outcomes, report = cca_validation(
        sizes=(20,), noise_levels=(0.0, 0.05), repeats=3, m_replicates=20,
        n_validation=2, seed=20)
    assert len(outcomes) == 6
    assert report["n_pairs"] == 6
    assert report["df"] == 4
    assert -1.0 <= report["pearson_r"] <= 1.0
    for o in outcomes:
        assert 0.0 <= o.mean_proportion <= 1.0
        assert o.observed_sd >= 0.0

    again, _ = cca_validation(
        sizes=(20,), noise_levels=(0.0, 0.05), repeats=3, m_replicates=20,
        n_validation=2, seed=20)
    assert outcomes == again


def test_zero_noise_cca_errors_sit_at_the_low_end():
    outcomes, _ = cca_validation(sizes=(100,), noise_levels=(0.0,), repeats=3,
                                 m_replicates=100, n_validation=1, seed=26)
    for o in outcomes:
        assert o.observed_relative_error < 0.05
        assert o.bootstrap_relative_error < 0.05


def test_cca_observed_error_grows_as_sites_shrink():
    outcomes, _ = cca_validation(
        sizes=(20, 100), noise_levels=(0.01,), repeats=2, m_replicates=50,
        n_validation=2, seed=21)
    by_size = {}
    for o in outcomes:
        by_size.setdefault(o.n_sites, []).append(o.observed_relative_error)
    assert np.mean(by_size[20]) >= np.mean(by_size[100])
