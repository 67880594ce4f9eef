"""Tests for the finite-sample efficiency experiments."""
import random

import numpy as np
import pytest

from src.errors import ConfigError, DegenerateDataError, InvalidInputError
from src.simulation import (
    EFFICIENCY_FIELDS,
    RECORD_FIELDS,
    SimConfig,
    SimRecord,
    bootstrap_standard_error,
    experiment_grid_standard,
    explained_variance,
    gamma_for_explained_variance,
    relative_efficiency,
    run_experiment,
    run_replicate,
    validate_sim_config,
    write_efficiency,
    write_records,
)
from src.sampling import SeedSpec
from src.special import are_hypergeometric


@pytest.fixture
def small_config():
    return SimConfig(2, 1, 9.0, (10, 20), replications=20, master_seed=5)


def records_from(losses_tyler, losses_sscm, n=10):
    return [SimRecord(n, i, t, o) for i, (t, o) in enumerate(zip(losses_tyler, losses_sscm))]


class TestGrid:
    """Tests for the standard experiment grid."""

    def test_count(self):
        configs = experiment_grid_standard()
        assert len(configs) == 21
        assert [c.d for c in configs].count(5) == 12

    def test_gammas(self):
        gammas = {(c.d, c.d1): [] for c in experiment_grid_standard()}
        for c in experiment_grid_standard():
            gammas[(c.d, c.d1)].append(c.gamma)
        assert gammas[(2, 1)] == pytest.approx([9, 19, 99])
        assert gammas[(3, 2)] == pytest.approx([4.5, 9.5, 49.5])
        assert gammas[(5, 1)] == pytest.approx([36, 76, 396])
        assert gammas[(5, 3)] == pytest.approx([6, 12.6667, 66], rel=1e-4)
        assert gammas[(5, 4)] == pytest.approx([2.25, 4.75, 24.75])

    def test_explained_variance_levels(self):
        for c in experiment_grid_standard():
            assert explained_variance(c.d, c.d1, c.gamma) in (
                pytest.approx(0.90), pytest.approx(0.95), pytest.approx(0.99)
            )

    def test_sample_sizes(self):
        configs = experiment_grid_standard()
        assert configs[0].n_grid == tuple(range(2, 51))
        assert configs[-1].n_grid == tuple(range(5, 126, 5))

    def test_gamma_for_explained_variance(self):
        assert gamma_for_explained_variance(2, 1, 0.9) == pytest.approx(9.0)
        with pytest.raises(InvalidInputError):
            gamma_for_explained_variance(2, 1, 1.0)


class TestSimConfig:
    """Tests for a single simulation setting."""

    def test_derived_values(self, small_config):
        assert small_config.rho == pytest.approx(1 / 3)
        assert small_config.d2 == 1
        assert small_config.label == "d2_d11_gamma9"
        np.testing.assert_allclose(small_config.scatter_root(), np.diag([3.0, 1.0]))
        np.testing.assert_array_equal(small_config.true_projector(), np.diag([1.0, 0.0]))

    def test_reports_every_problem(self):
        with pytest.raises(ConfigError) as excinfo:
            SimConfig(3, 3, 0.5, (2, 2), replications=0)
        assert len(excinfo.value.problems) == 5


class TestValidateSimConfig:
    """Tests for parsing simulation config files."""

    def test_valid(self):
        raw = {
            "schema": 1,
            "master_seed": 11,
            "replications": 40,
            "experiments": [
                {"d": 2, "d1": 1, "gamma": 9, "n_grid": [2, 10]},
                {"d": 3, "d1": 2, "explained_variance": 0.95, "n_grid": [3, 25]},
            ],
        }
        configs = validate_sim_config(raw)
        assert [c.gamma for c in configs] == pytest.approx([9.0, 9.5])
        assert all(c.replications == 40 and c.master_seed == 11 for c in configs)

    def test_collects_all_problems(self):
        raw = {
            "schema": 2,
            "experiments": [
                {"d": 2, "d1": 1, "gamma": 9},
                {"d": 2, "d1": 1, "gamma": 9, "explained_variance": 0.9, "n_grid": [5]},
                {"d": 2, "d1": 1, "gamma": 9, "n_grid": [1, 5]},
            ],
        }
        with pytest.raises(ConfigError) as excinfo:
            validate_sim_config(raw)
        problems = excinfo.value.problems
        assert len(problems) == 4
        assert any("schema" in p for p in problems)
        assert any("experiments[0] is missing n_grid" in p for p in problems)
        assert any("exactly one of gamma or explained_variance" in p for p in problems)
        assert any("below d=2" in p for p in problems)

    def test_empty_experiments(self):
        with pytest.raises(ConfigError, match="non-empty list"):
            validate_sim_config({"schema": 1, "experiments": []})


class TestRunExperiment:
    """Tests for running replicates."""

    def test_replicate_is_deterministic(self, small_config):
        assert run_replicate(small_config, 10, 3) == run_replicate(small_config, 10, 3)

    def test_losses_are_bounded(self, small_config):
        record = run_replicate(small_config, 10, 0)
        assert not record.failed
        for loss in (record.loss_tyler, record.loss_sscm):
            assert 0.0 <= loss <= (np.pi / 2) ** 2

    def test_sorted_and_complete(self, small_config):
        records = run_experiment(small_config, threads=1)
        assert len(records) == 40
        assert [(r.n, r.replicate) for r in records] == sorted((r.n, r.replicate) for r in records)

    def test_worker_count_does_not_change_results(self, small_config):
        serial = run_experiment(small_config, threads=1, chunk_size=7)
        parallel = run_experiment(small_config, threads=2, chunk_size=3)
        assert serial == parallel

    def test_nearly_deterministic_subspace(self):
        """Test a huge eigenvalue ratio leaves both eigenprojections almost exact."""
        config = SimConfig(2, 1, 1e6, (100,), replications=50, master_seed=1)
        records = run_experiment(config, threads=1)
        assert np.median([r.loss_tyler for r in records]) < 0.1
        assert np.median([r.loss_sscm for r in records]) < 0.1


class TestRelativeEfficiency:
    """Tests for aggregating losses into efficiencies."""

    def test_equal_losses(self, small_config):
        losses = [0.1, 0.4, 0.2, 0.3]
        [point] = relative_efficiency(records_from(losses, losses), small_config, bootstrap_resamples=20)
        assert point.re1 == pytest.approx(1.0)
        assert point.re2 == pytest.approx(1.0)
        assert point.are_asymptotic == pytest.approx(0.75)

    def test_half_losses(self, small_config):
        omega = [0.2, 0.5, 0.1, 0.8, 0.3]
        [point] = relative_efficiency(records_from([o / 2 for o in omega], omega), small_config)
        assert point.re1 == pytest.approx(0.5)
        assert point.re2 == pytest.approx(0.5)

    def test_order_independent(self, small_config):
        rng = np.random.default_rng(0)
        records = records_from(rng.random(30), rng.random(30)) + records_from(rng.random(30), rng.random(30), n=20)
        shuffled = records[:]
        random.Random(4).shuffle(shuffled)
        assert relative_efficiency(records, small_config) == relative_efficiency(shuffled, small_config)

    def test_failed_records_are_excluded(self, small_config):
        records = records_from([0.1, 0.2, 0.3], [0.2, 0.4, 0.6]) + [SimRecord(10, 3, np.nan, np.nan, failed=True)]
        [point] = relative_efficiency(records, small_config)
        assert point.n_excluded == 1
        assert point.re1 == pytest.approx(0.5)

    def test_needs_two_records(self, small_config):
        with pytest.raises(InvalidInputError):
            relative_efficiency(records_from([0.1], [0.2]), small_config)

    def test_zero_sscm_losses(self, small_config):
        with pytest.raises(DegenerateDataError):
            relative_efficiency(records_from([0.1, 0.2], [0.0, 0.0]), small_config)

    def test_bootstrap_standard_error(self):
        T = np.linspace(0.1, 1.0, 50)
        se = bootstrap_standard_error(T, 2 * T, 100, SeedSpec(3))
        assert se == pytest.approx(0.0, abs=1e-12)
        assert bootstrap_standard_error(T, T[::-1], 100, SeedSpec(3)) > 0


class TestTables:
    """Tests for the CSV writers."""

    def test_records_csv(self, tmp_path):
        path = tmp_path / "records.csv"
        records = [SimRecord(10, 0, 0.25, 0.5), SimRecord(10, 1, np.nan, np.nan, failed=True)]
        write_records(path, records)
        assert path.read_text() == ",".join(RECORD_FIELDS) + "\n10,0,0.25,0.5\n"

    def test_efficiency_csv(self, tmp_path, small_config):
        path = tmp_path / "efficiency.csv"
        [point] = relative_efficiency(records_from([0.1, 0.2], [0.2, 0.4]), small_config, bootstrap_resamples=10)
        write_efficiency(path, [(small_config, point)])
        header, row = path.read_text().splitlines()
        assert header == ",".join(EFFICIENCY_FIELDS)
        assert row.startswith("2,1,9,10,0.5,0.5,0.75,")
        assert row.endswith(",0")


@pytest.mark.slow
class TestFiniteSampleEfficiency:
    """Tests that the finite-sample efficiencies approach the asymptotic ones."""

    def test_plane(self):
        config = SimConfig(2, 1, 9.0, (10, 25, 50), replications=10_000, master_seed=20140101)
        points = relative_efficiency(run_experiment(config), config)
        assert points[-1].are_asymptotic == pytest.approx(0.75)
        assert abs(points[-1].re2 - 0.75) < 0.05
        assert abs(points[-1].re1 - 0.75) < 0.15

    def test_plane_approaches_from_above(self):
        """Test RE2 falls from n = 10 towards the asymptote at n = 25 and n = 50."""
        config = SimConfig(2, 1, 9.0, (10, 25, 50), replications=10_000, master_seed=20140101)
        small, middle, large = (point.re2 for point in relative_efficiency(run_experiment(config), config))
        assert small > max(middle, large)
        assert abs(small - 0.75) > max(abs(middle - 0.75), abs(large - 0.75))

    def test_gap_to_asymptote_shrinks(self):
        """Test |RE2 - ARE| at n = 80 is well below its value at n = 10 for gamma = 19."""
        config = SimConfig(2, 1, 19.0, (10, 20, 40, 80), replications=10_000, master_seed=20140101)
        points = relative_efficiency(run_experiment(config), config)
        gaps = [abs(point.re2 - point.are_asymptotic) for point in points]
        assert max(gaps[1:]) < gaps[0]
        assert gaps[-1] < gaps[0] / 3
        assert gaps[-1] < 0.03

    def test_three_dimensions(self):
        config = SimConfig(3, 2, 4.5, (50,), replications=10_000, master_seed=20140101)
        [point] = relative_efficiency(run_experiment(config), config)
        assert abs(point.re2 - are_hypergeometric(3, 2, 1 / np.sqrt(4.5))) < 0.07
