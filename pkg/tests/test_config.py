"""Tests for configuration and error modules."""
import pytest
from omegaconf import DictConfig, OmegaConf


def test_load_config_returns_omegaconf():
    from src.config import load_config
    cfg = load_config()
    assert isinstance(cfg, DictConfig)


def test_config_has_numerics_section():
    from src.config import load_config
    cfg = load_config()
    assert "numerics" in cfg
    assert cfg.numerics.rho_min == pytest.approx(1e-6)


def test_config_has_estimators_section():
    from src.config import load_config
    cfg = load_config()
    assert cfg.estimators.tyler_tol == pytest.approx(1e-10)
    assert cfg.estimators.tyler_max_iter == 1000


def test_config_has_inversion_section():
    from src.config import load_config
    cfg = load_config()
    assert cfg.inversion.step == pytest.approx(0.5)
    assert cfg.inversion.max_iter == 10_000


def test_config_has_simulation_section():
    from src.config import load_config
    cfg = load_config()
    assert "replications" in cfg.simulation
    assert "master_seed" in cfg.simulation
    assert cfg.simulation.max_failure_fraction == pytest.approx(0.001)


def test_config_has_output_and_logging_sections():
    from src.config import load_config
    cfg = load_config()
    assert cfg.output.float_format == "%.10g"
    assert cfg.logging.level == "INFO"


def test_missing_explicit_file_is_an_error(tmp_path):
    """Test that a config path given explicitly must exist."""
    from src.config import load_config
    from src.errors import ConfigError
    with pytest.raises(ConfigError, match="nope.yaml"):
        load_config(tmp_path / "nope.yaml")


def test_absent_default_file_falls_back_to_defaults(tmp_path, monkeypatch):
    """Test that without a path and without config.yaml the built-in defaults are used."""
    from src import config
    monkeypatch.setattr(config, "CONFIG_PATH", tmp_path / "config.yaml")
    cfg = config.load_config()
    assert cfg.simulation.master_seed == config.DEFAULTS["simulation"]["master_seed"]


def test_user_file_overrides_defaults(tmp_path):
    """Test that values in a user file are merged over the defaults."""
    from src.config import load_config
    path = tmp_path / "settings.yaml"
    path.write_text("simulation:\n  replications: 17\n")
    cfg = load_config(path)
    assert cfg.simulation.replications == 17
    assert cfg.inversion.step == pytest.approx(0.5)


def test_unreadable_file_is_an_error(tmp_path):
    """Test that a malformed YAML file is reported instead of ignored."""
    from src.config import load_config
    from src.errors import ConfigError
    path = tmp_path / "broken.yaml"
    path.write_text("simulation: [unclosed\n")
    with pytest.raises(ConfigError, match="broken.yaml"):
        load_config(path)


def test_save_config_round_trips(tmp_path):
    """Test that a saved config loads back with the same values."""
    from src.config import load_config, save_config
    cfg = load_config()
    cfg.simulation.replications = 123
    path = tmp_path / "saved.yaml"
    save_config(cfg, path)
    assert load_config(path).simulation.replications == 123


def test_save_config_resolves_interpolations(tmp_path, monkeypatch):
    from src.config import load_config, save_config
    monkeypatch.setenv("SCATTERLAB_THREADS", "5")
    path = tmp_path / "saved.yaml"
    save_config(load_config(), path)
    monkeypatch.delenv("SCATTERLAB_THREADS")
    assert "oc.env" not in path.read_text()
    assert int(load_config(path).simulation.threads) == 5


class TestThreadCount:
    """Tests for the worker-count setting."""

    def test_reads_environment(self, monkeypatch):
        """Test that SCATTERLAB_THREADS is picked up through the resolver."""
        from src.config import load_config, thread_count
        monkeypatch.setenv("SCATTERLAB_THREADS", "3")
        assert thread_count(load_config()) == 3

    def test_defaults_to_auto(self, monkeypatch):
        """Test that an unset variable means automatic (0)."""
        from src.config import load_config, thread_count
        monkeypatch.delenv("SCATTERLAB_THREADS", raising=False)
        assert thread_count(load_config()) == 0

    def test_malformed_value_means_auto(self):
        """Test that a non-numeric value is treated as automatic."""
        from src.config import thread_count
        cfg = OmegaConf.create({"simulation": {"threads": "lots"}})
        assert thread_count(cfg) == 0


class TestErrors:
    """Tests for the exception hierarchy."""

    def test_input_errors_exit_with_two(self):
        from src.errors import ConfigError, DataParseError, DomainError, InvalidInputError
        for error in (InvalidInputError("x"), DomainError("x"), ConfigError(["x"]), DataParseError("x")):
            assert error.exit_code == 2
            assert isinstance(error, ValueError)

    def test_numerical_errors_exit_with_one(self):
        from src.errors import ConvergenceError, ExistenceError, NumericalError, ReplicateFailureError
        for error in (NumericalError("x"), ConvergenceError("x", 5, 0.1), ExistenceError("x"),
                      ReplicateFailureError(3, 100, 0.001)):
            assert error.exit_code == 1
            assert isinstance(error, ArithmeticError)

    def test_config_error_lists_every_problem(self):
        from src.errors import ConfigError
        error = ConfigError(["first problem", "second problem"])
        assert "first problem" in str(error)
        assert "second problem" in str(error)
        assert error.problems == ["first problem", "second problem"]

    def test_data_parse_error_names_line(self):
        from src.errors import DataParseError
        error = DataParseError("not a number", "data.csv", 7)
        assert "data.csv:7:" in str(error)
        assert error.line == 7

    def test_convergence_error_reports_residual(self):
        from src.errors import ConvergenceError
        error = ConvergenceError("stuck", 1000, 2.5e-3)
        assert error.iterations == 1000
        assert "2.500e-03" in str(error)
