"""Configuration management using OmegaConf."""
from pathlib import Path
from typing import Optional

from omegaconf import OmegaConf, DictConfig

from src.errors import ConfigError

CONFIG_PATH = Path(__file__).parent.parent / "config.yaml"

DEFAULTS = {
    "numerics": {
        "rho_min": 1e-6,
    },
    "estimators": {
        "tyler_tol": 1e-10,
        "tyler_max_iter": 1000,
        "drop_factor": 1e-12,
    },
    "inversion": {
        "step": 0.5,
        "tol": 1e-10,
        "max_iter": 10_000,
    },
    "simulation": {
        "replications": 10000,
        "master_seed": 20140101,
        "max_failure_fraction": 0.001,
        "threads": "${oc.env:SCATTERLAB_THREADS,0}",
        "bootstrap_resamples": 200,
    },
    "output": {
        "float_format": "%.10g",
        "plot_dpi": 100,
    },
    "logging": {
        "level": "INFO",
        "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
    },
}


def load_config(config_path: Optional[Path] = None) -> DictConfig:
    """Load configuration from file, merging with defaults.

    Without a path, config.yaml next to the package is used when present and
    the defaults otherwise. An explicit path must exist and parse.

    Raises:
        ConfigError: If the file is missing (explicit path only) or unreadable.
    """
    defaults = OmegaConf.create(DEFAULTS)
    if config_path is None:
        if not CONFIG_PATH.exists():
            return defaults
        config_path = CONFIG_PATH
    config_path = Path(config_path)
    if not config_path.is_file():
        raise ConfigError([f"{config_path}: file not found"])
    try:
        return OmegaConf.merge(defaults, OmegaConf.load(config_path))
    except Exception as e:
        raise ConfigError([f"{config_path}: {e}"]) from e


def save_config(cfg: DictConfig, config_path: Path = CONFIG_PATH) -> None:
    """Save configuration to file with interpolations resolved."""
    OmegaConf.save(cfg, config_path, resolve=True)


def thread_count(cfg: DictConfig) -> int:
    """Resolve the worker cap; 0 or a malformed value means automatic."""
    try:
        return max(0, int(cfg.simulation.threads))
    except (TypeError, ValueError):
        return 0
