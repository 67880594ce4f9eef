"""Finite-sample efficiency experiments."""
from src.simulation.experiment import (
    EfficiencyPoint,
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
)
from src.simulation.tables import EFFICIENCY_FIELDS, RECORD_FIELDS, write_efficiency, write_records

__all__ = [
    "EFFICIENCY_FIELDS",
    "EfficiencyPoint",
    "RECORD_FIELDS",
    "SimConfig",
    "SimRecord",
    "bootstrap_standard_error",
    "experiment_grid_standard",
    "explained_variance",
    "gamma_for_explained_variance",
    "relative_efficiency",
    "run_experiment",
    "run_replicate",
    "validate_sim_config",
    "write_efficiency",
    "write_records",
]
