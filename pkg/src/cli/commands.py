"""Subcommand implementations. Each returns the paths it wrote."""
import dataclasses
import json
import logging
from argparse import Namespace
from pathlib import Path
from typing import Optional

import numpy as np
from omegaconf import DictConfig, OmegaConf

from src import __version__
from src.cli.files import RunManifest, parse_grid, parse_vector, read_matrix
from src.cli.plots import PlotRenderer
from src.config import save_config, thread_count
from src.errors import ConfigError, InvalidInputError
from src.estimators import coordinatewise_median, corrected_sscm, sscm, tyler
from src.geometry import Subspace, principal_angles
from src.linalg import sym_eig
from src.sampling import Dataset, RadialLaw
from src.simulation import (
    experiment_grid_standard,
    relative_efficiency,
    run_experiment,
    validate_sim_config,
    write_efficiency,
    write_records,
)
from src.special import are_curve, sigma1_sample_covariance

logger = logging.getLogger(__name__)

GRAM_TOL = 1e-6
DESK_SCALE_SIZES = 3


def _threads(args: Namespace, cfg: DictConfig) -> int:
    threads = getattr(args, "threads", None)
    return threads if threads is not None else thread_count(cfg)


def _resolved_config(args: Namespace, cfg: DictConfig) -> DictConfig:
    """The settings a run used, interpolations resolved and the worker count fixed."""
    resolved = OmegaConf.create(OmegaConf.to_container(cfg, resolve=True))
    resolved.simulation.threads = _threads(args, cfg)
    return resolved


def _manifest(command: str, args: Namespace, cfg: DictConfig, master_seed=None) -> RunManifest:
    parameters = {k: v for k, v in sorted(vars(args).items()) if k not in ("handler",)}
    parameters["resolved_config"] = OmegaConf.to_container(_resolved_config(args, cfg))
    return RunManifest(command, parameters, master_seed, __version__)


def _manifest_path(out: Optional[Path], command: str) -> Path:
    """Next to the output file, or in the working directory for stdout runs."""
    if out is None:
        return Path.cwd() / f"{command}.manifest.json"
    return out.with_name(out.name + ".manifest.json")


def cmd_estimate(args: Namespace, cfg: DictConfig) -> list[Path]:
    """Estimate a trace-one scatter matrix from a data file."""
    data = Dataset(read_matrix(args.input))
    if args.center == "median":
        center = coordinatewise_median(data)
    else:
        center = parse_vector(args.center, data.d)

    if args.estimator == "sscm":
        estimate = sscm(data, center, cfg.estimators.drop_factor)
    elif args.estimator == "tyler":
        estimate = tyler(
            data, center, cfg.estimators.tyler_tol, cfg.estimators.tyler_max_iter, cfg.estimators.drop_factor
        )
    else:
        estimate = corrected_sscm(data, center, cfg.inversion.step, cfg.inversion.tol, cfg.inversion.max_iter)

    values, vectors = sym_eig(estimate.matrix)
    result = {
        "estimator": estimate.estimator_tag,
        "center": center.tolist(),
        "matrix": estimate.matrix.entries.tolist(),
        "trace": estimate.matrix.trace(),
        "eigenvalues": values.tolist(),
        "eigenvectors": vectors.tolist(),
        "iterations": estimate.iterations,
        "residual": estimate.residual,
        "n_used": estimate.n_used,
    }
    text = json.dumps(result, indent=2) + "\n"
    manifest = _manifest("estimate", args, cfg)
    manifest_path = _manifest_path(args.out, "estimate")
    written = []
    if args.out is None:
        print(text, end="")
    else:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        manifest.add_output(out)
        written.append(out)
        logger.info("wrote %s", out)
    manifest.write(manifest_path)
    return written + [manifest_path]


def cmd_are(args: Namespace, cfg: DictConfig) -> list[Path]:
    """Tabulate (and optionally plot) the asymptotic efficiency over a rho grid."""
    rhos = parse_grid(args.rho_grid)
    if np.any(rhos < cfg.numerics.rho_min) or np.any(rhos > 1.0):
        raise InvalidInputError(f"rho grid must lie within [{cfg.numerics.rho_min:g}, 1]")
    sigma1 = args.sigma1
    if args.against == "sample-covariance":
        if sigma1 is not None:
            raise InvalidInputError("--sigma1 and --against sample-covariance are mutually exclusive")
        sigma1 = sigma1_sample_covariance(args.d, RadialLaw.parse(args.radial))
    curve = are_curve(args.d, args.d1, rhos, sigma1, float(cfg.numerics.rho_min))

    fmt = cfg.output.float_format
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = ["rho,are"] + [f"{fmt % rho},{fmt % are}" for rho, are in curve]
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    manifest = _manifest("are", args, cfg)
    manifest.add_output(out)
    written = [out]
    if args.svg:
        svg = PlotRenderer(cfg.output).are_curve(
            args.svg, [r for r, _ in curve], [a for _, a in curve], f"d={args.d}, d1={args.d1}"
        )
        manifest.add_output(svg)
        written.append(svg)
    manifest.write(_manifest_path(out, "are"))
    return written + [_manifest_path(out, "are")]


def _simulation_configs(args: Namespace, cfg: DictConfig):
    reps = args.reps if args.reps is not None else int(cfg.simulation.replications)
    seed = args.seed if args.seed is not None else int(cfg.simulation.master_seed)
    if args.standard_grid:
        configs = experiment_grid_standard(reps, seed)
        if not args.full:
            configs = [
                dataclasses.replace(c, n_grid=c.n_grid[-DESK_SCALE_SIZES:])
                for c in configs
            ]
        return configs
    raw = OmegaConf.to_container(OmegaConf.load(args.sim_config), resolve=True)
    if not isinstance(raw, dict):
        raise ConfigError([f"{args.sim_config} does not contain a mapping"])
    if args.reps is not None:
        raw["replications"] = args.reps
    if args.seed is not None:
        raw["master_seed"] = args.seed
    return validate_sim_config(raw)


def cmd_simulate(args: Namespace, cfg: DictConfig) -> list[Path]:
    """Run the efficiency experiments and write records, curves and a manifest."""
    configs = _simulation_configs(args, cfg)
    configs = [
        dataclasses.replace(
            c, tyler_tol=float(cfg.estimators.tyler_tol), tyler_max_iter=int(cfg.estimators.tyler_max_iter)
        )
        for c in configs
    ]
    threads = _threads(args, cfg)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = cfg.output.float_format
    renderer = PlotRenderer(cfg.output)
    manifest = _manifest("simulate", args, cfg, configs[0].master_seed)
    manifest.parameters["configurations"] = [c.label for c in configs]
    settings_path = out_dir / "config.yaml"
    save_config(_resolved_config(args, cfg), settings_path)

    written = [settings_path]
    efficiency_rows = []
    for config in configs:
        logger.info("simulating %s: %d sizes x %d replicates", config.label, len(config.n_grid), config.replications)
        records = run_experiment(
            config,
            threads=threads,
            max_failure_fraction=float(cfg.simulation.max_failure_fraction),
            progress=not args.quiet,
        )
        points = relative_efficiency(records, config, int(cfg.simulation.bootstrap_resamples))
        efficiency_rows.extend((config, p) for p in points)
        records_path = out_dir / "records.csv" if len(configs) == 1 else out_dir / config.label / "records.csv"
        write_records(records_path, records, fmt)
        written.append(records_path)
        if args.svg:
            written.append(renderer.efficiency_curve(out_dir / f"{config.label}.svg", config, points))

    efficiency_path = out_dir / "efficiency.csv"
    write_efficiency(efficiency_path, efficiency_rows, fmt)
    written.append(efficiency_path)
    for path in written:
        manifest.add_output(path, relative_to=out_dir)
    manifest.write(out_dir / "manifest.json")
    return written + [out_dir / "manifest.json"]


def _read_basis(path: Path, orthonormalize: bool) -> Subspace:
    basis = read_matrix(path)
    if basis.shape[1] > basis.shape[0]:
        raise InvalidInputError(f"{path}: a basis needs at most as many columns as rows")
    deviation = float(np.max(np.abs(basis.T @ basis - np.eye(basis.shape[1]))))
    if deviation > GRAM_TOL and not orthonormalize:
        raise InvalidInputError(
            f"{path}: basis is not orthonormal (Gram deviation {deviation:.2e}); pass --orthonormalize"
        )
    return Subspace.spanned_by(basis, orthonormalize=True)


def cmd_angles(args: Namespace, cfg: DictConfig) -> list[Path]:
    """Principal angles between the column spans of two basis files."""
    L = _read_basis(args.a, args.orthonormalize)
    M = _read_basis(args.b, args.orthonormalize)
    angles = principal_angles(L, M).angles
    fmt = cfg.output.float_format
    for angle in angles:
        print(fmt % angle)
    manifest = _manifest("angles", args, cfg)
    manifest_path = _manifest_path(args.out, "angles")
    written = []
    if args.out is not None:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        lines = ["index,angle"] + [f"{i},{fmt % a}" for i, a in enumerate(angles, start=1)]
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")
        manifest.add_output(out)
        written.append(out)
    manifest.write(manifest_path)
    return written + [manifest_path]
