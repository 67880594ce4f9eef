"""Argument parsing, logging setup and exit codes."""
import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from omegaconf import DictConfig

from src import __version__
from src.cli.commands import cmd_angles, cmd_are, cmd_estimate, cmd_simulate
from src.config import load_config
from src.errors import ScatterLabError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scatterlab",
        description="Spatial sign and Tyler shape estimators, their efficiencies and simulations.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", dest="settings", type=Path, default=None,
                        help="YAML settings merged over the built-in defaults (default: config.yaml)")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG level")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="only log warnings; no progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    estimate = sub.add_parser("estimate", help="estimate a trace-one scatter matrix from a CSV file")
    estimate.add_argument("input", type=Path, help="headerless CSV, one observation per row")
    estimate.add_argument("--center", required=True, help='comma-separated vector or "median"')
    estimate.add_argument("--estimator", choices=("sscm", "tyler", "corrected-sscm"), default="sscm")
    estimate.add_argument("--out", type=Path, default=None, help="JSON output (default: stdout, manifest in the working directory)")
    estimate.set_defaults(handler=cmd_estimate)

    are = sub.add_parser("are", help="asymptotic efficiency of the SSCM eigenprojection over a rho grid")
    are.add_argument("--d", type=int, required=True)
    are.add_argument("--d1", type=int, required=True)
    are.add_argument("--rho-grid", required=True, help="start:stop:count")
    are.add_argument("--sigma1", type=float, default=None, help="compare against an estimate with this sigma1")
    are.add_argument("--against", choices=("tyler", "sample-covariance"), default="tyler")
    are.add_argument("--radial", default="normal", help='radial law for --against sample-covariance: "normal" or "t:<nu>"')
    are.add_argument("--out", type=Path, required=True)
    are.add_argument("--svg", type=Path, default=None)
    are.set_defaults(handler=cmd_are)

    simulate = sub.add_parser("simulate", help="finite-sample efficiency experiments")
    source = simulate.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", dest="sim_config", type=Path, help="simulation config (YAML or JSON, schema 1)")
    source.add_argument("--standard-grid", action="store_true", help="the 21 standard settings")
    simulate.add_argument("--full", action="store_true", help="with --standard-grid, run every sample size")
    simulate.add_argument("--reps", type=int, default=None)
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--threads", type=int, default=None, help="worker processes (0 = one per CPU)")
    simulate.add_argument("--svg", action="store_true", help="also plot each configuration")
    simulate.add_argument("--out-dir", type=Path, required=True)
    simulate.set_defaults(handler=cmd_simulate)

    angles = sub.add_parser("angles", help="principal angles between two subspaces")
    angles.add_argument("--a", type=Path, required=True, help="CSV basis, one column per basis vector")
    angles.add_argument("--b", type=Path, required=True)
    angles.add_argument("--orthonormalize", action="store_true", help="QR-orthonormalize the bases first")
    angles.add_argument("--out", type=Path, default=None)
    angles.set_defaults(handler=cmd_angles)
    return parser


def configure_logging(cfg: DictConfig, verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else cfg.logging.level
    logging.basicConfig(level=level, format=cfg.logging.format, stream=sys.stderr, force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns 0 on success, 1 on numerical failure, 2 on bad input."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.settings)
        configure_logging(cfg, args.verbose, args.quiet)
        args.handler(args, cfg)
    except ScatterLabError as e:
        logger.debug("command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    return 0
