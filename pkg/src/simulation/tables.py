"""CSV tables of simulation records and efficiency curves."""
import csv
from pathlib import Path
from typing import Iterable

from src.simulation.experiment import EfficiencyPoint, SimConfig, SimRecord

RECORD_FIELDS = ["n", "replicate", "loss_tyler", "loss_sscm"]
EFFICIENCY_FIELDS = [
    "d", "d1", "gamma", "n", "re1", "re2", "are_asymptotic", "mc_standard_error", "n_excluded",
]


def _write_csv(path: Path, fieldnames: list[str], rows: Iterable[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_records(path: Path, records: Iterable[SimRecord], float_format: str = "%.10g") -> None:
    """records.csv: one row per successful replicate, in the given order."""
    _write_csv(
        path,
        RECORD_FIELDS,
        (
            {
                "n": r.n,
                "replicate": r.replicate,
                "loss_tyler": float_format % r.loss_tyler,
                "loss_sscm": float_format % r.loss_sscm,
            }
            for r in records
            if not r.failed
        ),
    )


def write_efficiency(
    path: Path,
    rows: Iterable[tuple[SimConfig, EfficiencyPoint]],
    float_format: str = "%.10g",
) -> None:
    """efficiency.csv: one row per (configuration, sample size)."""
    _write_csv(
        path,
        EFFICIENCY_FIELDS,
        (
            {
                "d": config.d,
                "d1": config.d1,
                "gamma": float_format % config.gamma,
                "n": point.n,
                "re1": float_format % point.re1,
                "re2": float_format % point.re2,
                "are_asymptotic": float_format % point.are_asymptotic,
                "mc_standard_error": float_format % point.mc_standard_error,
                "n_excluded": point.n_excluded,
            }
            for config, point in rows
        ),
    )
