"""Monte Carlo comparison of SSCM and Tyler eigenprojections at finite n.

Each replicate draws Normal_d(0, I) data from its own stream. Tyler's
estimate is computed on those draws and mapped to Gamma by affine
equivariance; the SSCM is recomputed on the Gamma^(1/2)-transformed draws.
Both top-d1 eigenprojections are scored by the sum of squared principal
angles to the true eigenspace.
"""
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from tqdm import tqdm

from src.errors import ConfigError, DegenerateDataError, InvalidInputError, ReplicateFailureError, ScatterLabError
from src.estimators import sscm, tyler
from src.geometry import eigenprojection, squared_angle_loss
from src.sampling import Dataset, SeedSpec, sample_normal, stream_for
from src.special import are_hypergeometric

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
EXPLAINED_VARIANCE_LEVELS = (0.90, 0.95, 0.99)
BOOTSTRAP_KEY = 2**32 - 1


def _setting_problems(d: int, d1: int, gamma: float, n_grid: Sequence[int]) -> list[str]:
    found = []
    if not 1 <= d1 < d:
        found.append(f"need 1 <= d1 < d, got d={d}, d1={d1}")
    if not gamma > 1:
        found.append(f"gamma must exceed 1, got {gamma}")
    if not n_grid:
        found.append("n_grid is empty")
    low = [n for n in n_grid if n < d]
    if low:
        found.append(f"sample sizes {low} are below d={d}")
    if len(set(n_grid)) != len(n_grid):
        found.append("n_grid has duplicate sample sizes")
    return found


@dataclass(frozen=True)
class SimConfig:
    """One (d, d1, gamma) setting and its grid of sample sizes.

    Gamma = diag(gamma, ..., gamma, 1, ..., 1) with d1 leading entries.
    """

    d: int
    d1: int
    gamma: float
    n_grid: tuple
    replications: int = 10000
    master_seed: int = 20140101
    tyler_tol: float = 1e-10
    tyler_max_iter: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        problems = self.problems()
        if problems:
            raise ConfigError(problems)

    def problems(self) -> list[str]:
        found = _setting_problems(self.d, self.d1, self.gamma, self.n_grid)
        if self.replications < 1:
            found.append(f"replications must be at least 1, got {self.replications}")
        if not 0 <= self.master_seed < 2**64:
            found.append(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed}")
        return found

    @property
    def d2(self) -> int:
        return self.d - self.d1

    @property
    def rho(self) -> float:
        return 1.0 / math.sqrt(self.gamma)

    @property
    def label(self) -> str:
        return f"d{self.d}_d1{self.d1}_gamma{self.gamma:g}"

    def scatter_root(self) -> np.ndarray:
        """Gamma^(1/2)."""
        return np.diag(np.sqrt([self.gamma] * self.d1 + [1.0] * self.d2))

    def true_projector(self) -> np.ndarray:
        return np.diag([1.0] * self.d1 + [0.0] * self.d2)


@dataclass(frozen=True)
class SimRecord:
    """Losses of one replicate; failed replicates carry NaN losses."""

    n: int
    replicate: int
    loss_tyler: float
    loss_sscm: float
    failed: bool = False


@dataclass(frozen=True)
class EfficiencyPoint:
    """Finite-sample efficiencies of the SSCM at one sample size."""

    n: int
    re1: float
    re2: float
    are_asymptotic: float
    mc_standard_error: float
    n_excluded: int = 0


def gamma_for_explained_variance(d: int, d1: int, level: float) -> float:
    """gamma such that the top-d1 eigenspace explains the given share of the variance.

    Solves d1 gamma / (d1 gamma + d2) = level.
    """
    if not 0.0 < level < 1.0:
        raise InvalidInputError(f"explained-variance level must lie in (0, 1), got {level}")
    if not 1 <= d1 < d:
        raise InvalidInputError(f"need 1 <= d1 < d, got d={d}, d1={d1}")
    return level * (d - d1) / (d1 * (1.0 - level))


def explained_variance(d: int, d1: int, gamma: float) -> float:
    return d1 * gamma / (d1 * gamma + d - d1)


def experiment_grid_standard(replications: int = 10000, master_seed: int = 20140101) -> list[SimConfig]:
    """The 21 (d, d1, gamma) settings: 90, 95 and 99 percent explained variance.

    Sample sizes run over d..50 for d = 2, 3 and over 5, 10, ..., 125 for d = 5.
    """
    configs = []
    for d in (2, 3, 5):
        n_grid = tuple(range(d, 51)) if d < 5 else tuple(range(5, 126, 5))
        for d1 in range(1, d):
            for level in EXPLAINED_VARIANCE_LEVELS:
                gamma = round(gamma_for_explained_variance(d, d1, level), 10)
                configs.append(SimConfig(d, d1, gamma, n_grid, replications, master_seed))
    return configs


def validate_sim_config(raw: Mapping[str, Any]) -> list[SimConfig]:
    """Turn a parsed simulation config into SimConfigs, reporting every problem at once.

    Expected layout::

        schema: 1
        master_seed: 20140101      # optional
        replications: 10000        # optional
        experiments:
          - {d: 2, d1: 1, gamma: 9, n_grid: [2, 10, 50]}
          - {d: 3, d1: 2, explained_variance: 0.95, n_grid: [3, 25, 50]}

    Raises:
        ConfigError: Listing all problems found.
    """
    problems = []
    if not isinstance(raw, Mapping):
        raise ConfigError(["configuration must be a mapping"])
    if raw.get("schema") != SCHEMA_VERSION:
        problems.append(f"schema must be {SCHEMA_VERSION}, got {raw.get('schema')!r}")
    seed = raw.get("master_seed", 20140101)
    reps = raw.get("replications", 10000)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        problems.append(f"master_seed must be a non-negative integer, got {seed!r}")
    if not isinstance(reps, int) or isinstance(reps, bool) or reps < 1:
        problems.append(f"replications must be a positive integer, got {reps!r}")
    experiments = raw.get("experiments")
    if not experiments or isinstance(experiments, (str, Mapping)):
        problems.append("experiments must be a non-empty list")
        experiments = []

    configs = []
    for index, entry in enumerate(experiments):
        where = f"experiments[{index}]"
        if not isinstance(entry, Mapping):
            problems.append(f"{where} must be a mapping")
            continue
        missing = [key for key in ("d", "d1", "n_grid") if key not in entry]
        if missing:
            problems.append(f"{where} is missing {', '.join(missing)}")
            continue
        if ("gamma" in entry) == ("explained_variance" in entry):
            problems.append(f"{where} needs exactly one of gamma or explained_variance")
            continue
        try:
            d, d1 = int(entry["d"]), int(entry["d1"])
            if "gamma" in entry:
                gamma = float(entry["gamma"])
            else:
                gamma = gamma_for_explained_variance(d, d1, float(entry["explained_variance"]))
            n_grid = tuple(int(n) for n in entry["n_grid"])
        except (TypeError, ValueError) as e:
            problems.append(f"{where}: {e}")
            continue
        found = _setting_problems(d, d1, gamma, n_grid)
        if found:
            problems.extend(f"{where}: {p}" for p in found)
            continue
        configs.append((d, d1, gamma, n_grid))
    if problems:
        raise ConfigError(problems)
    return [SimConfig(d, d1, gamma, n_grid, reps, seed) for d, d1, gamma, n_grid in configs]


def run_replicate(config: SimConfig, n: int, replicate: int) -> SimRecord:
    """Losses of Tyler's and the SSCM's top-d1 eigenprojections for one replicate."""
    seed = stream_for(config.master_seed, n, replicate)
    d = config.d
    center = np.zeros(d)
    root = config.scatter_root()
    groups = (config.d1, config.d2)
    P_true = config.true_projector()
    try:
        draws = sample_normal(n, np.eye(d), seed)
        T = tyler(draws, center, config.tyler_tol, config.tyler_max_iter).matrix.entries
        _, P_tyler = eigenprojection(root @ T @ root, groups, 0)
        transformed = Dataset(draws.rows @ root, center=center)
        _, P_sscm = eigenprojection(sscm(transformed, center), groups, 0)
        return SimRecord(
            n,
            replicate,
            squared_angle_loss(P_tyler, P_true, config.d1),
            squared_angle_loss(P_sscm, P_true, config.d1),
        )
    except (ScatterLabError, np.linalg.LinAlgError) as e:
        logger.debug("replicate (n=%d, %d) failed: %s", n, replicate, e)
        return SimRecord(n, replicate, math.nan, math.nan, failed=True)


def _run_chunk(config: SimConfig, n: int, start: int, stop: int) -> list[SimRecord]:
    return [run_replicate(config, n, r) for r in range(start, stop)]


def _chunks(config: SimConfig, chunk_size: int) -> list[tuple[int, int, int]]:
    return [
        (n, start, min(start + chunk_size, config.replications))
        for n in config.n_grid
        for start in range(0, config.replications, chunk_size)
    ]


def run_experiment(
    config: SimConfig,
    threads: int = 0,
    max_failure_fraction: float = 0.001,
    progress: bool = False,
    chunk_size: int = 250,
) -> list[SimRecord]:
    """All replicates of a configuration, sorted by (n, replicate).

    Args:
        config: Setting to simulate.
        threads: Worker processes; 0 means one per CPU, 1 runs in-process.
        max_failure_fraction: Largest tolerated share of failed replicates.
        progress: Show a progress bar on stderr.
        chunk_size: Replicates per work item.

    Raises:
        ReplicateFailureError: If too many replicates failed.
    """
    tasks = _chunks(config, chunk_size)
    workers = threads or os.cpu_count() or 1
    workers = max(1, min(workers, len(tasks)))
    bar = tqdm(total=len(tasks), desc=config.label, disable=not progress, leave=False)
    records: list[SimRecord] = []
    try:
        if workers == 1:
            for n, start, stop in tasks:
                records.extend(_run_chunk(config, n, start, stop))
                bar.update()
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_run_chunk, config, n, start, stop) for n, start, stop in tasks]
                for future in futures:
                    records.extend(future.result())
                    bar.update()
    finally:
        bar.close()

    records.sort(key=lambda r: (r.n, r.replicate))
    failed = sum(r.failed for r in records)
    if failed:
        logger.warning("%s: %d of %d replicates failed and were excluded", config.label, failed, len(records))
    if failed > max_failure_fraction * len(records):
        raise ReplicateFailureError(failed, len(records), max_failure_fraction)
    return records


def bootstrap_standard_error(
    losses_tyler: Sequence[float],
    losses_sscm: Sequence[float],
    n_boot: int,
    seed: SeedSpec,
) -> float:
    """Bootstrap standard error of mean(T) / mean(Omega) over paired resamples."""
    T = np.asarray(losses_tyler, dtype=float)
    omega = np.asarray(losses_sscm, dtype=float)
    if T.shape != omega.shape or T.size < 2:
        raise InvalidInputError("bootstrap needs at least two paired losses")
    if n_boot < 2:
        return math.nan
    index = seed.generator().integers(0, T.size, size=(n_boot, T.size))
    denominators = omega[index].mean(axis=1)
    valid = denominators > 0
    ratios = T[index][valid].mean(axis=1) / denominators[valid]
    return float(np.std(ratios, ddof=1)) if ratios.size > 1 else math.nan


def relative_efficiency(
    records: Iterable[SimRecord],
    config: SimConfig,
    bootstrap_resamples: int = 200,
) -> list[EfficiencyPoint]:
    """RE1 = mean(T)/mean(Omega) and RE2 = median(T)/median(Omega) per sample size.

    Raises:
        InvalidInputError: If a sample size has fewer than two usable records.
        DegenerateDataError: If the SSCM losses at a sample size are all zero.
    """
    by_n: dict[int, list[SimRecord]] = {}
    for record in records:
        by_n.setdefault(record.n, []).append(record)
    are = are_hypergeometric(config.d, config.d1, config.rho)

    points = []
    for n in sorted(by_n):
        group = sorted(by_n[n], key=lambda r: r.replicate)
        usable = [r for r in group if not r.failed]
        if len(usable) < 2:
            raise InvalidInputError(f"n={n} has {len(usable)} usable records; need at least 2")
        T = np.array([r.loss_tyler for r in usable])
        omega = np.array([r.loss_sscm for r in usable])
        if omega.mean() == 0 or np.median(omega) == 0:
            raise DegenerateDataError(f"SSCM losses at n={n} are zero; efficiency is undefined")
        se = bootstrap_standard_error(
            T, omega, bootstrap_resamples, stream_for(config.master_seed, n, BOOTSTRAP_KEY)
        )
        points.append(
            EfficiencyPoint(
                n=n,
                re1=float(T.mean() / omega.mean()),
                re2=float(np.median(T) / np.median(omega)),
                are_asymptotic=are,
                mc_standard_error=se,
                n_excluded=len(group) - len(usable),
            )
        )
    return points
