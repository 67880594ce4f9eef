"""Input parsing and run manifests for the command line."""
import csv
import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

import numpy as np

from src.errors import DataParseError, InvalidInputError


def read_matrix(path: Path) -> np.ndarray:
    """Headerless comma-separated numeric table, one row per line; blank lines are skipped.

    Raises:
        DataParseError: Naming the file and line of the first bad row.
    """
    path = Path(path)
    if not path.is_file():
        raise DataParseError("file not found", str(path))
    rows = []
    width = None
    with path.open("r", encoding="utf-8", newline="") as f:
        for line_number, row in enumerate(csv.reader(f), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                values = [float(cell) for cell in row]
            except ValueError as e:
                raise DataParseError(f"not a number: {e}", str(path), line_number) from e
            if not all(np.isfinite(values)):
                raise DataParseError("non-finite value", str(path), line_number)
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise DataParseError(
                    f"expected {width} columns, found {len(values)}", str(path), line_number
                )
            rows.append(values)
    if not rows:
        raise DataParseError("no data rows", str(path))
    return np.array(rows, dtype=float)


def parse_vector(text: str, length: Optional[int] = None) -> np.ndarray:
    """Comma-separated vector such as "0,0,1"."""
    try:
        values = np.array([float(x) for x in text.split(",")], dtype=float)
    except ValueError as e:
        raise InvalidInputError(f"bad vector {text!r}: {e}") from e
    if length is not None and values.size != length:
        raise InvalidInputError(f"vector {text!r} has {values.size} entries, expected {length}")
    return values


def parse_grid(text: str) -> np.ndarray:
    """"start:stop:count" as count evenly spaced values."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidInputError(f"grid must look like start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise InvalidInputError(f"bad grid {text!r}: {e}") from e
    if count < 1:
        raise InvalidInputError(f"grid count must be positive, got {count}")
    if count == 1:
        return np.array([start])
    return np.linspace(start, stop, count)


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    """What a command was asked to do and digests of what it wrote."""

    command: str
    parameters: dict
    master_seed: Optional[int] = None
    tool_version: str = ""
    started: str = field(default_factory=_now)
    finished: str = ""
    outputs: dict = field(default_factory=dict)

    def add_output(self, path: Path, relative_to: Optional[Path] = None) -> None:
        path = Path(path)
        key = path.relative_to(relative_to).as_posix() if relative_to is not None else path.name
        self.outputs[key] = sha256_file(path)

    def verify(self, directory: Path) -> list[str]:
        """Names of outputs whose current digest no longer matches."""
        return [name for name, digest in self.outputs.items() if sha256_file(Path(directory) / name) != digest]

    def write(self, path: Path) -> None:
        self.finished = _now()
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True, default=_jsonable) + "\n", encoding="utf-8")

    @classmethod
    def read(cls, path: Path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


def _jsonable(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")
