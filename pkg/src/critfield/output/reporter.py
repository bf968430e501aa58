"""Report generation: CSV tables, JSON sidecars and field exports."""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Iterable, Optional

from critfield.core.errors import ConfigError
from critfield.core.models import FieldSample, SphereGrid
from critfield.sphere.export import write_adjacency_csv, write_field_binary, write_field_csv

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "experiment",
    "kernel_id",
    "L",
    "d",
    "i",
    "u",
    "resolution",
    "width",
    "quantity",
    "value",
    "stderr",
    "n",
    "regime",
    "version",
    "config_hash",
    "seed",
)

# Row order in every CSV
SORT_COLUMNS = ("experiment", "kernel_id", "quantity", "L", "d", "i", "u", "resolution", "width", "n")


def _sort_key(row: dict) -> tuple:
    return tuple((0, 0) if row.get(col) is None else (1, row[col]) for col in SORT_COLUMNS)


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


class Reporter:
    """Writes experiment output under one directory, stamping provenance on every row."""

    def __init__(
        self,
        output_dir: Path,
        version: str,
        config_hash: str,
        seed: int,
        verbose: bool = False,
    ):
        self.output_dir = Path(output_dir)
        self.version = version
        self.config_hash = config_hash
        self.seed = seed
        self.verbose = verbose
        self.written: list[Path] = []

    def resolve(self, name: str) -> Path:
        """Path of ``name`` inside the output directory; anything escaping it is refused."""
        root = self.output_dir.resolve()
        path = (root / name).resolve()
        if path != root and root not in path.parents:
            raise ConfigError(f"refusing to write {path} outside {root}")
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def _record(self, path: Path) -> Path:
        self.written.append(path)
        logger.info("wrote %s", path)
        return path

    def write_csv(self, name: str, rows: Iterable[dict]) -> Path:
        """Rows sorted by key, fixed column order, provenance columns filled in."""
        path = self.resolve(name)
        stamped = [
            {**row, "version": self.version, "config_hash": self.config_hash, "seed": self.seed}
            for row in rows
        ]
        stamped.sort(key=_sort_key)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in stamped:
                writer.writerow([_format(row.get(col)) for col in CSV_COLUMNS])
        return self._record(path)

    def write_json(self, name: str, data: dict) -> Path:
        path = self.resolve(name)
        payload = {
            "version": self.version,
            "config_hash": self.config_hash,
            "seed": self.seed,
            **_json_safe(data),
        }
        with open(path, "w") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
        return self._record(path)

    def export_field(self, name: str, sample: FieldSample, grid: SphereGrid) -> list[Path]:
        """Binary and CSV copies of a field plus the grid's adjacency."""
        paths = [
            write_field_binary(sample, grid, self.resolve(f"{name}.bin")),
            write_field_csv(sample, grid, self.resolve(f"{name}.csv")),
        ]
        adjacency = self.resolve(f"adjacency_{grid.scheme.value}_{grid.resolution}.csv")
        if not adjacency.exists():
            paths.append(write_adjacency_csv(grid, adjacency))
        return [self._record(p) for p in paths]

    def print_summary(self, title: str, summary: dict, elapsed: Optional[float] = None) -> None:
        """Print a run summary with provenance and the files written."""
        footer = [f"{'seed':<24} {self.seed}", f"{'config hash':<24} {self.config_hash[:16]}"]
        if elapsed is not None:
            footer.append(f"{'elapsed':<24} {elapsed:.1f} s")
        footer += [f"wrote {path}" for path in self.written]
        print_block(title, summary, footer)


def print_block(title: str, items: dict, footer: Iterable[str] = ()) -> None:
    """Print key/value pairs between banner lines; nested dicts are indented."""
    print("\n" + "=" * 50)
    print(title.upper())
    print("=" * 50)
    for key, value in items.items():
        if isinstance(value, dict):
            print(f"{key}:")
            for sub, v in value.items():
                print(f"  {sub:<22} {v}")
        else:
            print(f"{key:<24} {value}")
    footer = list(footer)
    if footer:
        print("-" * 50)
        for line in footer:
            print(line)
    print("=" * 50)
