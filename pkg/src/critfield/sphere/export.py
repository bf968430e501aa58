"""Field and grid export for inspection outside the package."""

import csv
import json
from pathlib import Path

import numpy as np

from critfield.core.errors import ArgumentError
from critfield.core.models import AngularSpectrum, FieldSample, SphereGrid


def _source_dict(sample: FieldSample) -> dict:
    if isinstance(sample.source, AngularSpectrum):
        return {"kind": "spectral", "lmax": sample.source.lmax, "depth": sample.source.depth}
    return {"kind": "finite_width", **sample.source.to_dict()}


def field_header(sample: FieldSample, grid: SphereGrid) -> dict:
    return {
        "scheme": grid.scheme.value,
        "resolution": grid.resolution,
        "npix": grid.npix,
        "seed": sample.seed,
        "source": _source_dict(sample),
        "dtype": "<f8",
    }


def write_field_binary(sample: FieldSample, grid: SphereGrid, path: Path) -> Path:
    """One JSON header line followed by the values as little-endian float64."""
    if len(sample.values) != grid.npix:
        raise ArgumentError(f"field has {len(sample.values)} values, grid has {grid.npix} pixels")
    path = Path(path)
    with open(path, "wb") as f:
        f.write(json.dumps(field_header(sample, grid), sort_keys=True).encode() + b"\n")
        f.write(np.asarray(sample.values, dtype="<f8").tobytes())
    return path


def read_field_binary(path: Path) -> tuple[dict, np.ndarray]:
    with open(path, "rb") as f:
        header = json.loads(f.readline())
        values = np.frombuffer(f.read(), dtype="<f8")
    if len(values) != header["npix"]:
        raise ArgumentError(f"{path}: expected {header['npix']} values, found {len(values)}")
    return header, values


def write_field_csv(sample: FieldSample, grid: SphereGrid, path: Path) -> Path:
    """Columns pixel, x, y, z, value."""
    if len(sample.values) != grid.npix:
        raise ArgumentError(f"field has {len(sample.values)} values, grid has {grid.npix} pixels")
    path = Path(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["pixel", "x", "y", "z", "value"])
        for pixel, (center, value) in enumerate(zip(grid.centers, sample.values)):
            writer.writerow([pixel, *(repr(float(c)) for c in center), repr(float(value))])
    return path


def write_adjacency_csv(grid: SphereGrid, path: Path) -> Path:
    """One row per directed neighbor pair: pixel, neighbor."""
    path = Path(path)
    pixels = np.repeat(np.arange(grid.npix), grid.degrees())
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["pixel", "neighbor"])
        writer.writerows(zip(pixels.tolist(), grid.neighbor_indices.tolist()))
    return path
