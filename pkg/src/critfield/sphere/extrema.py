"""Local extrema of pixelized fields."""

import logging
import math

import numpy as np

from critfield.core.errors import ArgumentError
from critfield.core.models import ExtremaCount, FieldSample, SphereGrid

logger = logging.getLogger(__name__)


def _field_values(field: FieldSample | np.ndarray, grid: SphereGrid) -> np.ndarray:
    values = field.values if isinstance(field, FieldSample) else np.asarray(field, dtype=float)
    if values.shape != (grid.npix,):
        raise ArgumentError(f"field has shape {values.shape}, grid has {grid.npix} pixels")
    if not np.all(np.isfinite(values)):
        raise ArgumentError("field values must be finite")
    return values


def count_extrema_above(
    field: FieldSample | np.ndarray, grid: SphereGrid, u: float = -math.inf
) -> ExtremaCount:
    """
    Strict local minima and maxima at or above the level u.

    A pixel is a maximum when it exceeds every neighbor and a minimum when it is
    below every neighbor; a pixel equal to any neighbor is a tie and is neither.
    """
    values = _field_values(field, grid)
    table = grid.neighbor_table
    present = table >= 0
    center = values[:, None]
    neighbor = values[np.where(present, table, 0)]

    is_max = np.all(~present | (center > neighbor), axis=1)
    is_min = np.all(~present | (center < neighbor), axis=1)
    tied = np.any(present & (center == neighbor), axis=1)

    above = values >= u
    n_ties = int(np.count_nonzero(tied))
    if n_ties:
        logger.warning("%d of %d pixels tie with a neighbor", n_ties, grid.npix)
    return ExtremaCount(
        n_min=int(np.count_nonzero(is_min & above)),
        n_max=int(np.count_nonzero(is_max & above)),
        n_ties=n_ties,
    )


def count_extrema(field: FieldSample | np.ndarray, grid: SphereGrid) -> ExtremaCount:
    """Strict local minima and maxima over the whole grid."""
    return count_extrema_above(field, grid)
