"""Pixelizations of S^2 with symmetric neighbor adjacency."""

import logging
import math

import healpy as hp
import numpy as np
from scipy import sparse
from scipy.spatial import ConvexHull

from critfield.core.constants import HEALPIX_MAX_ORDER, ICOSPHERE_MAX_SUBDIVISIONS
from critfield.core.errors import ArgumentError
from critfield.core.models import GridScheme, SphereGrid

logger = logging.getLogger(__name__)


def _symmetric_adjacency(rows: np.ndarray, cols: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """CSR indptr/indices of the symmetric closure of (rows, cols), without self loops."""
    keep = rows != cols
    rows, cols = rows[keep], cols[keep]
    data = np.ones(len(rows), dtype=np.int8)
    adj = sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    adj = (adj + adj.T).tocsr()
    adj.sum_duplicates()
    adj.sort_indices()
    return adj.indptr.astype(np.int64), adj.indices.astype(np.int64)


def _healpix_grid(order: int) -> SphereGrid:
    nside = 2**order
    npix = hp.nside2npix(nside)
    pixels = np.arange(npix)
    centers = np.column_stack(hp.pix2vec(nside, pixels, nest=False))

    # RING order; (8, npix), -1 where a neighbor does not exist
    neighbours = hp.get_all_neighbours(nside, pixels, nest=False)
    rows = np.broadcast_to(pixels, neighbours.shape).ravel()
    cols = neighbours.ravel()
    valid = cols >= 0
    indptr, indices = _symmetric_adjacency(rows[valid], cols[valid], npix)
    return SphereGrid(GridScheme.HEALPIX, order, centers, indptr, indices)


def _icosahedron() -> tuple[np.ndarray, np.ndarray]:
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    vertices = []
    for s1 in (-1.0, 1.0):
        for s2 in (-1.0, 1.0):
            vertices += [(0.0, s1, s2 * phi), (s1, s2 * phi, 0.0), (s2 * phi, 0.0, s1)]
    vertices = np.array(vertices)
    vertices /= np.linalg.norm(vertices, axis=1, keepdims=True)
    return vertices, ConvexHull(vertices).simplices


def _subdivide(vertices: np.ndarray, faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split every triangle into four, projecting edge midpoints onto the sphere."""
    edges = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    edges.sort(axis=1)
    unique, inverse = np.unique(edges, axis=0, return_inverse=True)
    inverse = inverse.ravel()

    midpoints = vertices[unique[:, 0]] + vertices[unique[:, 1]]
    midpoints /= np.linalg.norm(midpoints, axis=1, keepdims=True)
    mid = (len(vertices) + inverse).reshape(3, -1)
    ab, bc, ca = mid
    a, b, c = faces.T
    new_faces = np.concatenate(
        [
            np.column_stack([a, ab, ca]),
            np.column_stack([b, bc, ab]),
            np.column_stack([c, ca, bc]),
            np.column_stack([ab, bc, ca]),
        ]
    )
    return np.concatenate([vertices, midpoints]), new_faces


def _icosphere_grid(subdivisions: int) -> SphereGrid:
    vertices, faces = _icosahedron()
    for _ in range(subdivisions):
        vertices, faces = _subdivide(vertices, faces)
    edges = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    indptr, indices = _symmetric_adjacency(edges[:, 0], edges[:, 1], len(vertices))
    return SphereGrid(GridScheme.ICOSPHERE, subdivisions, vertices, indptr, indices)


def build_grid(scheme: GridScheme | str, resolution: int) -> SphereGrid:
    """
    Build a pixelization of S^2.

    Args:
        scheme: HEALPix (RING ordering, nside = 2**resolution) or icosphere.
        resolution: HEALPix order r in [0, 13] or icosphere subdivisions in [0, 9].

    Returns:
        SphereGrid with unit-norm centers and a symmetric neighbor relation.
    """
    try:
        scheme = GridScheme(scheme)
    except ValueError as e:
        raise ArgumentError(f"unknown grid scheme {scheme!r}") from e

    match scheme:
        case GridScheme.HEALPIX:
            if not 0 <= resolution <= HEALPIX_MAX_ORDER:
                raise ArgumentError(
                    f"HEALPix order must lie in [0, {HEALPIX_MAX_ORDER}], got {resolution}"
                )
            grid = _healpix_grid(resolution)
        case GridScheme.ICOSPHERE:
            if not 0 <= resolution <= ICOSPHERE_MAX_SUBDIVISIONS:
                raise ArgumentError(
                    f"icosphere subdivisions must lie in [0, {ICOSPHERE_MAX_SUBDIVISIONS}], "
                    f"got {resolution}"
                )
            grid = _icosphere_grid(resolution)

    logger.info("built %s grid at resolution %d with %d pixels", scheme.value, resolution, grid.npix)
    return grid
