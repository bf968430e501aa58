"""Tests for seeding and chunked reduction."""

import math

import numpy as np
import pytest

from critfield.core.parallel import (
    MomentAccumulator,
    ParallelSampler,
    chunk_sizes,
    derive_seed,
    resolve_seed,
)


def _draw(size, seed, scale):
    return scale * np.random.default_rng(seed).standard_normal(size)


def test_chunk_sizes():
    assert chunk_sizes(10, 4) == [4, 4, 2]
    assert chunk_sizes(8, 4) == [4, 4]
    assert sum(chunk_sizes(123_457, 50_000)) == 123_457


def test_derive_seed():
    assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
    assert derive_seed(7, 1, 2) != derive_seed(7, 2, 1)
    assert derive_seed(7, 0) != derive_seed(8, 0)


def test_resolve_seed():
    assert resolve_seed(42) == 42
    assert resolve_seed(np.random.default_rng(0)) == resolve_seed(np.random.default_rng(0))
    assert 0 <= resolve_seed(None) < 2**64


def test_moment_accumulator():
    values = np.arange(10.0)
    merged = MomentAccumulator.of(values[:3]).merge(MomentAccumulator.of(values[3:]))
    estimate = merged.estimate()
    assert estimate.mean == pytest.approx(4.5)
    assert estimate.stderr == pytest.approx(values.std(ddof=1) / math.sqrt(10))
    assert estimate.n_samples == 10
    assert math.isnan(MomentAccumulator.of(np.ones(1)).estimate().stderr)
    # rounding in the raw second moment must not make the variance negative
    assert MomentAccumulator.of(np.full(7, 0.1)).estimate().stderr == pytest.approx(0.0, abs=1e-9)


def test_map_chunks_order():
    sizes = [5, 5, 3]
    first = ParallelSampler(1).map_chunks(_draw, sizes, 11, 2.0)
    second = ParallelSampler(1).map_chunks(_draw, sizes, 11, 2.0)
    assert [len(part) for part in first] == sizes
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a, b)


def test_progress_callback():
    seen = []
    ParallelSampler(1, progress_callback=lambda done, total: seen.append((done, total))).map_chunks(
        _draw, [2, 2], 0, 1.0
    )
    assert seen == [(1, 2), (2, 2)]
