"""Deterministic chunked Monte Carlo over a process pool."""

import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Any, Callable, Optional, Union

import numpy as np

from critfield.core.models import GOIEstimate

logger = logging.getLogger(__name__)

RNGLike = Union[int, np.random.Generator, None]

_default_workers = 1


def set_default_workers(max_workers: Optional[int]) -> None:
    """Set the worker count used when a sampler is built without one (0 or None: all CPUs)."""
    global _default_workers
    _default_workers = max_workers or os.cpu_count() or 4


def default_workers() -> int:
    return _default_workers


def resolve_seed(rng: RNGLike) -> int:
    """Turn an int seed, a Generator or None into a 64-bit master seed."""
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(0, 2**63))
    if rng is None:
        return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
    return int(rng)


def derive_seed(master_seed: int, *keys: int) -> int:
    """Seed of the substream of ``master_seed`` addressed by ``keys``."""
    state = np.random.SeedSequence(master_seed, spawn_key=keys).generate_state(1, np.uint64)
    return int(state[0])


def chunk_sizes(n: int, chunk_size: int) -> list[int]:
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


@dataclass(frozen=True)
class MomentAccumulator:
    """Sample count, sum and sum of squares; merging is associative."""

    count: int = 0
    total: float = 0.0
    total_sq: float = 0.0

    @classmethod
    def of(cls, values: np.ndarray) -> "MomentAccumulator":
        return cls(len(values), float(np.sum(values)), float(np.sum(values * values)))

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        return MomentAccumulator(
            self.count + other.count, self.total + other.total, self.total_sq + other.total_sq
        )

    def estimate(self) -> GOIEstimate:
        mean = self.total / self.count
        if self.count < 2:
            return GOIEstimate(mean, float("nan"), self.count)
        var = max(self.total_sq / self.count - mean * mean, 0.0) * self.count / (self.count - 1)
        return GOIEstimate(mean, float(np.sqrt(var / self.count)), self.count)


class ParallelSampler:
    """Runs seeded work chunks in worker processes and returns results in chunk order."""

    def __init__(
        self,
        max_workers: Optional[int] = None,
        progress_callback: Optional[Callable[[int, int], None]] = None,
    ):
        """
        Initialize the sampler.

        Args:
            max_workers: Maximum number of worker processes. Defaults to the
                package-wide setting (1 unless the CLI raised it).
            progress_callback: Optional callback(completed, total) for progress updates.
        """
        self.max_workers = max_workers or default_workers()
        self.progress_callback = progress_callback

    def map_chunks(
        self,
        fn: Callable[..., Any],
        sizes: list[int],
        master_seed: int,
        *args: Any,
    ) -> list[Any]:
        """
        Call ``fn(size, seed, *args)`` once per chunk.

        Chunk ``k`` receives the seed of substream ``k`` of ``master_seed``, so
        the results do not depend on the number of workers.
        """
        seeds = [derive_seed(master_seed, k) for k in range(len(sizes))]
        total = len(sizes)
        results: list[Any] = [None] * total

        if self.max_workers <= 1 or total <= 1:
            for k, (size, seed) in enumerate(zip(sizes, seeds)):
                results[k] = fn(size, seed, *args)
                if self.progress_callback:
                    self.progress_callback(k + 1, total)
            return results

        completed = 0
        with ProcessPoolExecutor(max_workers=self.max_workers) as executor:
            futures = {
                executor.submit(fn, size, seed, *args): k
                for k, (size, seed) in enumerate(zip(sizes, seeds))
            }
            for future in as_completed(futures):
                results[futures[future]] = future.result()
                completed += 1
                if self.progress_callback:
                    self.progress_callback(completed, total)

        logger.debug("ran %d chunks on %d workers", total, self.max_workers)
        return results

    def estimate(
        self,
        fn: Callable[..., MomentAccumulator],
        n: int,
        chunk_size: int,
        master_seed: int,
        *args: Any,
    ) -> GOIEstimate:
        """Reduce per-chunk moment accumulators into one estimate."""
        parts = self.map_chunks(fn, chunk_sizes(n, chunk_size), master_seed, *args)
        acc = MomentAccumulator()
        for part in parts:
            acc = acc.merge(part)
        return acc.estimate()
