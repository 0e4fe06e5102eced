"""
Bernoulli noise for the RDS.

A NoiseProcess is an indexed, reproducible sequence of i.i.d. draws
j_0, j_1, ... with P(j) = q_j. Draws are produced in fixed-size blocks, each
from its own numpy generator seeded by SeedSequence(seed, spawn_key=(trial,
stream, block)); any draw can be read without replaying earlier ones, and the
result does not depend on how the reads are split.

Independent streams share the seed:
    FORWARD   the draws for times 0, 1, 2, ...
    BACKWARD  the draws for times -1, -2, ... used by pullback products
    Y         the uniform y-coordinates of interference patterns
    SPHERE    random sphere points for the sampled pullback supremum
"""
from enum import IntEnum
from typing import Dict, Sequence, Tuple

import numpy as np

from . import rds_logging as logging

logger = logging.getLogger(__name__)

BLOCK_SIZE = 1024


class Stream(IntEnum):
    FORWARD = 0
    BACKWARD = 1
    Y = 2
    SPHERE = 3


def make_generator(seed: int, spawn_key: Tuple[int, ...], bit_generator: str = "PCG64") -> np.random.Generator:
    """numpy Generator over the named bit generator, seeded from (seed, spawn_key)."""
    seed_seq = np.random.SeedSequence(entropy=seed, spawn_key=spawn_key)
    return np.random.Generator(getattr(np.random, bit_generator)(seed_seq))


class NoiseProcess:
    """Two-sided Bernoulli draws for one trial of one spec."""

    def __init__(self, probabilities: Sequence[float], seed: int, trial: int = 0,
                 bit_generator: str = "PCG64"):
        probs = np.asarray(probabilities, dtype=float)
        if probs.ndim != 1 or probs.size == 0 or np.any(probs <= 0):
            raise ValueError(f"probabilities must be a non-empty list of positive numbers, got {probabilities}")
        self.probabilities = probs / probs.sum()
        self.m = probs.size
        self.seed = seed
        self.trial = trial
        self.bit_generator = bit_generator
        self._blocks: Dict[Tuple[int, int], np.ndarray] = {}

    @classmethod
    def from_spec(cls, spec, trial: int = 0) -> "NoiseProcess":
        return cls(spec.probability_floats(), spec.seed, trial, spec.bit_generator)

    def _generator(self, stream: Stream, block: int) -> np.random.Generator:
        return make_generator(self.seed, (self.trial, int(stream), block), self.bit_generator)

    def _block(self, stream: Stream, block: int) -> np.ndarray:
        key = (int(stream), block)
        if key not in self._blocks:
            rng = self._generator(stream, block)
            if stream in (Stream.FORWARD, Stream.BACKWARD):
                self._blocks[key] = rng.choice(self.m, size=BLOCK_SIZE, p=self.probabilities)
            else:
                self._blocks[key] = rng.random(BLOCK_SIZE)
        return self._blocks[key]

    def _read(self, stream: Stream, start: int, count: int) -> np.ndarray:
        if start < 0 or count < 0:
            raise ValueError(f"stream positions must be non-negative, got start={start}, count={count}")
        if count == 0:
            return np.zeros(0, dtype=np.int64 if stream in (Stream.FORWARD, Stream.BACKWARD) else float)
        first, last = start // BLOCK_SIZE, (start + count - 1) // BLOCK_SIZE
        data = np.concatenate([self._block(stream, b) for b in range(first, last + 1)])
        offset = start - first * BLOCK_SIZE
        return data[offset:offset + count]

    def forward(self, start: int, count: int) -> np.ndarray:
        """0-based map indices drawn at times start, ..., start+count-1."""
        return self._read(Stream.FORWARD, start, count)

    def backward(self, count: int) -> np.ndarray:
        """0-based map indices drawn at times -1, ..., -count, in that order."""
        return self._read(Stream.BACKWARD, 0, count)

    def uniform(self, start: int, count: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        """Uniform samples on [low, high) from the y stream."""
        return low + (high - low) * self._read(Stream.Y, start, count)

    def sphere_digits(self, count: int, p: int, K: int) -> np.ndarray:
        """count x K little-endian digit rows of uniform sphere points (first digit nonzero)."""
        rng = self._generator(Stream.SPHERE, 0)
        digits = rng.integers(0, p, size=(count, K))
        digits[:, 0] = rng.integers(1, p, size=count)
        return digits
