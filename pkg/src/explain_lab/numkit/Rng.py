"""
Seeded, counter-based random streams
"""

from __future__ import annotations

import zlib
from typing import Sequence

import numpy as np

from explain_lab.typings import Matrix


def _stream_key(key: int | str) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    if key < 0:
        raise ValueError(f"stream keys must be non-negative, got {key}")
    return int(key)


class Rng:
    """
    A thin wrapper around a Philox `numpy.random.Generator`.

    Philox is counter-based, so child streams derived with `derive` are
    independent of how much the parent has already been consumed: a trial
    keyed by `(experiment, condition, trial)` draws the same numbers no
    matter which other trials ran before it or concurrently with it.

    Parameters
    ----------
    `seed` `int` 64-bit seed
    `path` `Sequence[int]` Spawn key of this stream below the root seed
    """

    def __init__(self, seed: int, path: Sequence[int] = ()) -> None:
        self._seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._path = tuple(int(p) for p in path)
        sequence = np.random.SeedSequence(entropy=self._seed, spawn_key=self._path)
        self._generator = np.random.Generator(np.random.Philox(sequence))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def path(self) -> tuple[int, ...]:
        return self._path

    @property
    def generator(self) -> np.random.Generator:
        """
        The underlying generator, for callers that need the full numpy API
        """

        return self._generator

    def derive(self, *keys: int | str) -> "Rng":
        """
        Child stream keyed by `keys`; strings are hashed with CRC-32.
        Deriving never advances this stream.
        """

        return Rng(self._seed, self._path + tuple(_stream_key(k) for k in keys))

    def normal(
        self, loc: float = 0.0, scale: float | Matrix = 1.0, size: int | tuple[int, ...] | None = None
    ) -> Matrix:
        return self._generator.normal(loc, scale, size)

    def uniform(
        self, low: float = 0.0, high: float = 1.0, size: int | tuple[int, ...] | None = None
    ) -> Matrix:
        return self._generator.uniform(low, high, size)

    def integers(self, low: int, high: int, size: int | tuple[int, ...] | None = None) -> np.ndarray:
        return self._generator.integers(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)

    def choice(self, n: int, size: int, replace: bool = False) -> np.ndarray:
        return self._generator.choice(n, size=size, replace=replace)

    def __repr__(self) -> str:
        return f"Rng(seed={self._seed}, path={self._path})"
