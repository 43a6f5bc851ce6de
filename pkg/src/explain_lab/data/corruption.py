"""
The two corruptions of the interpretable representation: calibrated
Gaussian noise and random feature subsampling
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from explain_lab.data.features import FeatureMap, Standardizer
from explain_lab.errors import ParameterError
from explain_lab.numkit import Rng
from explain_lab.typings import Matrix

CLEAN = math.inf


@dataclass(frozen=True)
class CorruptionSpec:
    """
    Parameters
    ----------
    `mode` `"noise" | "subsample"`
    `snr` `float` Signal-to-noise ratio for `noise`; `math.inf` means clean
    `kept_dims` `tuple[int, ...]` Sorted unique columns kept by `subsample`
    `seed` `int` Seed of the noise draw
    """

    mode: Literal["noise", "subsample"]
    snr: float = CLEAN
    kept_dims: tuple[int, ...] = field(default=())
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode == "noise":
            if not self.snr > 0:
                raise ParameterError(f"snr must be positive, got {self.snr}")
        elif self.mode == "subsample":
            dims = tuple(int(d) for d in self.kept_dims)
            if not dims:
                raise ParameterError("kept_dims must not be empty")
            if list(dims) != sorted(set(dims)) or dims[0] < 0:
                raise ParameterError("kept_dims must be sorted, unique and non-negative")
            object.__setattr__(self, "kept_dims", dims)
        else:
            raise ParameterError(f"unknown corruption mode {self.mode!r}")

    def validate_for(self, dz: int) -> None:
        if self.mode == "subsample" and self.kept_dims[-1] >= dz:
            raise ParameterError(f"kept dimension {self.kept_dims[-1]} out of range for dz={dz}")

    def apply(self, Z: Matrix) -> Matrix:
        self.validate_for(Z.shape[1])
        if self.mode == "noise":
            return inject_noise(Z, self.snr, self.seed)
        return subsample_features(Z, self.kept_dims)


def noise_std(Z: Matrix, snr: float) -> np.ndarray:
    """
    Per-column noise standard deviation, `sqrt(Var(Z[:, j]) / snr)`
    """

    if not snr > 0:
        raise ParameterError(f"snr must be positive, got {snr}")
    if math.isinf(snr):
        return np.zeros(Z.shape[1])
    return np.sqrt(np.asarray(Z, dtype=np.float64).var(axis=0) / snr)


def inject_noise(Z: Matrix, snr: float, seed: int, std: np.ndarray | None = None) -> Matrix:
    """
    Add zero-mean Gaussian noise whose per-column variance is `Var(Z column) / snr`.

    Parameters
    ----------
    `Z` `Matrix` Features; never modified
    `snr` `float` Signal-to-noise ratio, > 0; `math.inf` returns a copy of `Z`
    `seed` `int` Seed of the draw
    `std` `np.ndarray | None` Precomputed per-column std (e.g. calibrated on
    the training split); computed from `Z` when omitted

    Raise
    -----
    `ParameterError` if `snr <= 0`
    """

    if not snr > 0:
        raise ParameterError(f"snr must be positive, got {snr}")
    Z = np.asarray(Z, dtype=np.float64)
    if math.isinf(snr):
        return Z.copy()
    std = noise_std(Z, snr) if std is None else np.asarray(std, dtype=np.float64)
    return Z + Rng(seed).normal(0.0, 1.0, Z.shape) * std


def subsample_features(Z: Matrix, kept_dims: Sequence[int]) -> Matrix:
    """
    Columns `kept_dims` of `Z`, in that order; rows are never reordered
    """

    kept = np.asarray(kept_dims, dtype=np.int64)
    if kept.size == 0:
        raise ParameterError("kept_dims must not be empty")
    if kept.min() < 0 or kept.max() >= Z.shape[1]:
        raise ParameterError(f"kept_dims out of range for {Z.shape[1]} columns")
    return np.asarray(Z, dtype=np.float64)[:, kept]


def random_kept_dims(dz: int, fraction: float, seed: int) -> tuple[int, ...]:
    """
    Sorted random subset of `max(1, round(fraction * dz))` columns
    """

    if not 0.0 < fraction <= 1.0:
        raise ParameterError(f"fraction must lie in (0, 1], got {fraction}")
    count = max(1, int(round(fraction * dz)))
    return tuple(int(d) for d in np.sort(Rng(seed).choice(dz, count)))


@dataclass(frozen=True, eq=False)
class CorruptedFeatureMap:
    """
    `phi` followed by the corruption of an experiment condition and the
    clean-train standardisation, so that perturbed raw inputs land in the
    same (corrupted) representation the models are trained on.

    Parameters
    ----------
    `base` `FeatureMap` Clean feature map
    `standardizer` `Standardizer` Clean-train statistics of the full `Z`
    `kept_dims` `tuple[int, ...] | None` Columns kept, if subsampling
    `std` `np.ndarray | None` Per-column noise std, if noisy
    `rng` `Rng | None` Stream for fresh noise draws
    """

    base: FeatureMap
    standardizer: Standardizer
    kept_dims: tuple[int, ...] | None = None
    std: np.ndarray | None = None
    rng: Rng | None = None

    def __call__(self, X: Matrix) -> Matrix:
        Z = self.base(X)
        if self.std is not None:
            rng = self.rng if self.rng is not None else Rng(0)
            Z = Z + rng.normal(0.0, 1.0, Z.shape) * self.std
        Z = self.standardizer(Z)
        if self.kept_dims is not None:
            Z = Z[:, list(self.kept_dims)]
        return Z

    def bound(self, rng: Rng) -> "CorruptedFeatureMap":
        """
        Same map drawing its noise from `rng`
        """

        return CorruptedFeatureMap(self.base, self.standardizer, self.kept_dims, self.std, rng)
