from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from explain_lab.errors import DimensionError, ParameterError
from explain_lab.typings import FeatureKind, Labels, Matrix, Split


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Raw inputs `X`, interpretable features `Z` and labels `y` of one split.

    Parameters
    ----------
    `X` `Matrix` `n x dx` raw inputs, pixel intensities in [0, 1] for images
    `Z` `Matrix` `n x dz` interpretable features, `z = phi(x)` row by row
    `y` `Labels` `n` integer labels in `[0, n_classes)`
    `n_classes` `int` Number of classes `C`
    `feature_kind` `FeatureKind` How `Z` was derived: `pxl`, `hog` or `synthetic`
    `split` `Split` `train`, `val` or `test`
    """

    X: Matrix
    Z: Matrix
    y: Labels
    n_classes: int
    feature_kind: FeatureKind = "synthetic"
    split: Split = "train"

    def __post_init__(self) -> None:
        X = np.asarray(self.X, dtype=np.float64)
        Z = np.asarray(self.Z, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        if X.ndim != 2 or Z.ndim != 2:
            raise DimensionError(f"X and Z must be matrices, got {X.shape} and {Z.shape}")
        if not X.shape[0] == Z.shape[0] == y.shape[0]:
            raise DimensionError(
                f"row counts differ: X has {X.shape[0]}, Z has {Z.shape[0]}, y has {y.shape[0]}"
            )
        if self.n_classes < 1:
            raise ParameterError(f"n_classes must be positive, got {self.n_classes}")
        if y.size and (y.min() < 0 or y.max() >= self.n_classes):
            raise ParameterError(f"labels must lie in [0, {self.n_classes})")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def dx(self) -> int:
        return self.X.shape[1]

    @property
    def dz(self) -> int:
        return self.Z.shape[1]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return (
            f"Dataset(split={self.split}, n={self.n}, dx={self.dx}, dz={self.dz}, "
            f"C={self.n_classes}, features={self.feature_kind})"
        )

    def take(self, indices: np.ndarray) -> "Dataset":
        """
        Rows `indices`, in the given order
        """

        indices = np.asarray(indices, dtype=np.int64)
        return replace(self, X=self.X[indices], Z=self.Z[indices], y=self.y[indices])

    def head(self, count: int) -> "Dataset":
        return self.take(np.arange(min(count, self.n)))

    def with_features(self, Z: Matrix, feature_kind: FeatureKind | None = None) -> "Dataset":
        return replace(self, Z=Z, feature_kind=feature_kind or self.feature_kind)

    def with_split(self, split: Split) -> "Dataset":
        return replace(self, split=split)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)
