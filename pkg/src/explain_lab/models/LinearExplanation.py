from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from explain_lab.errors import DimensionError, NumericError
from explain_lab.numkit import softmax
from explain_lab.typings import Matrix


@dataclass(frozen=True, eq=False)
class LinearExplanation:
    """
    A linear model over interpretable features, `g(z) = b + z @ w`, one
    column of `w` per class.

    Parameters
    ----------
    `b` `Matrix` Per-class bias, shape `(C,)`
    `w` `Matrix` Weights, shape `(dz, C)`
    """

    b: Matrix
    w: Matrix

    def __post_init__(self) -> None:
        b = np.asarray(self.b, dtype=np.float64)
        w = np.asarray(self.w, dtype=np.float64)
        if b.ndim != 1 or w.ndim != 2 or w.shape[1] != b.shape[0]:
            raise DimensionError(f"bias {b.shape} does not match weights {w.shape}")
        if not (np.isfinite(b).all() and np.isfinite(w).all()):
            raise NumericError("explanation has non-finite entries")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "w", w)

    @property
    def dz(self) -> int:
        return self.w.shape[0]

    @property
    def n_classes(self) -> int:
        return self.b.shape[0]

    def apply(self, z: Matrix) -> Matrix:
        """
        Linear outputs `b + z @ w` for one feature vector or a batch of rows
        """

        z = np.asarray(z, dtype=np.float64)
        if z.shape[-1] != self.dz:
            raise DimensionError(f"explanation expects {self.dz} features, got {z.shape[-1]}")
        return self.b + z @ self.w

    def predict_proba(self, z: Matrix) -> Matrix:
        return softmax(self.apply(z))

    def nonzero_count(self, tol: float = 0.0) -> int:
        return int((np.abs(self.w) > tol).sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearExplanation):
            return NotImplemented
        return np.array_equal(self.b, other.b) and np.array_equal(self.w, other.w)
