from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from explain_lab.errors import DimensionError, NumericError
from explain_lab.models.LinearExplanation import LinearExplanation
from explain_lab.numkit import Rng
from explain_lab.typings import Matrix

SIMPLEX_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class AttentionVector:
    """
    Simplex-constrained combination weights over the `K` dictionary components
    """

    alpha: Matrix

    def __post_init__(self) -> None:
        alpha = np.asarray(self.alpha, dtype=np.float64)
        if alpha.ndim != 1 or alpha.size == 0:
            raise DimensionError(f"attention must be a non-empty vector, got {alpha.shape}")
        if alpha.min() < 0.0 or abs(alpha.sum() - 1.0) >= SIMPLEX_TOL:
            raise NumericError(f"attention is off the simplex (min={alpha.min()}, sum={alpha.sum()})")
        object.__setattr__(self, "alpha", alpha)

    @property
    def K(self) -> int:
        return self.alpha.shape[0]


@dataclass(frozen=True, eq=False)
class Dictionary:
    """
    Global bank of `K` linear components shared by every explanation

    Parameters
    ----------
    `B` `Matrix` Biases, `K x C`
    `W` `Matrix` Weights, `K x dz x C`
    """

    B: Matrix
    W: Matrix

    def __post_init__(self) -> None:
        B = np.asarray(self.B, dtype=np.float64)
        W = np.asarray(self.W, dtype=np.float64)
        if B.ndim != 2 or W.ndim != 3 or B.shape[0] < 1:
            raise DimensionError(f"dictionary needs B (K, C) and W (K, dz, C), got {B.shape} and {W.shape}")
        if W.shape[0] != B.shape[0] or W.shape[2] != B.shape[1]:
            raise DimensionError(f"B {B.shape} and W {W.shape} disagree on K or C")
        if not (np.isfinite(B).all() and np.isfinite(W).all()):
            raise NumericError("dictionary has non-finite entries")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "W", W)

    @property
    def K(self) -> int:
        return self.B.shape[0]

    @property
    def dz(self) -> int:
        return self.W.shape[1]

    @property
    def n_classes(self) -> int:
        return self.B.shape[1]

    @classmethod
    def initialize(cls, K: int, dz: int, n_classes: int, rng: Rng, scale: float = 0.01) -> "Dictionary":
        """
        Entries from `N(0, scale^2)`; `W` is drawn before `B`
        """

        W = rng.normal(0.0, scale, (K, dz, n_classes))
        B = rng.normal(0.0, scale, (K, n_classes))
        return cls(B, W)

    def component(self, k: int) -> LinearExplanation:
        return LinearExplanation(self.B[k].copy(), self.W[k].copy())

    def combine(self, attention: AttentionVector) -> LinearExplanation:
        """
        `(alpha^T B, alpha^T W)`
        """

        if attention.K != self.K:
            raise DimensionError(f"attention has {attention.K} entries, dictionary {self.K}")
        alpha = attention.alpha
        return LinearExplanation(alpha @ self.B, np.tensordot(alpha, self.W, axes=1))

    def envelope(self) -> tuple[Matrix, Matrix]:
        """
        Elementwise `(min_k W_k, max_k W_k)`
        """

        return self.W.min(axis=0), self.W.max(axis=0)
