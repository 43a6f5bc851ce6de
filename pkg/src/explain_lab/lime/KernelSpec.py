from __future__ import annotations

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from explain_lab.errors import DimensionError
from explain_lab.typings import DistanceKind, Matrix, Vector


class KernelSpec(BaseModel):
    """
    RBF similarity `pi(z') = exp(-D(z, z')^2 / sigma^2)`.

    `sigma = None` resolves to `0.75 * sqrt(dz)`, sized for standardised features.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    distance: DistanceKind = "euclidean"
    sigma: float | None = Field(None, gt=0)

    def resolve_sigma(self, dz: int) -> float:
        return self.sigma if self.sigma is not None else 0.75 * math.sqrt(dz)

    def distances(self, z: Vector, Z: Matrix) -> Vector:
        z = np.asarray(z, dtype=np.float64)
        Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
        if Z.shape[1] != z.shape[0]:
            raise DimensionError(f"reference has {z.shape[0]} features, samples have {Z.shape[1]}")
        if self.distance == "euclidean":
            return np.linalg.norm(Z - z, axis=1)
        norms = np.linalg.norm(Z, axis=1) * np.linalg.norm(z)
        dots = Z @ z
        cosine = np.divide(dots, norms, out=np.ones_like(dots), where=norms > 0)
        # two zero vectors are identical; a zero vector against a non-zero one is orthogonal
        cosine = np.where((norms == 0) & (np.linalg.norm(Z - z, axis=1) > 0), 0.0, cosine)
        return np.clip(1.0 - cosine, 0.0, 2.0)

    def weights(self, distances: Vector, dz: int) -> Vector:
        sigma = self.resolve_sigma(dz)
        return np.exp(-(np.asarray(distances) ** 2) / sigma**2)
