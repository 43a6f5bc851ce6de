from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from explain_lab.errors import DimensionError, KernelTooNarrowError, ParameterError
from explain_lab.lime.LimeConfig import LimeConfig
from explain_lab.numkit import Rng
from explain_lab.typings import FeatureFn, Matrix, Predictor, Vector

logger = logging.getLogger(__name__)

MIN_WEIGHT = 1e-6


@dataclass(frozen=True, eq=False)
class Neighborhood:
    """
    Perturbed samples around one instance; row 0 is the instance itself

    Parameters
    ----------
    `Z` `Matrix` `n_samples x dz` interpretable features `z' = phi(x')`
    `targets` `Matrix` `n_samples x C` black-box probabilities `f(x')`
    `weights` `Vector` Kernel weights in (0, 1]
    `sigma` `float` Kernel width used
    """

    Z: Matrix
    targets: Matrix
    weights: Vector
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if not self.Z.shape[0] == self.targets.shape[0] == self.weights.shape[0]:
            raise DimensionError("neighbourhood arrays disagree on the sample count")
        if self.weights.min() <= 0.0 or self.weights.max() > 1.0:
            raise ParameterError("kernel weights must lie in (0, 1]")
        if self.weights.max() <= MIN_WEIGHT:
            raise KernelTooNarrowError("every kernel weight is below 1e-6")

    @property
    def n_samples(self) -> int:
        return self.Z.shape[0]

    @property
    def dz(self) -> int:
        return self.Z.shape[1]

    @property
    def instance(self) -> Vector:
        return self.Z[0]


def sample_neighborhood(
    f: Predictor,
    x: Vector,
    phi: FeatureFn,
    config: LimeConfig,
    rng: Rng | None = None,
) -> Neighborhood:
    """
    Jitter `x` in raw-input space, push the samples through `phi` and weight
    them by the kernel around `z = phi(x)`.

    Parameters
    ----------
    `f` `Predictor` Black box over raw inputs
    `x` `Vector` Instance to explain
    `phi` `FeatureFn` Map from raw inputs to the explanation's features
    `config` `LimeConfig` Sampling and kernel settings
    `rng` `Rng | None` Overrides the stream seeded by `config.seed`

    Raise
    -----
    `KernelTooNarrowError` if every perturbed sample weighs less than 1e-6
    """

    rng = rng or Rng(config.seed)
    x = np.asarray(x, dtype=np.float64)
    low, high = config.input_range
    n = config.n_samples
    jitter = rng.normal(0.0, config.perturb_scale * (high - low), (n, x.shape[0]))
    jitter[0] = 0.0
    X = np.clip(x + jitter, low, high)
    Z = np.atleast_2d(phi(X))
    if n < Z.shape[1] + 1:
        raise ParameterError(f"n_samples={n} is underdetermined for {Z.shape[1]} features")
    targets = np.atleast_2d(f(X))

    sigma = config.kernel.resolve_sigma(Z.shape[1])
    weights = config.kernel.weights(config.kernel.distances(Z[0], Z), Z.shape[1])
    if n > 1 and weights[1:].max() < MIN_WEIGHT:
        raise KernelTooNarrowError(
            f"all perturbed samples weigh < {MIN_WEIGHT} with sigma={sigma:.4g}; use a larger sigma"
        )
    logger.debug("neighbourhood of %d samples, sigma %.4g, mean weight %.4g", n, sigma, weights.mean())
    # underflowed weights would leave (0, 1]
    weights = np.maximum(weights, np.finfo(np.float64).tiny)
    return Neighborhood(Z, targets, weights, sigma)
