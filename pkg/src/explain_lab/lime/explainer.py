"""
Post-hoc linear explanations of a black box, fit on a kernel-weighted
neighbourhood of the instance
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from explain_lab.data import Dataset
from explain_lab.errors import DimensionError, ParameterError
from explain_lab.lime.LimeConfig import LimeConfig
from explain_lab.lime.Neighborhood import Neighborhood, sample_neighborhood
from explain_lab.lime.solvers import select_then_refit, weighted_elastic_net, weighted_ridge
from explain_lab.models import LinearExplanation
from explain_lab.numkit import Rng, argmax_lowest
from explain_lab.typings import FeatureFn, Matrix, Predictor, Vector

logger = logging.getLogger(__name__)


class LimeResult(NamedTuple):
    explanation: LinearExplanation
    neighborhood: Neighborhood


def fit_explanation(neighborhood: Neighborhood, config: LimeConfig) -> LinearExplanation:
    """
    Minimise `sum pi (f(x') - g(z'))^2 + l1 ||w||_1 + ridge ||w||^2` over the
    neighbourhood, one regression per class on the black box's probabilities.

    With `max_features` set, features are first chosen on the L1 path and the
    chosen ones refit with ridge.

    Raise
    -----
    `IllConditionedError` if the weighted design is singular and `ridge_penalty == 0`
    """

    Z, Y, pi = neighborhood.Z, neighborhood.targets, neighborhood.weights
    if config.max_features is not None:
        b, w = select_then_refit(Z, Y, pi, config.max_features, config.ridge_penalty)
    elif config.l1_penalty > 0:
        b, w = weighted_elastic_net(Z, Y, pi, config.l1_penalty, config.ridge_penalty)
    else:
        b, w = weighted_ridge(Z, Y, pi, config.ridge_penalty)
    return LinearExplanation(b, w)


class LimeExplainer:
    """
    Parameters
    ----------
    `f` `Predictor` Black box over raw inputs, returning class probabilities;
    must be safe to call concurrently if explanations run in parallel
    `phi` `FeatureFn` Map from raw inputs to interpretable features
    `config` `LimeConfig` Sampling, kernel and penalty settings
    """

    def __init__(self, f: Predictor, phi: FeatureFn, config: LimeConfig | None = None) -> None:
        self.f = f
        self.phi = phi
        self.config = config or LimeConfig()

    def explain_instance(self, x: Vector, rng: Rng | None = None) -> LimeResult:
        neighborhood = sample_neighborhood(self.f, x, self.phi, self.config, rng)
        return LimeResult(fit_explanation(neighborhood, self.config), neighborhood)

    def explain(self, x: Vector, rng: Rng | None = None) -> LinearExplanation:
        return self.explain_instance(x, rng).explanation


def explain(f: Predictor, x: Vector, phi: FeatureFn, config: LimeConfig) -> LinearExplanation:
    """
    `sample_neighborhood` followed by `fit_explanation`; deterministic in `config.seed`
    """

    return LimeExplainer(f, phi, config).explain(x)


def fidelity(
    explanation: LinearExplanation,
    f: Predictor | None,
    data: Dataset | Neighborhood,
) -> float:
    """
    Fraction of points on which `argmax g(z)` agrees with `argmax f(x)`.

    On a `Neighborhood` the stored black-box targets are used and `f` may be `None`.

    Raise
    -----
    `ParameterError` on an empty evaluation set
    """

    if isinstance(data, Neighborhood):
        Z, reference = data.Z, data.targets
    else:
        if f is None:
            raise ParameterError("fidelity over a dataset needs the black box")
        Z, reference = data.Z, (f(data.X) if data.n else np.empty((0, explanation.n_classes)))
    if Z.shape[0] == 0:
        raise ParameterError("cannot measure fidelity on an empty set")
    agree = argmax_lowest(explanation.apply(Z)) == argmax_lowest(reference)
    return float(agree.mean())


def local_consistency(
    explanation: LinearExplanation, f: Predictor, x: Vector, phi: FeatureFn
) -> float:
    """
    `max_c |g_x(phi(x))_c - f(x)_c|`, zero when the explanation reproduces the prediction exactly
    """

    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    return float(np.abs(explanation.apply(phi(x))[0] - f(x)[0]).max())


def weighted_r2(neighborhood: Neighborhood, explanation: LinearExplanation) -> float:
    """
    Kernel-weighted coefficient of determination of the surrogate, pooled over classes
    """

    pi = neighborhood.weights[:, None]
    Y = neighborhood.targets
    if Y.shape[1] != explanation.n_classes:
        raise DimensionError("explanation and neighbourhood disagree on the class count")
    residual = float((pi * (Y - explanation.apply(neighborhood.Z)) ** 2).sum())
    mean = (pi * Y).sum(axis=0) / pi.sum()
    total = float((pi * (Y - mean) ** 2).sum())
    return 1.0 - residual / total if total > 0 else (1.0 if residual == 0 else 0.0)
