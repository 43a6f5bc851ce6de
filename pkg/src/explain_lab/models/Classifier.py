"""
Common interface of the model zoo
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, ClassVar

import numpy as np

from explain_lab.errors import DimensionError
from explain_lab.typings import FeatureFn, Labels, Matrix, ModelKind, Params, Predictor


class Classifier(ABC):
    """
    A probabilistic classifier over raw inputs `X` and interpretable features `Z`.

    Instances are immutable: training produces new instances through
    `with_params`, so trained models can be shared across threads.
    """

    kind: ClassVar[ModelKind]

    def __init__(self, params: Params) -> None:
        self._params: Params = {k: np.array(v, dtype=np.float64) for k, v in params.items()}
        for name, value in self._params.items():
            value.setflags(write=False)

    @property
    def params(self) -> Params:
        return dict(self._params)

    @params.setter
    def params(self, value: Params) -> None:
        raise AttributeError("params is read-only, use with_params")

    def with_params(self, params: Params) -> "Classifier":
        if params.keys() != self._params.keys():
            raise DimensionError(f"expected parameters {sorted(self._params)}, got {sorted(params)}")
        return type(self)(params, **self.hyper())

    def hyper(self) -> dict[str, Any]:
        """
        Constructor keywords other than the parameters (stored in checkpoints)
        """

        return {}

    @staticmethod
    def penalized(name: str) -> bool:
        """
        L2 applies to weight matrices only, never to biases
        """

        return name.rsplit(".", 1)[-1][:1] in ("W", "w")

    @property
    @abstractmethod
    def n_classes(self) -> int: ...

    @abstractmethod
    def predict_proba(self, X: Matrix, Z: Matrix) -> Matrix:
        """
        Class probabilities for a batch of rows
        """

    @abstractmethod
    def loss_and_gradients(self, X: Matrix, Z: Matrix, y: Labels) -> tuple[float, Params]:
        """
        Mean cross-entropy over the batch and its gradient w.r.t. every parameter
        """

    def penalized_loss_and_gradients(
        self, X: Matrix, Z: Matrix, y: Labels, l2_penalty: float
    ) -> tuple[float, Params]:
        loss, grads = self.loss_and_gradients(X, Z, y)
        if l2_penalty > 0:
            for name, value in self._params.items():
                if self.penalized(name):
                    loss += 0.5 * l2_penalty * float((value * value).sum())
                    grads[name] = grads[name] + l2_penalty * value
        return loss, grads

    def predictor(self, feature_map: FeatureFn) -> Predictor:
        """
        Black box over raw inputs only, `x -> p(y | x, phi(x))`
        """

        return lambda X: self.predict_proba(X, feature_map(X))
