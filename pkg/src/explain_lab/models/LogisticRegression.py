from __future__ import annotations

import numpy as np

from explain_lab.models.Classifier import Classifier
from explain_lab.models.Dictionary import Dictionary
from explain_lab.models.LinearExplanation import LinearExplanation
from explain_lab.numkit import Rng, softmax, softmax_cross_entropy
from explain_lab.typings import Labels, Matrix, Params


class LogisticRegression(Classifier):
    """
    Multinomial logistic regression on the interpretable features `z`
    """

    kind = "lr"

    @classmethod
    def initialize(cls, dz: int, n_classes: int, rng: Rng) -> "LogisticRegression":
        # same stream and draw order as a one-component dictionary
        single = Dictionary.initialize(1, dz, n_classes, rng.derive("dictionary"))
        return cls({"b": single.B[0], "w": single.W[0]})

    @property
    def n_classes(self) -> int:
        return self._params["b"].shape[0]

    @property
    def explanation(self) -> LinearExplanation:
        return LinearExplanation(self._params["b"], self._params["w"])

    def logits(self, Z: Matrix) -> Matrix:
        return self._params["b"] + np.atleast_2d(Z) @ self._params["w"]

    def predict_proba(self, X: Matrix, Z: Matrix) -> Matrix:
        return softmax(self.logits(Z))

    def loss_and_gradients(self, X: Matrix, Z: Matrix, y: Labels) -> tuple[float, Params]:
        Z = np.atleast_2d(Z)
        loss, g = softmax_cross_entropy(self.logits(Z), y)
        return loss, {"b": g.sum(axis=0), "w": Z.T @ g}
