from __future__ import annotations

from typing import Any, Sequence

from explain_lab.models.Classifier import Classifier
from explain_lab.numkit import MlpParams, Rng, init_mlp, mlp_backward, mlp_forward, softmax, softmax_cross_entropy
from explain_lab.typings import Labels, Matrix, Params


class MlpClassifier(Classifier):
    """
    The deep baseline: a ReLU network on the raw inputs `x` that never sees `z`
    """

    kind = "mlp"

    @classmethod
    def initialize(
        cls, dx: int, n_classes: int, hidden_sizes: Sequence[int], rng: Rng
    ) -> "MlpClassifier":
        net = init_mlp([dx, *hidden_sizes, n_classes], rng.derive("network"))
        return cls(net.to_params())

    def __init__(self, params: Params) -> None:
        super().__init__(params)
        self._net = MlpParams.from_params(self._params)

    @property
    def network(self) -> MlpParams:
        return self._net

    @property
    def n_classes(self) -> int:
        return self._net.out_dim

    def predict_proba(self, X: Matrix, Z: Matrix | None = None) -> Matrix:
        logits, _ = mlp_forward(self._net, X)
        return softmax(logits)

    def loss_and_gradients(self, X: Matrix, Z: Matrix, y: Labels) -> tuple[float, Params]:
        logits, cache = mlp_forward(self._net, X)
        loss, g = softmax_cross_entropy(logits, y)
        grads, _ = mlp_backward(self._net, cache, g)
        return loss, grads.to_params()
