"""
Mixture of experts over linear models of z, gated by a network on x.
Unlike CEN it mixes the experts' predictions, not their parameters.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from explain_lab.errors import DimensionError
from explain_lab.models.Classifier import Classifier
from explain_lab.models.Dictionary import Dictionary
from explain_lab.numkit import (
    MlpParams,
    Rng,
    init_mlp,
    log_softmax,
    mlp_backward,
    mlp_forward,
    softmax,
)
from explain_lab.typings import Labels, Matrix, Params

GATE = "gate."


class MoeModel(Classifier):
    kind = "moe"

    @classmethod
    def initialize(
        cls,
        dx: int,
        dz: int,
        n_classes: int,
        n_components: int,
        hidden_sizes: Sequence[int],
        rng: Rng,
    ) -> "MoeModel":
        gate = init_mlp([dx, *hidden_sizes, n_components], rng.derive("encoder"))
        experts = Dictionary.initialize(n_components, dz, n_classes, rng.derive("dictionary"))
        return cls.from_parts(gate, experts)

    @classmethod
    def from_parts(cls, gate: MlpParams, experts: Dictionary) -> "MoeModel":
        return cls({**gate.to_params(GATE), "B": experts.B, "W": experts.W})

    def __init__(self, params: Params) -> None:
        super().__init__(params)
        self._gate = MlpParams.from_params(self._params, GATE)
        self._experts = Dictionary(self._params["B"], self._params["W"])
        if self._gate.out_dim != self._experts.K:
            raise DimensionError(f"gate emits {self._gate.out_dim} logits for {self._experts.K} experts")

    @property
    def gate(self) -> MlpParams:
        return self._gate

    @property
    def experts(self) -> Dictionary:
        return self._experts

    @property
    def n_classes(self) -> int:
        return self._experts.n_classes

    def _expert_logits(self, Z: Matrix) -> Matrix:
        # (n, K, C)
        return self._experts.B[None, :, :] + np.einsum("nd,kdc->nkc", np.atleast_2d(Z), self._experts.W)

    def predict_proba(self, X: Matrix, Z: Matrix) -> Matrix:
        gate_logits, _ = mlp_forward(self._gate, np.atleast_2d(X))
        return np.einsum("nk,nkc->nc", softmax(gate_logits), softmax(self._expert_logits(Z)))

    def loss_and_gradients(self, X: Matrix, Z: Matrix, y: Labels) -> tuple[float, Params]:
        Z = np.atleast_2d(Z)
        y = np.asarray(y, dtype=np.int64).reshape(-1)
        n = y.shape[0]
        rows = np.arange(n)

        gate_logits, cache = mlp_forward(self._gate, np.atleast_2d(X))
        log_gate = log_softmax(gate_logits)
        expert_logp = log_softmax(self._expert_logits(Z))
        joint = log_gate + expert_logp[rows, :, y]
        top = joint.max(axis=1, keepdims=True)
        log_p = top[:, 0] + np.log(np.exp(joint - top).sum(axis=1))
        loss = float(-log_p.mean())

        # posterior responsibility of each expert for the true label
        resp = np.exp(joint - log_p[:, None])
        dS = np.exp(expert_logp) * resp[:, :, None]
        dS[rows, :, y] -= resp
        dS /= n
        dgate = (np.exp(log_gate) - resp) / n
        gate_grads, _ = mlp_backward(self._gate, cache, dgate)
        return loss, {
            **gate_grads.to_params(GATE),
            "B": dS.sum(axis=0),
            "W": np.einsum("nd,nkc->kdc", Z, dS),
        }


def moe_predict(model: MoeModel, x: Matrix, z: Matrix) -> Matrix:
    """
    `sum_k gate_k(x) * softmax(b_k + z @ W_k)` for a single instance
    """

    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.ndim != 1 or z.ndim != 1:
        raise DimensionError("moe_predict takes a single (x, z) pair")
    if z.shape[0] != model.experts.dz:
        raise DimensionError(f"expected {model.experts.dz} features, got {z.shape[0]}")
    return model.predict_proba(x[None, :], z[None, :])[0]
