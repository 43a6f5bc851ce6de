"""
Contextual explanation network: an encoder attends over a global dictionary
of linear models and the prediction is the attended explanation applied to z
"""

from __future__ import annotations

from typing import Any, NamedTuple, Sequence

import numpy as np

from explain_lab.errors import ContractError, DimensionError
from explain_lab.models.Classifier import Classifier
from explain_lab.models.Dictionary import SIMPLEX_TOL, AttentionVector, Dictionary
from explain_lab.models.LinearExplanation import LinearExplanation
from explain_lab.numkit import (
    MlpParams,
    Rng,
    init_mlp,
    mlp_backward,
    mlp_forward,
    softmax,
    softmax_backward,
    softmax_cross_entropy,
)
from explain_lab.typings import Labels, Matrix, Params

ENCODER = "enc."


class CenModel(Classifier):
    """
    Parameters
    ----------
    `params` `Params` Encoder layers under `enc.` plus dictionary `B` and `W`
    """

    kind = "cen"

    @classmethod
    def initialize(
        cls,
        dx: int,
        dz: int,
        n_classes: int,
        n_components: int,
        hidden_sizes: Sequence[int],
        rng: Rng,
    ) -> "CenModel":
        encoder = init_mlp([dx, *hidden_sizes, n_components], rng.derive("encoder"))
        dictionary = Dictionary.initialize(n_components, dz, n_classes, rng.derive("dictionary"))
        return cls.from_parts(encoder, dictionary)

    @classmethod
    def from_parts(cls, encoder: MlpParams, dictionary: Dictionary) -> "CenModel":
        return cls({**encoder.to_params(ENCODER), "B": dictionary.B, "W": dictionary.W})

    def __init__(self, params: Params) -> None:
        super().__init__(params)
        self._encoder = MlpParams.from_params(self._params, ENCODER)
        self._dictionary = Dictionary(self._params["B"], self._params["W"])
        if self._encoder.out_dim != self._dictionary.K:
            raise DimensionError(
                f"encoder emits {self._encoder.out_dim} logits for {self._dictionary.K} components"
            )

    @property
    def encoder(self) -> MlpParams:
        return self._encoder

    @property
    def dictionary(self) -> Dictionary:
        return self._dictionary

    @property
    def n_classes(self) -> int:
        return self._dictionary.n_classes

    def attend_batch(self, X: Matrix) -> Matrix:
        logits, _ = mlp_forward(self._encoder, np.atleast_2d(X))
        return softmax(logits)

    def explain_batch(self, X: Matrix) -> tuple[Matrix, Matrix]:
        """
        Per-row explanations `(b_x, w_x)` of shapes `(n, C)` and `(n, dz, C)`
        """

        alpha = self.attend_batch(X)
        return alpha @ self._dictionary.B, np.tensordot(alpha, self._dictionary.W, axes=1)

    def predict_proba(self, X: Matrix, Z: Matrix) -> Matrix:
        b, w = self.explain_batch(X)
        return softmax(b + np.einsum("nd,ndc->nc", np.atleast_2d(Z), w))

    def loss_and_gradients(self, X: Matrix, Z: Matrix, y: Labels) -> tuple[float, Params]:
        grads, loss, _ = self._backprop(X, Z, y)
        return loss, grads

    def assert_invariants(self, X: Matrix) -> None:
        """
        Check the simplex and envelope invariants on the attention of `X`

        Raise
        -----
        `ContractError` if an attention row leaves the simplex or an explanation
        weight leaves the dictionary's elementwise range
        """

        alpha = self.attend_batch(X)
        check_attention(alpha)
        check_envelope(self._dictionary, np.tensordot(alpha, self._dictionary.W, axes=1))

    def _backprop(self, X: Matrix, Z: Matrix, y: Labels) -> tuple[Params, float, Matrix]:
        Z = np.atleast_2d(Z)
        B, W = self._dictionary.B, self._dictionary.W
        attention_logits, cache = mlp_forward(self._encoder, np.atleast_2d(X))
        alpha = softmax(attention_logits)
        b = alpha @ B
        w = np.tensordot(alpha, W, axes=1)
        loss, g = softmax_cross_entropy(b + np.einsum("nd,ndc->nc", Z, w), y)

        # dL/dw_x for every row is the outer product z_n g_n^T
        outer = np.einsum("nd,nc->ndc", Z, g)
        dB = alpha.T @ g
        dW = np.tensordot(alpha, outer, axes=(0, 0))
        dalpha = g @ B.T + np.einsum("ndc,kdc->nk", outer, W)
        encoder_grads, _ = mlp_backward(self._encoder, cache, softmax_backward(alpha, dalpha))
        return {**encoder_grads.to_params(ENCODER), "B": dB, "W": dW}, loss, alpha


def check_attention(alpha: Matrix) -> None:
    alpha = np.atleast_2d(alpha)
    if alpha.min() < 0.0 or np.abs(alpha.sum(axis=1) - 1.0).max() >= SIMPLEX_TOL:
        raise ContractError("attention left the simplex")


def check_envelope(dictionary: Dictionary, w: Matrix) -> None:
    low, high = dictionary.envelope()
    slack = 1e-12 * (1.0 + np.abs(dictionary.W).max())
    if (w < low - slack).any() or (w > high + slack).any():
        raise ContractError("explanation weights left the dictionary envelope")


def cen_attend(model: CenModel, x: Matrix) -> AttentionVector:
    """
    Softmax of the encoder logits for a single input
    """

    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError(f"expected a single input vector, got shape {x.shape}")
    logits, _ = mlp_forward(model.encoder, x)
    return AttentionVector(softmax(logits))


def cen_explain(model: CenModel, x: Matrix) -> LinearExplanation:
    """
    `b_x = alpha^T B`, `w_x = alpha^T W`
    """

    return model.dictionary.combine(cen_attend(model, x))


def cen_predict(model: CenModel, x: Matrix, z: Matrix) -> Matrix:
    """
    The prediction is exactly the generated explanation applied to `z`
    """

    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.shape[0] != model.dictionary.dz:
        raise DimensionError(f"expected a feature vector of length {model.dictionary.dz}, got {z.shape}")
    return cen_explain(model, x).predict_proba(z)


class AttentionProfile(NamedTuple):
    """
    How sharply the encoder selects dictionary components over a dataset
    """

    frequencies: Matrix
    mean_max_attention: float
    components_used: int


def attention_profile(model: CenModel, X: Matrix, chunk: int = 1024) -> AttentionProfile:
    """
    Selection frequency of each component (argmax of attention), mean of the
    largest attention weight, and how many components are ever selected
    """

    X = np.atleast_2d(X)
    counts = np.zeros(model.dictionary.K)
    max_sum = 0.0
    for lo in range(0, X.shape[0], chunk):
        alpha = model.attend_batch(X[lo : lo + chunk])
        counts += np.bincount(alpha.argmax(axis=1), minlength=model.dictionary.K)
        max_sum += float(alpha.max(axis=1).sum())
    n = max(X.shape[0], 1)
    return AttentionProfile(counts / n, max_sum / n, int((counts > 0).sum()))
