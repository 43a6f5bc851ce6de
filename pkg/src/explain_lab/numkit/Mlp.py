"""
Fully connected ReLU networks with hand-derived backward passes
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from explain_lab.errors import ContractError, DimensionError
from explain_lab.numkit.Rng import Rng
from explain_lab.numkit.functional import relu
from explain_lab.typings import Matrix, Params

Activation = Literal["relu"]


@dataclass(frozen=True)
class MlpParams:
    """
    Layer weights (`in x out`) and biases of an affine/ReLU stack.
    The last layer is affine only.
    """

    weights: tuple[Matrix, ...]
    biases: tuple[Matrix, ...]
    activation: Activation = "relu"

    def __post_init__(self) -> None:
        if len(self.weights) == 0 or len(self.weights) != len(self.biases):
            raise DimensionError("an MLP needs one bias per weight matrix and at least one layer")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise DimensionError(f"layer {i}: weight {w.shape} does not match bias {b.shape}")
            if i > 0 and self.weights[i - 1].shape[1] != w.shape[0]:
                raise DimensionError(
                    f"layer {i - 1} outputs {self.weights[i - 1].shape[1]} but layer {i} expects {w.shape[0]}"
                )

    @property
    def in_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights[-1].shape[1]

    @property
    def sizes(self) -> tuple[int, ...]:
        return (self.in_dim,) + tuple(w.shape[1] for w in self.weights)

    def to_params(self, prefix: str = "") -> Params:
        params: Params = {}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            params[f"{prefix}W{i}"] = w
            params[f"{prefix}b{i}"] = b
        return params

    @classmethod
    def from_params(cls, params: Params, prefix: str = "") -> "MlpParams":
        weights, biases = [], []
        i = 0
        while f"{prefix}W{i}" in params:
            weights.append(params[f"{prefix}W{i}"])
            biases.append(params[f"{prefix}b{i}"])
            i += 1
        return cls(tuple(weights), tuple(biases))


@dataclass(frozen=True)
class MlpCache:
    """
    Activations recorded by `mlp_forward`, enough for an exact backward pass
    """

    params: MlpParams
    inputs: tuple[Matrix, ...]
    pre_activations: tuple[Matrix, ...]
    squeeze: bool = field(default=False)


def init_mlp(sizes: Sequence[int], rng: Rng) -> MlpParams:
    """
    Kaiming (fan-in) initialised weights, zero biases
    """

    if len(sizes) < 2:
        raise DimensionError("an MLP needs at least an input and an output size")
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpParams(tuple(weights), tuple(biases))


def mlp_forward(params: MlpParams, x: Matrix) -> tuple[Matrix, MlpCache]:
    """
    Parameters
    ----------
    `params` `MlpParams` The network
    `x` `Matrix` One input vector or a batch of row vectors

    Returns
    -------
    `(logits, cache)`; logits keep the batch shape of `x`
    """

    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    h = np.atleast_2d(x)
    if h.shape[1] != params.in_dim:
        raise DimensionError(f"input has {h.shape[1]} features, network expects {params.in_dim}")
    inputs = []
    pre = []
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        inputs.append(h)
        a = h @ w + b
        pre.append(a)
        h = a if i == last else relu(a)
    cache = MlpCache(params, tuple(inputs), tuple(pre), squeeze)
    return (h[0] if squeeze else h), cache


def mlp_backward(
    params: MlpParams, cache: MlpCache, output_gradient: Matrix
) -> tuple[MlpParams, Matrix]:
    """
    Backpropagate `output_gradient` (dL/dlogits) through the network.

    Returns
    -------
    `(gradients, input_gradient)` where `gradients` has the shapes of `params`

    Raise
    -----
    `ContractError` if `cache` was produced by a different network
    """

    if cache.params is not params:
        raise ContractError("cache was recorded by a different forward pass")
    g = np.atleast_2d(np.asarray(output_gradient, dtype=np.float64))
    if g.shape != cache.pre_activations[-1].shape:
        raise DimensionError(
            f"output gradient {g.shape} does not match logits {cache.pre_activations[-1].shape}"
        )
    n_layers = len(params.weights)
    dweights: list[Matrix] = [np.empty(0)] * n_layers
    dbiases: list[Matrix] = [np.empty(0)] * n_layers
    for i in reversed(range(n_layers)):
        if i != n_layers - 1:
            g = g * (cache.pre_activations[i] > 0.0)
        dweights[i] = cache.inputs[i].T @ g
        dbiases[i] = g.sum(axis=0)
        g = g @ params.weights[i].T
    dx = g[0] if cache.squeeze else g
    return MlpParams(tuple(dweights), tuple(dbiases), params.activation), dx
