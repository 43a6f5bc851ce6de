from __future__ import annotations

import numpy as np

from explain_lab.errors import DimensionError, ParameterError
from explain_lab.typings import Params


def sgd_step(
    params: Params,
    gradients: Params,
    learning_rate: float,
    momentum_state: Params,
    momentum: float = 0.9,
) -> tuple[Params, Params]:
    """
    Classical momentum update, `v <- mu * v - lr * g`, `p <- p + v`.

    Parameters are never modified in place; missing velocity entries start at zero.

    Returns
    -------
    `(new_params, new_momentum_state)`
    """

    if learning_rate <= 0:
        raise ParameterError(f"learning_rate must be positive, got {learning_rate}")
    if params.keys() != gradients.keys():
        raise DimensionError(
            f"gradient keys {sorted(gradients)} do not match parameter keys {sorted(params)}"
        )
    new_params: Params = {}
    new_state: Params = {}
    for name, p in params.items():
        g = gradients[name]
        if g.shape != p.shape:
            raise DimensionError(f"{name}: gradient {g.shape} vs parameter {p.shape}")
        v = momentum_state.get(name)
        v = -learning_rate * g if v is None else momentum * v - learning_rate * g
        new_state[name] = v
        new_params[name] = p + v
    return new_params, new_state


class MomentumSgd:
    """
    Stateful wrapper over `sgd_step`

    Parameters
    ----------
    `learning_rate` `float` Step size, > 0
    `momentum` `float` Velocity decay in [0, 1)
    """

    def __init__(self, learning_rate: float, momentum: float = 0.9) -> None:
        if learning_rate <= 0:
            raise ParameterError(f"learning_rate must be positive, got {learning_rate}")
        if not 0.0 <= momentum < 1.0:
            raise ParameterError(f"momentum must lie in [0, 1), got {momentum}")
        self.learning_rate = learning_rate
        self.momentum = momentum
        self._state: Params = {}

    def step(self, params: Params, gradients: Params) -> Params:
        params, self._state = sgd_step(
            params, gradients, self.learning_rate, self._state, self.momentum
        )
        return params

    def reset(self) -> None:
        self._state = {}

    @property
    def state(self) -> Params:
        return {k: v.copy() for k, v in self._state.items()}
