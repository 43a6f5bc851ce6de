import logging
from typing import Callable

import numpy as np

from explain_lab.errors import NumericError, ParameterError
from explain_lab.numkit.Rng import Rng
from explain_lab.typings import Params

logger = logging.getLogger(__name__)

LossFn = Callable[[Params], tuple[float, Params]]


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic) + abs(numeric), 1e-8)


def grad_check(
    loss_fn: LossFn,
    params: Params,
    epsilon: float = 1e-5,
    max_entries: int | None = None,
    rng: Rng | None = None,
) -> float:
    """
    Compare analytic gradients against central finite differences.

    Parameters
    ----------
    `loss_fn` `LossFn` Maps parameters to `(loss, gradients)`
    `params` `Params` Point at which to check; never modified
    `epsilon` `float` Step, in (0, 1e-2]
    `max_entries` `int | None` Check at most this many random entries per parameter
    `rng` `Rng | None` Picks the entries when `max_entries` is set

    Returns
    -------
    Maximum over checked entries of `|a - n| / max(|a| + |n|, 1e-8)`. The sum in
    the denominator is up to twice `max(|a|, |n|)`, so a threshold here is twice as
    lenient as the same threshold on `|a - n| / max(|a|, |n|, 1e-8)`; a gradient off
    by a factor of two scores 1/3, not 1/2.

    Raise
    -----
    `NumericError` if the loss is not finite at any evaluated point
    """

    if not 0.0 < epsilon <= 1e-2:
        raise ParameterError(f"epsilon must lie in (0, 1e-2], got {epsilon}")
    point = {k: v.astype(np.float64, copy=True) for k, v in params.items()}
    loss, analytic = loss_fn(point)
    if not np.isfinite(loss):
        raise NumericError(f"loss is not finite at the check point: {loss}")
    rng = rng or Rng(0)

    worst = 0.0
    for name, value in point.items():
        flat = value.reshape(-1)
        indices = np.arange(flat.size)
        if max_entries is not None and flat.size > max_entries:
            indices = np.sort(rng.derive(name).choice(flat.size, max_entries))
        grad = analytic[name].reshape(-1)
        for i in indices:
            original = flat[i]
            flat[i] = original + epsilon
            plus, _ = loss_fn(point)
            flat[i] = original - epsilon
            minus, _ = loss_fn(point)
            flat[i] = original
            if not (np.isfinite(plus) and np.isfinite(minus)):
                raise NumericError(f"loss is not finite when perturbing {name}[{i}]")
            numeric = (plus - minus) / (2.0 * epsilon)
            err = relative_error(float(grad[i]), numeric)
            if err > worst:
                worst = err
        logger.debug("grad_check %s: running max relative error %.3e", name, worst)
    return worst
