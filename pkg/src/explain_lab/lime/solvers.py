"""
Weighted least-squares solvers with an unpenalised intercept:

    sum_i pi_i (y_i - b - z_i w)^2 + ridge * ||w||^2 + l1 * ||w||_1

Every class column is an independent regression sharing the design and weights.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.linalg

from explain_lab.errors import IllConditionedError, NumericError
from explain_lab.typings import Matrix, Vector

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12


def _center(Z: Matrix, Y: Matrix, weights: Vector) -> tuple[Matrix, Matrix, Vector, Vector]:
    total = weights.sum()
    z_mean = weights @ Z / total
    y_mean = weights @ Y / total
    return Z - z_mean, Y - y_mean, z_mean, y_mean


def _ridge_centered(Zc: Matrix, Yc: Matrix, weights: Vector, ridge: float) -> Matrix:
    gram = Zc.T @ (weights[:, None] * Zc) + ridge * np.eye(Zc.shape[1])
    rhs = Zc.T @ (weights[:, None] * Yc)
    if ridge == 0.0 and np.linalg.cond(gram) > MAX_CONDITION:
        raise IllConditionedError("weighted design is singular; set ridge_penalty > 0")
    try:
        return scipy.linalg.solve(gram, rhs, assume_a="pos")
    except np.linalg.LinAlgError as e:
        raise IllConditionedError(f"weighted normal equations could not be solved: {e}") from e


def weighted_ridge(Z: Matrix, Y: Matrix, weights: Vector, ridge: float) -> tuple[Vector, Matrix]:
    """
    Closed form `(Zc^T Pi Zc + ridge I) w = Zc^T Pi Yc` on weighted-centred data.

    Returns
    -------
    `(b, w)` with `b` of shape `(C,)` and `w` of shape `(dz, C)`

    Raise
    -----
    `IllConditionedError` if `ridge == 0` and the weighted design is singular
    """

    Zc, Yc, z_mean, y_mean = _center(Z, Y, weights)
    w = _ridge_centered(Zc, Yc, weights, ridge)
    return y_mean - z_mean @ w, w


def _coordinate_descent(
    Zc: Matrix,
    Yc: Matrix,
    weights: Vector,
    l1: float,
    ridge: float,
    w: Matrix,
    tol: float,
    max_sweeps: int,
) -> Matrix:
    w = w.copy()
    curvature = weights @ (Zc * Zc)
    residual = Yc - Zc @ w
    for sweep in range(max_sweeps):
        largest_step = 0.0
        for j in range(Zc.shape[1]):
            denom = curvature[j] + ridge
            if denom <= 0.0:
                continue
            column = Zc[:, j]
            rho = (weights * column) @ residual + curvature[j] * w[j]
            updated = np.sign(rho) * np.maximum(np.abs(rho) - 0.5 * l1, 0.0) / denom
            step = updated - w[j]
            if np.any(step):
                residual -= np.outer(column, step)
                w[j] = updated
                largest_step = max(largest_step, float(np.abs(step).max()))
        if largest_step <= tol * (1.0 + np.abs(w).max()):
            break
        if sweep % 100 == 99:
            # refresh the running residual against accumulated rounding
            residual = Yc - Zc @ w
    else:
        logger.warning("coordinate descent stopped after %d sweeps", max_sweeps)
    return w


def weighted_elastic_net(
    Z: Matrix,
    Y: Matrix,
    weights: Vector,
    l1: float,
    ridge: float,
    tol: float = 1e-12,
    max_sweeps: int = 100_000,
) -> tuple[Vector, Matrix]:
    """
    Cyclic coordinate descent with soft-thresholding, started at zero
    """

    Zc, Yc, z_mean, y_mean = _center(Z, Y, weights)
    w = _coordinate_descent(Zc, Yc, weights, l1, ridge, np.zeros((Z.shape[1], Y.shape[1])), tol, max_sweeps)
    if not np.isfinite(w).all():
        raise NumericError("coordinate descent produced non-finite weights")
    return y_mean - z_mean @ w, w


def subgradient_residual(
    Z: Matrix, Y: Matrix, weights: Vector, b: Vector, w: Matrix, l1: float, ridge: float
) -> float:
    """
    Distance of zero from the subdifferential of the weighted objective at `(b, w)`
    """

    fitted = Y - b - Z @ w
    intercept_grad = float(np.abs(-2.0 * weights @ fitted).max())
    grad = -2.0 * Z.T @ (weights[:, None] * fitted) + 2.0 * ridge * w
    slack = np.where(w != 0.0, np.abs(grad + l1 * np.sign(w)), np.maximum(np.abs(grad) - l1, 0.0))
    return max(intercept_grad, float(slack.max()) if slack.size else 0.0)


def lasso_path_support(
    Z: Matrix,
    y: Vector,
    weights: Vector,
    max_features: int,
    n_steps: int = 50,
    min_ratio: float = 1e-4,
) -> np.ndarray:
    """
    Walk a geometric L1 grid downwards from the smallest penalty that zeroes
    every weight and keep the last support with at most `max_features` entries
    """

    Zc, Yc, _, _ = _center(Z, y[:, None], weights)
    l1_max = 2.0 * float(np.abs(Zc.T @ (weights * Yc[:, 0])).max())
    support = np.empty(0, dtype=np.int64)
    if l1_max == 0.0:
        return support
    w = np.zeros((Z.shape[1], 1))
    for l1 in l1_max * np.geomspace(1.0, min_ratio, n_steps):
        w = _coordinate_descent(Zc, Yc, weights, l1, 0.0, w, 1e-10, 10_000)
        active = np.flatnonzero(w[:, 0])
        if active.size > max_features:
            break
        support = active
    return support


def select_then_refit(
    Z: Matrix, Y: Matrix, weights: Vector, max_features: int, ridge: float
) -> tuple[Vector, Matrix]:
    """
    Per class: choose features on the L1 path, then ridge on the chosen ones
    """

    b = np.empty(Y.shape[1])
    w = np.zeros((Z.shape[1], Y.shape[1]))
    for c in range(Y.shape[1]):
        support = lasso_path_support(Z, Y[:, c], weights, max_features)
        if support.size == 0:
            b[c] = weights @ Y[:, c] / weights.sum()
            continue
        bc, wc = weighted_ridge(Z[:, support], Y[:, c : c + 1], weights, ridge)
        b[c] = bc[0]
        w[support, c] = wc[:, 0]
    return b, w
