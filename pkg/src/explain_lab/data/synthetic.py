from __future__ import annotations

from typing import NamedTuple

import numpy as np

from explain_lab.data.Dataset import Dataset
from explain_lab.errors import ParameterError
from explain_lab.numkit import Rng
from explain_lab.typings import Matrix, Split


class SyntheticTruth(NamedTuple):
    """
    Bayes-optimal linear boundary of the isotropic clusters: `logits = b + z @ w`
    """

    b: Matrix
    w: Matrix
    means: Matrix


def make_synthetic(
    n: int,
    n_classes: int = 2,
    dim: int = 8,
    separation: float = 0.35,
    noise: float = 0.1,
    seed: int = 0,
    split: Split = "train",
) -> tuple[Dataset, SyntheticTruth]:
    """
    Balanced Gaussian class clusters clipped to [0, 1]^dim; `Z = X`.

    Class means sit at `0.5 + separation * u_c` for random unit directions `u_c`;
    the returned truth ignores the (rare) clipping.
    """

    if n < n_classes or n_classes < 2 or dim < 1 or noise <= 0:
        raise ParameterError("need n >= n_classes >= 2, dim >= 1 and noise > 0")
    rng = Rng(seed)
    directions = rng.derive("means").normal(0.0, 1.0, (n_classes, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    means = 0.5 + separation * directions
    y = np.arange(n) % n_classes
    y = y[rng.derive("labels").permutation(n)]
    X = np.clip(means[y] + noise * rng.derive("noise").normal(0.0, 1.0, (n, dim)), 0.0, 1.0)
    w = means.T / noise**2
    b = -0.5 * (means**2).sum(axis=1) / noise**2
    return Dataset(X, X.copy(), y, n_classes, "synthetic", split), SyntheticTruth(b, w, means)
