from __future__ import annotations

import math

import numpy as np

from explain_lab.data.Dataset import Dataset
from explain_lab.errors import ParameterError
from explain_lab.numkit import Rng


def _stratified_quotas(counts: np.ndarray, m: int) -> np.ndarray:
    n = counts.sum()
    exact = m * counts / n
    quotas = np.floor(exact).astype(np.int64)
    short = m - quotas.sum()
    # largest remainder; ties go to the lower class index
    order = np.lexsort((np.arange(counts.size), -(exact - quotas)))
    for c in order[:short]:
        quotas[c] += 1
    return np.minimum(quotas, counts)


def take_fraction(dataset: Dataset, fraction: float, seed: int) -> Dataset:
    """
    Class-stratified uniform sample without replacement of `ceil(fraction * n)` rows.

    Raise
    -----
    `ParameterError` if `fraction` is outside (0, 1] or yields fewer rows than classes
    """

    if not 0.0 < fraction <= 1.0:
        raise ParameterError(f"fraction must lie in (0, 1], got {fraction}")
    m = math.ceil(fraction * dataset.n - 1e-9)
    if m < dataset.n_classes:
        raise ParameterError(
            f"fraction {fraction} keeps {m} rows, fewer than {dataset.n_classes} classes"
        )
    rng = Rng(seed)
    quotas = _stratified_quotas(dataset.class_counts(), m)
    chosen = []
    for c, quota in enumerate(quotas):
        members = np.flatnonzero(dataset.y == c)
        if quota:
            chosen.append(members[rng.derive("class", c).choice(members.size, int(quota))])
    indices = np.concatenate(chosen)
    indices = indices[rng.derive("order").permutation(indices.size)]
    return dataset.take(indices)


def train_val_split(dataset: Dataset, val_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """
    Random split keeping the original row order inside each part
    """

    if not 0.0 < val_fraction < 1.0:
        raise ParameterError(f"val_fraction must lie in (0, 1), got {val_fraction}")
    perm = Rng(seed).permutation(dataset.n)
    n_val = max(1, int(round(val_fraction * dataset.n)))
    val = np.sort(perm[:n_val])
    train = np.sort(perm[n_val:])
    return dataset.take(train).with_split("train"), dataset.take(val).with_split("val")
