"""
Mini-batch momentum SGD shared by every model kind, plus evaluation
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from explain_lab.data import Dataset
from explain_lab.errors import DivergedError, ParameterError
from explain_lab.models.Cen import CenModel
from explain_lab.models.Classifier import Classifier
from explain_lab.models.LogisticRegression import LogisticRegression
from explain_lab.models.MlpClassifier import MlpClassifier
from explain_lab.models.Moe import MoeModel
from explain_lab.models.TrainConfig import TrainConfig
from explain_lab.numkit import MomentumSgd, Rng, argmax_lowest
from explain_lab.typings import ModelKind

logger = logging.getLogger(__name__)

MODEL_KINDS: tuple[ModelKind, ...] = ("lr", "mlp", "moe", "cen")
_EVAL_CHUNK = 1024


class ConvergenceRow(NamedTuple):
    epoch: int
    train_error: float
    train_loss: float
    val_error: float | None


@dataclass
class ConvergenceLog:
    """
    Training curve; epoch 0 is measured before the first update
    """

    rows: list[ConvergenceRow] = field(default_factory=list)

    def record(self, row: ConvergenceRow) -> None:
        self.rows.append(row)

    @property
    def epochs(self) -> list[int]:
        return [r.epoch for r in self.rows]

    @property
    def train_errors(self) -> list[float]:
        return [r.train_error for r in self.rows]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=list(ConvergenceRow._fields))


class Evaluation(NamedTuple):
    error: float
    cross_entropy: float


def build_model(
    kind: ModelKind, dx: int, dz: int, n_classes: int, config: TrainConfig, rng: Rng
) -> Classifier:
    """
    Freshly initialised model of `kind`; every kind draws its linear part from
    the same `dictionary` stream so one-component CEN/MoE start where LR starts
    """

    init = rng.derive("init")
    if kind == "lr":
        return LogisticRegression.initialize(dz, n_classes, init)
    if kind == "mlp":
        return MlpClassifier.initialize(dx, n_classes, config.hidden_sizes, init)
    if kind == "cen":
        return CenModel.initialize(dx, dz, n_classes, config.n_components, config.hidden_sizes, init)
    if kind == "moe":
        return MoeModel.initialize(dx, dz, n_classes, config.n_components, config.hidden_sizes, init)
    raise ParameterError(f"unknown model kind {kind!r}, expected one of {MODEL_KINDS}")


def evaluate(model: Classifier, dataset: Dataset) -> Evaluation:
    """
    Argmax error rate (ties to the lowest class) and mean cross-entropy

    Raise
    -----
    `ParameterError` on an empty dataset
    """

    if dataset.n == 0:
        raise ParameterError("cannot evaluate on an empty dataset")
    wrong = 0
    nll = 0.0
    for lo in range(0, dataset.n, _EVAL_CHUNK):
        hi = lo + _EVAL_CHUNK
        probs = model.predict_proba(dataset.X[lo:hi], dataset.Z[lo:hi])
        y = dataset.y[lo:hi]
        wrong += int((argmax_lowest(probs) != y).sum())
        nll -= float(np.log(np.maximum(probs[np.arange(y.shape[0]), y], 1e-300)).sum())
    return Evaluation(wrong / dataset.n, nll / dataset.n)


def fit(
    model: Classifier,
    dataset: Dataset,
    config: TrainConfig,
    val: Dataset | None = None,
) -> tuple[Classifier, ConvergenceLog]:
    """
    Train an already initialised model; see `train`
    """

    if dataset.split != "train":
        raise ParameterError(f"training needs the train split, got {dataset.split!r}")
    if dataset.n == 0:
        raise ParameterError("cannot train on an empty dataset")
    rng = Rng(config.seed)
    optimizer = MomentumSgd(config.learning_rate, config.momentum)
    log = ConvergenceLog()
    checked = config.check_invariants and isinstance(model, CenModel)

    def snapshot(epoch: int) -> None:
        train_eval = evaluate(model, dataset)
        val_error = evaluate(model, val).error if val is not None and val.n else None
        log.record(ConvergenceRow(epoch, train_eval.error, train_eval.cross_entropy, val_error))
        logger.info(
            "%s epoch %d: train error %.4f, loss %.4f, val error %s",
            model.kind,
            epoch,
            train_eval.error,
            train_eval.cross_entropy,
            "n/a" if val_error is None else f"{val_error:.4f}",
        )

    snapshot(0)
    epochs = range(1, config.epochs + 1)
    for epoch in tqdm(epochs, desc=f"train {model.kind}", disable=not config.progress):
        order = rng.derive("batches", epoch).permutation(dataset.n)
        for lo in range(0, dataset.n, config.batch_size):
            batch = order[lo : lo + config.batch_size]
            X, Z, y = dataset.X[batch], dataset.Z[batch], dataset.y[batch]
            if checked:
                model.assert_invariants(X)
            loss, grads = model.penalized_loss_and_gradients(X, Z, y, config.l2_penalty)
            if not np.isfinite(loss):
                raise DivergedError(epoch, loss)
            params = optimizer.step(model.params, grads)
            if not all(np.isfinite(v).all() for v in params.values()):
                raise DivergedError(epoch, float("nan"))
            model = model.with_params(params)
        if epoch % config.eval_every == 0 or epoch == config.epochs:
            snapshot(epoch)
    return model, log


def train(
    model_kind: ModelKind,
    dataset: Dataset,
    config: TrainConfig,
    val: Dataset | None = None,
) -> tuple[Classifier, ConvergenceLog]:
    """
    Minimise cross-entropy plus `l2_penalty / 2 * ||W||^2` by mini-batch momentum SGD.

    Batch order depends only on `config.seed` and the epoch, so different model
    kinds trained with the same seed see the same batches.

    Parameters
    ----------
    `model_kind` `ModelKind` `lr`, `mlp`, `moe` or `cen`
    `dataset` `Dataset` Training split
    `config` `TrainConfig` Optimisation settings
    `val` `Dataset | None` Validation split for the convergence log

    Raise
    -----
    `DivergedError` naming the epoch if the loss becomes non-finite
    """

    rng = Rng(config.seed)
    model = build_model(model_kind, dataset.dx, dataset.dz, dataset.n_classes, config, rng)
    return fit(model, dataset, config, val)
