"""
Multi-trial experiments comparing post-hoc LIME explanations with contextual
explanation networks. Every operation returns a `SweepReport`; the same
`SweepConfig` always yields the same rows.
"""

from __future__ import annotations

import logging
from typing import Callable

import numpy as np

from explain_lab.data import CorruptedFeatureMap, Dataset, FeatureMap, take_fraction
from explain_lab.errors import ParameterError
from explain_lab.lime import LimeExplainer
from explain_lab.models import (
    Classifier,
    MODEL_KINDS,
    attention_profile,
    evaluate,
    train,
)
from explain_lab.numkit import Rng, argmax_lowest
from explain_lab.typings import Predictor

from .ExperimentData import ExperimentData, Representation
from .SweepConfig import SweepConfig
from .SweepReport import SweepReport
from .harness import TrialRecorder, run_trials, stream_seed, train_config_for, trial_rng

logger = logging.getLogger(__name__)

TABLE_CONDITION = 0.0


def black_box(model: Classifier) -> Predictor:
    """
    Raw-input predictor of a baseline that never reads `z`
    """

    return model.predictor(lambda X: X)


def lime_instances(test: Dataset, count: int, rng: Rng) -> np.ndarray:
    count = min(count, test.n)
    if count == 0:
        raise ParameterError("the test split is empty")
    return np.sort(rng.choice(test.n, count))


def lime_scores(
    f: Predictor,
    phi: CorruptedFeatureMap,
    test: Dataset,
    instances: np.ndarray,
    config: SweepConfig,
    rng: Rng,
) -> tuple[float, float]:
    """
    Fit one explanation per selected test instance and return its error
    against the true label and its agreement with the black box, both
    measured at the instance's own (corrupted) representation

    Parameters
    ----------
    `f` `Predictor` Black box over raw inputs
    `phi` `CorruptedFeatureMap` Corrupted, standardised representation
    `test` `Dataset` Test split
    `instances` `np.ndarray` Row indices into `test`
    `config` `SweepConfig` Supplies the `LimeConfig`
    `rng` `Rng` Stream of this condition and trial
    """

    wrong = 0
    agree = 0
    for i in instances:
        instance_rng = rng.derive("instance", int(i))
        explainer = LimeExplainer(f, phi.bound(instance_rng.derive("phi")), config.lime)
        result = explainer.explain_instance(test.X[i], instance_rng.derive("sample"))
        predicted = int(argmax_lowest(result.explanation.apply(result.neighborhood.Z[:1]))[0])
        wrong += predicted != int(test.y[i])
        agree += predicted == int(argmax_lowest(result.neighborhood.targets[:1])[0])
    return wrong / len(instances), agree / len(instances)


def _corruption_sweep(
    experiment: str,
    data: ExperimentData,
    config: SweepConfig,
    conditions: tuple[float, ...],
    corrupt: Callable[[float, Rng], Representation],
) -> SweepReport:
    clean = data.clean()

    def trial(t: int, recorder: TrialRecorder) -> None:
        baseline_rng = trial_rng(config.seed, experiment, "baseline", t)
        baseline, _ = train("mlp", clean.train, train_config_for(config, baseline_rng), clean.val)
        baseline_error = evaluate(baseline, clean.test).error
        f = black_box(baseline)
        picks = lime_instances(clean.test, config.lime_instances, baseline_rng.derive("lime-instances"))
        for condition in conditions:
            with recorder.condition(condition) as rows:
                rng = trial_rng(config.seed, experiment, condition, t)
                representation = corrupt(condition, rng)
                rows.add("mlp", "test_error", baseline_error)
                error, agreement = lime_scores(
                    f, representation.phi, representation.test, picks, config, rng.derive("lime")
                )
                rows.add("lime", "test_error", error)
                rows.add("lime", "fidelity", agreement)
                cen, _ = train(
                    "cen",
                    representation.train,
                    train_config_for(config, rng.derive("cen")),
                    representation.val,
                )
                rows.add("cen", "test_error", evaluate(cen, representation.test).error)
                logger.info(
                    "%s condition %s trial %d: lime error %.4f fidelity %.4f",
                    experiment,
                    condition,
                    t,
                    error,
                    agreement,
                )

    return run_trials(experiment, config, conditions, trial)


def run_noise_sweep(data: ExperimentData, config: SweepConfig) -> SweepReport:
    """
    Corrupt `z` with Gaussian noise at each signal-to-noise level and compare
    LIME explanations of a fixed MLP with a CEN trained on the noisy features.

    Metrics per `(snr, trial)`: `mlp`/`test_error` (identical across levels),
    `lime`/`test_error`, `lime`/`fidelity` and `cen`/`test_error`.
    """

    return _corruption_sweep("noise", data, config, config.snr_levels, data.noisy)


def run_feature_sweep(data: ExperimentData, config: SweepConfig) -> SweepReport:
    """
    Same comparison as `run_noise_sweep`, with a random subset of the
    dimensions of `z` kept instead of added noise
    """

    return _corruption_sweep("features", data, config, config.feature_fractions, data.subsampled)


def run_sample_complexity(data: ExperimentData, config: SweepConfig) -> SweepReport:
    """
    Validation error of every model kind trained on stratified subsets of the
    training split
    """

    clean = data.clean()

    def trial(t: int, recorder: TrialRecorder) -> None:
        for fraction in config.data_fractions:
            with recorder.condition(fraction) as rows:
                rng = trial_rng(config.seed, "samples", fraction, t)
                subset = take_fraction(clean.train, fraction, stream_seed(rng.derive("subset")))
                train_config = train_config_for(config, rng.derive("train"))
                for kind in MODEL_KINDS:
                    model, _ = train(kind, subset, train_config)
                    rows.add(kind, "val_error", evaluate(model, clean.val).error)

    return run_trials("samples", config, config.data_fractions, trial)


def table_feature_kinds(data: ExperimentData, config: SweepConfig) -> tuple[str, ...]:
    if data.feature_kind == "synthetic":
        return ("synthetic",)
    kinds = tuple(k for k in config.table_features if k != "synthetic")
    if not kinds:
        raise ParameterError("image data needs pxl or hog among table_features")
    return kinds


def run_table(data: ExperimentData, config: SweepConfig) -> SweepReport:
    """
    Test error of LR, MoE and CEN for each feature kind plus the MLP baseline.

    Model tags are `lr_<kind>`, `moe_<kind>`, `cen_<kind>` and `mlp`; CEN rows
    also carry `attention_max_mean` and `components_used`.
    """

    kinds = table_feature_kinds(data, config)
    representations = {
        kind: (data if kind == data.feature_kind else data.with_feature_map(FeatureMap.for_kind(kind))).clean()
        for kind in kinds
    }
    conditions = (TABLE_CONDITION,)

    def trial(t: int, recorder: TrialRecorder) -> None:
        with recorder.condition(TABLE_CONDITION) as rows:
            train_config = train_config_for(config, trial_rng(config.seed, "table", TABLE_CONDITION, t))
            first = representations[kinds[0]]
            mlp, _ = train("mlp", first.train, train_config, first.val)
            rows.add("mlp", "test_error", evaluate(mlp, first.test).error)
            for kind, rep in representations.items():
                for model_kind in ("lr", "moe", "cen"):
                    model, _ = train(model_kind, rep.train, train_config, rep.val)
                    tag = f"{model_kind}_{kind}"
                    rows.add(tag, "test_error", evaluate(model, rep.test).error)
                    if model_kind == "cen":
                        profile = attention_profile(model, rep.test.X)
                        rows.add(tag, "attention_max_mean", profile.mean_max_attention)
                        rows.add(tag, "components_used", profile.components_used)

    return run_trials("table", config, conditions, trial)


def convergence_compare(data: ExperimentData, config: SweepConfig) -> SweepReport:
    """
    Per-epoch training error and loss of the MLP baseline and a CEN trained
    with the same seed, hence the same batch order. The condition is the epoch,
    0 being the untrained model.
    """

    clean = data.clean()
    epochs = tuple(float(e) for e in range(config.train.epochs + 1))

    def trial(t: int, recorder: TrialRecorder) -> None:
        train_config = train_config_for(config, trial_rng(config.seed, "convergence", t))
        for kind in ("mlp", "cen"):
            _, log = train(kind, clean.train, train_config)
            for row in log.rows:
                recorder.add(row.epoch, kind, "train_error", row.train_error)
                recorder.add(row.epoch, kind, "train_loss", row.train_loss)

    return run_trials("convergence", config, epochs, trial)


SWEEPS: dict[str, Callable[[ExperimentData, SweepConfig], SweepReport]] = {
    "noise": run_noise_sweep,
    "features": run_feature_sweep,
    "samples": run_sample_complexity,
    "table": run_table,
    "convergence": convergence_compare,
}
