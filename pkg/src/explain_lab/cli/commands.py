from __future__ import annotations

import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, Callable

import numpy as np

from explain_lab.data import (
    CorruptedFeatureMap,
    Dataset,
    FeatureMap,
    Standardizer,
    load_idx,
    make_synthetic,
    read_csv_dataset,
    train_val_split,
    write_csv_dataset,
)
from explain_lab.errors import ConfigValidationError, FormatError
from explain_lab.experiments import SWEEPS, ExperimentData, SweepReport, summarize
from explain_lab.lime import (
    LimeExplainer,
    explanation_to_json,
    fidelity,
    local_consistency,
    weighted_r2,
)
from explain_lab.models import (
    CenModel,
    attention_profile,
    cen_explain,
    evaluate,
    load_checkpoint,
    save_checkpoint,
    train,
)
from explain_lab.numkit import argmax_lowest

from .RunConfig import DataSection, RunConfig

logger = logging.getLogger(__name__)

MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}
MNIST_CLASSES = 10


def check_paths(config: RunConfig) -> None:
    """
    Raise
    -----
    `ConfigValidationError` naming the key of the first referenced path that does not exist
    """

    command = config.run.command
    referenced: list[tuple[str, Path | None]] = []
    if not config.data.synthetic and command != "report":
        referenced += [
            ("data.train_csv", config.data.train_csv),
            ("data.test_csv", config.data.test_csv),
            ("data.mnist_dir", config.data.mnist_dir),
        ]
    if command == "explain":
        referenced.append(("model.checkpoint", config.model.checkpoint))
    if command == "report":
        referenced.append(("run.report", config.run.report))
    for key, path in referenced:
        if path is not None and not path.exists():
            raise ConfigValidationError(f"no such file or directory: {path}", key)


def _mnist_path(directory: Path, name: str) -> Path:
    for candidate in (directory / name, directory / f"{name}.gz"):
        if candidate.exists():
            return candidate
    raise ConfigValidationError(f"no {name}[.gz] in {directory}", "data.mnist_dir")


def load_splits(data: DataSection, seed: int) -> tuple[Dataset, Dataset]:
    """
    Train and test splits of the configured source, `Z` filled by its feature map
    """

    if data.synthetic:
        full, _ = make_synthetic(data.synthetic_n, data.synthetic_classes, data.synthetic_dim, seed=seed)
        train_set, test_set = train_val_split(full, data.synthetic_test_fraction, seed)
        return train_set, test_set.with_split("test")
    if data.train_csv is not None:
        if data.test_csv is None:
            raise ConfigValidationError("required together with data.train_csv", "data.test_csv")
        train_set = read_csv_dataset(data.train_csv, data.n_classes, data.feature_kind, "train")
        test_set = read_csv_dataset(data.test_csv, train_set.n_classes, data.feature_kind, "test")
        return train_set, test_set
    if data.mnist_dir is not None:
        feature_map = data.feature_map
        n_classes = data.n_classes or MNIST_CLASSES
        splits = [
            load_idx(*(_mnist_path(data.mnist_dir, name) for name in MNIST_FILES[split]), feature_map, n_classes)
            for split in ("train", "test")
        ]
        return splits[0], splits[1].with_split("test")
    raise ConfigValidationError("no dataset; set data.synthetic, data.train_csv or data.mnist_dir", "data")


def experiment_data(config: RunConfig) -> ExperimentData:
    train_set, test_set = load_splits(config.data, config.run.seed)
    return ExperimentData.from_splits(
        train_set,
        test_set,
        config.data.feature_map,
        config.data.val_fraction,
        config.run.seed,
        config.data.train_limit,
    )


def representation_meta(phi: CorruptedFeatureMap) -> dict[str, Any]:
    return {
        "feature_map": dataclasses.asdict(phi.base),
        "standardizer": {"mean": phi.standardizer.mean.tolist(), "scale": phi.standardizer.scale.tolist()},
    }


def representation_from_meta(meta: dict[str, Any], path: Path) -> CorruptedFeatureMap:
    try:
        standardizer = meta["standardizer"]
        return CorruptedFeatureMap(
            FeatureMap(**meta["feature_map"]),
            Standardizer(np.asarray(standardizer["mean"]), np.asarray(standardizer["scale"])),
        )
    except (KeyError, TypeError) as e:
        raise FormatError(f"checkpoint metadata lacks the feature representation: {e}", path) from e


def _write_json(path: Path, payload: dict[str, Any]) -> None:
    path.write_text(json.dumps(payload, indent=2))
    logger.info("wrote %s", path)


def run_prepare(config: RunConfig) -> int:
    train_set, test_set = load_splits(config.data, config.run.seed)
    output = config.run.output
    write_csv_dataset(train_set, output / "train.csv")
    write_csv_dataset(test_set, output / "test.csv")
    logger.info("wrote %d train and %d test rows to %s", train_set.n, test_set.n, output)
    return 0


def run_train(config: RunConfig) -> int:
    representation = experiment_data(config).clean()
    model, log = train(config.model.kind, representation.train, config.train, representation.val)
    output = config.run.output
    save_checkpoint(model, output / "model.ckpt", representation_meta(representation.phi))
    log.to_frame().to_csv(output / "convergence.csv", index=False)

    test_eval = evaluate(model, representation.test)
    metrics: dict[str, Any] = {
        "model": model.kind,
        "train_error": log.rows[-1].train_error,
        "val_error": log.rows[-1].val_error,
        "test_error": test_eval.error,
        "test_cross_entropy": test_eval.cross_entropy,
    }
    if isinstance(model, CenModel):
        profile = attention_profile(model, representation.test.X)
        metrics["attention_max_mean"] = profile.mean_max_attention
        metrics["components_used"] = profile.components_used
    _write_json(output / "metrics.json", metrics)
    return 0


def run_explain(config: RunConfig) -> int:
    """
    LIME explanation of one test instance for a trained checkpoint; CEN
    checkpoints also get the explanation the model itself predicts with
    """

    if config.model.checkpoint is None:
        raise ConfigValidationError("required by explain", "model.checkpoint")
    model, meta = load_checkpoint(config.model.checkpoint)
    phi = representation_from_meta(meta, config.model.checkpoint)
    _, test_set = load_splits(config.data, config.run.seed)
    i = config.model.instance
    if i >= test_set.n:
        raise ConfigValidationError(f"instance {i} outside the {test_set.n} test rows", "model.instance")

    x = test_set.X[i]
    f = model.predictor(phi)
    result = LimeExplainer(f, phi, config.lime).explain_instance(x)
    common = {
        "instance": i,
        "label": int(test_set.y[i]),
        "model": model.kind,
        "prediction": int(argmax_lowest(f(x[None]))[0]),
        "sigma": result.neighborhood.sigma,
        "n_samples": config.lime.n_samples,
        "seed": config.lime.seed,
    }
    lime_meta = {
        **common,
        "source": "lime",
        "fidelity": fidelity(result.explanation, None, result.neighborhood),
        "weighted_r2": weighted_r2(result.neighborhood, result.explanation),
        "local_consistency": local_consistency(result.explanation, f, x, phi),
    }
    output = config.run.output
    (output / f"explanation-{i}.json").write_text(explanation_to_json(result.explanation, lime_meta))

    if isinstance(model, CenModel):
        native = cen_explain(model, x)
        # the native explanation lives in logit space; compare its probabilities
        gap = np.abs(native.predict_proba(phi(x[None]))[0] - f(x[None])[0]).max()
        cen_meta = {**common, "source": "cen", "local_consistency": float(gap)}
        (output / f"explanation-{i}-cen.json").write_text(explanation_to_json(native, cen_meta))
    logger.info("explained test instance %d (label %d)", i, common["label"])
    return 0


def run_sweep(config: RunConfig) -> int:
    experiment = config.run.experiment
    if experiment is None:
        raise ConfigValidationError("required by sweep", "run.experiment")
    report = SWEEPS[experiment](experiment_data(config), config.sweep)
    report.write(config.run.output, stem=experiment)
    return 2 if report.failed else 0


def run_report(config: RunConfig) -> int:
    if config.run.report is None:
        raise ConfigValidationError("required by report", "run.report")
    report = SweepReport.read(config.run.report)
    summary = summarize(report)
    path = config.run.output / "summary.csv"
    summary.to_csv(path, index=False)
    logger.info("summarised %d rows into %d groups at %s", len(report.rows), len(summary), path)
    return 0


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "prepare": run_prepare,
    "train": run_train,
    "explain": run_explain,
    "sweep": run_sweep,
    "report": run_report,
}
