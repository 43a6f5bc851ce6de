from __future__ import annotations

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from explain_lab.data import FeatureMap
from explain_lab.experiments import SweepConfig
from explain_lab.lime import LimeConfig
from explain_lab.models import TrainConfig
from explain_lab.typings import FeatureKind, ModelKind

Command = Literal["prepare", "train", "explain", "sweep", "report"]
Experiment = Literal["noise", "features", "samples", "table", "convergence"]


class RunSection(BaseModel):
    """
    `seed` is the seed base of every stream; `train.seed` and `lime.seed`
    always follow it
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Command = "train"
    experiment: Experiment | None = None
    output: Path = Path("out")
    seed: int = Field(0, ge=0)
    jobs: int = Field(1, ge=1)
    report: Path | None = None


class DataSection(BaseModel):
    """
    Exactly one source is used, in order: `synthetic`, `train_csv`/`test_csv`,
    `mnist_dir`
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    synthetic: bool = False
    synthetic_n: int = Field(2000, ge=4)
    synthetic_classes: int = Field(3, ge=2)
    synthetic_dim: int = Field(8, ge=1)
    synthetic_test_fraction: float = Field(0.25, gt=0, lt=1)
    train_csv: Path | None = None
    test_csv: Path | None = None
    mnist_dir: Path | None = None
    n_classes: int | None = Field(None, ge=2)
    feature_kind: FeatureKind = "pxl"
    val_fraction: float = Field(0.1, gt=0, lt=1)
    train_limit: int | None = Field(None, ge=1)

    @property
    def feature_map(self) -> FeatureMap:
        return FeatureMap.for_kind("synthetic" if self.synthetic else self.feature_kind)


class ModelSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: ModelKind = "cen"
    checkpoint: Path | None = None
    instance: int = Field(0, ge=0)


class RunConfig(BaseModel):
    """
    Fully resolved configuration of one CLI invocation
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    run: RunSection = RunSection()
    data: DataSection = DataSection()
    model: ModelSection = ModelSection()
    train: TrainConfig = TrainConfig()
    lime: LimeConfig = LimeConfig()
    sweep: SweepConfig = SweepConfig()


# keys whose values follow another section and cannot be set directly
DERIVED_KEYS: dict[str, str] = {
    "train.seed": "run.seed",
    "lime.seed": "run.seed",
    "sweep.seed": "run.seed",
    "sweep.jobs": "run.jobs",
    "sweep.train": "train.*",
    "sweep.lime": "lime.*",
    "sweep.feature_kind": "data.feature_kind",
    "sweep.train_limit": "data.train_limit",
    "sweep.val_fraction": "data.val_fraction",
    "sweep.progress": "train.progress",
}


def derived_values(config: dict) -> dict:
    """
    Fill the `DERIVED_KEYS` of a nested raw config from their sources
    """

    run = config.setdefault("run", {})
    data = config.setdefault("data", {})
    train = config.setdefault("train", {})
    lime = config.setdefault("lime", {})
    sweep = config.setdefault("sweep", {})
    seed = run.get("seed", 0)
    train["seed"] = seed
    lime["seed"] = seed
    synthetic = str(data.get("synthetic", False)).lower() in ("true", "1", "yes", "on", "t", "y")
    sweep.update(
        seed=seed,
        jobs=run.get("jobs", 1),
        train=train,
        lime=lime,
        feature_kind="synthetic" if synthetic else data.get("feature_kind", "pxl"),
        train_limit=data.get("train_limit"),
        val_fraction=data.get("val_fraction", 0.1),
        progress=train.get("progress", False),
    )
    return config
