from __future__ import annotations

import hashlib
import math

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from explain_lab.lime import LimeConfig
from explain_lab.models import TrainConfig
from explain_lab.typings import FeatureKind


class SweepConfig(BaseModel):
    """
    Grids and shared settings of every experiment.

    `math.inf` in `snr_levels` is the clean (noise-free) condition. A non-empty
    `trials` re-runs only those trial indices; each trial draws its own streams,
    so its rows equal the ones a full run produces.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    snr_levels: tuple[float, ...] = (math.inf, 8.0, 4.0, 2.0, 1.0, 0.5)
    feature_fractions: tuple[float, ...] = (1.0, 0.75, 0.5, 0.25, 0.1)
    data_fractions: tuple[float, ...] = (0.01, 0.02, 0.05, 0.1, 0.2)
    n_trials: int = Field(5, ge=1)
    trials: tuple[int, ...] = ()
    train: TrainConfig = TrainConfig()
    lime: LimeConfig = LimeConfig()
    lime_instances: int = Field(500, ge=1)
    feature_kind: FeatureKind = "pxl"
    table_features: tuple[FeatureKind, ...] = ("pxl", "hog")
    train_limit: int | None = Field(None, ge=1)
    val_fraction: float = Field(0.1, gt=0, lt=1)
    seed: int = Field(0, ge=0)
    jobs: int = Field(1, ge=1)
    progress: bool = False

    @field_validator("snr_levels")
    @classmethod
    def _positive_snr(cls, levels: tuple[float, ...]) -> tuple[float, ...]:
        if not levels:
            raise ValueError("snr_levels must not be empty")
        if any(not level > 0 for level in levels):
            raise ValueError("every snr level must be positive")
        return levels

    @field_validator("feature_fractions", "data_fractions")
    @classmethod
    def _unit_fractions(cls, fractions: tuple[float, ...]) -> tuple[float, ...]:
        if not fractions:
            raise ValueError("fraction grids must not be empty")
        if any(not 0.0 < f <= 1.0 for f in fractions):
            raise ValueError("fractions must lie in (0, 1]")
        return fractions

    @field_validator("table_features")
    @classmethod
    def _some_features(cls, kinds: tuple[FeatureKind, ...]) -> tuple[FeatureKind, ...]:
        if not kinds:
            raise ValueError("table_features must not be empty")
        return kinds

    @model_validator(mode="after")
    def _trials_in_range(self) -> "SweepConfig":
        if any(not 0 <= t < self.n_trials for t in self.trials):
            raise ValueError(f"trials must lie in [0, {self.n_trials})")
        return self

    def selected_trials(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.trials))) if self.trials else tuple(range(self.n_trials))

    def config_hash(self) -> str:
        """
        Digest of every setting that influences results; `jobs`, `progress` and
        the `trials` selection are left out
        """

        canonical = self.model_dump_json(exclude={"jobs", "progress", "trials"})
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]
