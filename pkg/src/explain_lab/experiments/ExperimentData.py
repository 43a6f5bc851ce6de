from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from explain_lab.data import (
    CorruptedFeatureMap,
    Dataset,
    FeatureMap,
    Standardizer,
    inject_noise,
    noise_std,
    random_kept_dims,
    take_fraction,
    train_val_split,
)
from explain_lab.numkit import Rng
from explain_lab.typings import FeatureKind

logger = logging.getLogger(__name__)


class Representation(NamedTuple):
    """
    Train/val/test splits carrying one (possibly corrupted, always
    standardised) interpretable representation, plus the map that produces it
    from raw inputs
    """

    train: Dataset
    val: Dataset
    test: Dataset
    phi: CorruptedFeatureMap


@dataclass(frozen=True, eq=False)
class ExperimentData:
    """
    Clean splits whose `Z` is `feature_map(X)`, before standardisation
    """

    train: Dataset
    val: Dataset
    test: Dataset
    feature_map: FeatureMap

    @classmethod
    def from_splits(
        cls,
        train: Dataset,
        test: Dataset,
        feature_map: FeatureMap,
        val_fraction: float = 0.1,
        seed: int = 0,
        train_limit: int | None = None,
    ) -> "ExperimentData":
        """
        Carve a validation split out of `train` (after an optional stratified
        cap of `train_limit` rows) and recompute `Z` with `feature_map`
        """

        if train_limit is not None and train_limit < train.n:
            train = take_fraction(train, train_limit / train.n, seed)
        train, val = train_val_split(train, val_fraction, seed)
        featurize = lambda d: d.with_features(feature_map(d.X), feature_map.feature_kind)
        logger.info("experiment data: %d train, %d val, %d test rows", train.n, val.n, test.n)
        return cls(featurize(train), featurize(val), featurize(test.with_split("test")), feature_map)

    def with_feature_map(self, feature_map: FeatureMap) -> "ExperimentData":
        featurize = lambda d: d.with_features(feature_map(d.X), feature_map.feature_kind)
        return ExperimentData(featurize(self.train), featurize(self.val), featurize(self.test), feature_map)

    @property
    def feature_kind(self) -> FeatureKind:
        return self.feature_map.feature_kind

    def _assemble(self, phi: CorruptedFeatureMap, transform) -> Representation:
        return Representation(
            transform(self.train, "train"), transform(self.val, "val"), transform(self.test, "test"), phi
        )

    def clean(self) -> Representation:
        standardizer = Standardizer.fit(self.train.Z)
        phi = CorruptedFeatureMap(self.feature_map, standardizer)
        return self._assemble(phi, lambda d, _: d.with_features(standardizer(d.Z)))

    def noisy(self, snr: float, rng: Rng) -> Representation:
        """
        Noise calibrated on the clean train split is added to raw `Z`, which is
        then standardised with clean-train statistics
        """

        standardizer = Standardizer.fit(self.train.Z)
        std = noise_std(self.train.Z, snr)
        phi = CorruptedFeatureMap(self.feature_map, standardizer, std=std)
        seeds = {split: int(rng.derive("noise", split).integers(0, 2**62)) for split in ("train", "val", "test")}
        return self._assemble(
            phi, lambda d, split: d.with_features(standardizer(inject_noise(d.Z, snr, seeds[split], std)))
        )

    def subsampled(self, fraction: float, rng: Rng) -> Representation:
        standardizer = Standardizer.fit(self.train.Z)
        kept = random_kept_dims(self.train.dz, fraction, int(rng.derive("kept").integers(0, 2**62)))
        phi = CorruptedFeatureMap(self.feature_map, standardizer, kept_dims=kept)
        index = np.asarray(kept)
        return self._assemble(phi, lambda d, _: d.with_features(standardizer(d.Z)[:, index]))
