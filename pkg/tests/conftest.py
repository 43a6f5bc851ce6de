import os
from pathlib import Path

import numpy as np
import pytest

from explain_lab.data import Dataset, make_synthetic
from explain_lab.models import TrainConfig
from explain_lab.numkit import Rng

MNIST_DIR_ENV = "EXPLAIN_LAB_MNIST_DIR"


def pytest_collection_modifyitems(config, items):
    if os.environ.get(MNIST_DIR_ENV):
        return
    skip = pytest.mark.skip(reason=f"set {MNIST_DIR_ENV} to run desk-scale MNIST checks")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng() -> Rng:
    return Rng(1)


@pytest.fixture
def mnist_dir() -> Path:
    return Path(os.environ[MNIST_DIR_ENV])


@pytest.fixture
def blobs() -> Dataset:
    dataset, _ = make_synthetic(300, n_classes=3, dim=6, separation=0.35, noise=0.08, seed=11)
    return dataset


@pytest.fixture
def tiny_images() -> Dataset:
    rng = Rng(4)
    X = rng.uniform(0.0, 1.0, (40, 784))
    y = np.arange(40) % 4
    return Dataset(X, X[:, :10].copy(), y, 4)


@pytest.fixture
def quick_train() -> TrainConfig:
    return TrainConfig(
        learning_rate=0.1,
        momentum=0.9,
        batch_size=32,
        epochs=5,
        l2_penalty=1e-4,
        seed=3,
        n_components=4,
        hidden_sizes=(16,),
    )
