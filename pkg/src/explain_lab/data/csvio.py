from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from explain_lab.data.Dataset import Dataset
from explain_lab.data.features import FeatureMap
from explain_lab.errors import FormatError
from explain_lab.typings import FeatureKind, Split


def write_csv_dataset(dataset: Dataset, path: Path | str) -> None:
    """
    Header row, `x0..` raw columns, `z0..` feature columns, label column `y`
    """

    frame = pd.DataFrame(dataset.X, columns=[f"x{i}" for i in range(dataset.dx)])
    frame = pd.concat(
        [frame, pd.DataFrame(dataset.Z, columns=[f"z{i}" for i in range(dataset.dz)])], axis=1
    )
    frame["y"] = dataset.y
    frame.to_csv(path, index=False, float_format="%.17g")


def read_csv_dataset(
    path: Path | str,
    n_classes: int | None = None,
    feature_kind: FeatureKind = "synthetic",
    split: Split = "train",
) -> Dataset:
    """
    Read the CSV dataset format; without `z*` columns, `Z = phi(X)` for `feature_kind`.

    Raise
    -----
    `FormatError` if the label column or every raw column is missing
    """

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    frame = pd.read_csv(path, float_precision="round_trip")
    if "y" not in frame.columns:
        raise FormatError("CSV dataset has no `y` column", path)
    x_cols = sorted((c for c in frame.columns if c.startswith("x") and c[1:].isdigit()), key=lambda c: int(c[1:]))
    z_cols = sorted((c for c in frame.columns if c.startswith("z") and c[1:].isdigit()), key=lambda c: int(c[1:]))
    if not x_cols:
        raise FormatError("CSV dataset has no `x0..` columns", path)
    X = frame[x_cols].to_numpy(dtype=np.float64)
    y = frame["y"].to_numpy(dtype=np.int64)
    Z = frame[z_cols].to_numpy(dtype=np.float64) if z_cols else FeatureMap.for_kind(feature_kind)(X)
    classes = int(n_classes) if n_classes is not None else int(y.max()) + 1
    return Dataset(X, Z, y, classes, feature_kind, split)
