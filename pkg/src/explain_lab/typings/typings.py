from typing import Callable, Literal

import numpy as np
import numpy.typing as npt

Matrix = npt.NDArray[np.float64]
Vector = npt.NDArray[np.float64]
Labels = npt.NDArray[np.int64]
Params = dict[str, Matrix]

FeatureKind = Literal["pxl", "hog", "synthetic"]
Split = Literal["train", "val", "test"]
ModelKind = Literal["lr", "mlp", "moe", "cen"]
DistanceKind = Literal["euclidean", "cosine"]

# black box over raw inputs: (n, dx) -> (n, C) class probabilities
Predictor = Callable[[Matrix], Matrix]
# interpretable feature map phi: (n, dx) -> (n, dz)
FeatureFn = Callable[[Matrix], Matrix]
