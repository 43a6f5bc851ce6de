from .Dataset import Dataset
from .features import (
    FeatureMap,
    Standardizer,
    extract_features,
    pixel_features,
    hog_features,
    cell_histograms,
    block_starts,
)
from .corruption import (
    CLEAN,
    CorruptionSpec,
    CorruptedFeatureMap,
    inject_noise,
    noise_std,
    random_kept_dims,
    subsample_features,
)
from .sampling import take_fraction, train_val_split
from .idx import load_idx, read_idx_array, write_idx, IMAGES_MAGIC, LABELS_MAGIC
from .csvio import read_csv_dataset, write_csv_dataset
from .synthetic import SyntheticTruth, make_synthetic
