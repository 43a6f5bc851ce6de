import gzip

import numpy as np
import pytest

from explain_lab.data import (
    CLEAN,
    CorruptedFeatureMap,
    CorruptionSpec,
    Dataset,
    FeatureMap,
    Standardizer,
    block_starts,
    cell_histograms,
    extract_features,
    hog_features,
    inject_noise,
    load_idx,
    make_synthetic,
    noise_std,
    random_kept_dims,
    read_csv_dataset,
    read_idx_array,
    subsample_features,
    take_fraction,
    train_val_split,
    write_csv_dataset,
    write_idx,
    IMAGES_MAGIC,
)
from explain_lab.errors import DimensionError, FormatError, ParameterError
from explain_lab.numkit import Rng


def _balanced(n: int, n_classes: int) -> Dataset:
    ids = np.arange(n, dtype=np.float64)[:, None]
    return Dataset(ids, ids.copy(), np.arange(n) % n_classes, n_classes)


def test_dataset_rejects_mismatched_rows():
    with pytest.raises(DimensionError):
        Dataset(np.zeros((3, 2)), np.zeros((2, 2)), np.zeros(3), 2)


def test_dataset_rejects_out_of_range_labels():
    with pytest.raises(ParameterError):
        Dataset(np.zeros((2, 2)), np.zeros((2, 2)), np.array([0, 2]), 2)


def test_dataset_is_immutable(blobs):
    with pytest.raises(AttributeError):
        blobs.n_classes = 5


def test_idx_round_trip(tmp_path):
    rng = Rng(2)
    X = rng.integers(0, 256, (2, 784)) / 255.0
    y = np.array([3, 7])
    write_idx(X, y, tmp_path / "images", tmp_path / "labels")
    dataset = load_idx(tmp_path / "images", tmp_path / "labels")
    assert dataset.n == 2
    assert dataset.dx == 784
    assert dataset.dz == 49
    np.testing.assert_allclose(dataset.X, X, atol=1e-12)
    assert dataset.y.tolist() == [3, 7]


def test_idx_reads_gzip(tmp_path):
    X = np.zeros((3, 784))
    write_idx(X, np.array([0, 1, 2]), tmp_path / "images", tmp_path / "labels")
    for name in ("images", "labels"):
        (tmp_path / f"{name}.gz").write_bytes(gzip.compress((tmp_path / name).read_bytes()))
    dataset = load_idx(tmp_path / "images.gz", tmp_path / "labels.gz")
    assert dataset.n == 3


def test_idx_count_mismatch(tmp_path):
    write_idx(np.zeros((2, 784)), np.array([0, 1]), tmp_path / "images", tmp_path / "unused")
    write_idx(np.zeros((3, 784)), np.array([0, 1, 2]), tmp_path / "unused", tmp_path / "labels")
    with pytest.raises(FormatError):
        load_idx(tmp_path / "images", tmp_path / "labels")


def test_idx_wrong_magic(tmp_path):
    write_idx(np.zeros((1, 784)), np.array([0]), tmp_path / "images", tmp_path / "labels")
    with pytest.raises(FormatError):
        read_idx_array(tmp_path / "labels", IMAGES_MAGIC)


def test_idx_truncated_payload(tmp_path):
    write_idx(np.zeros((2, 784)), np.array([0, 1]), tmp_path / "images", tmp_path / "labels")
    raw = (tmp_path / "images").read_bytes()
    (tmp_path / "images").write_bytes(raw[:-10])
    with pytest.raises(FormatError) as info:
        read_idx_array(tmp_path / "images", IMAGES_MAGIC)
    assert info.value.offset is not None


def test_pixel_features_of_constant_image():
    np.testing.assert_allclose(extract_features(np.ones((1, 784)), "pxl"), np.ones((1, 49)))


def test_hog_of_constant_image_is_zero():
    assert not cell_histograms(np.ones((1, 28, 28))).any()
    assert not hog_features(np.ones((1, 784))).any()


def test_hog_dimension():
    assert hog_features(np.zeros((2, 784))).shape == (2, 4 * 4 * 4 * 9)
    assert hog_features(np.zeros((1, 784)), block_stride=1).shape == (1, 6 * 6 * 4 * 9)


@pytest.mark.parametrize(
    "cells, block, stride, expected",
    [(7, 2, 2, [0, 2, 4, 5]), (6, 2, 2, [0, 2, 4]), (7, 2, 1, [0, 1, 2, 3, 4, 5]), (2, 2, 2, [0])],
)
def test_block_starts_reach_the_last_cell(cells, block, stride, expected):
    assert block_starts(cells, block, stride) == expected


@pytest.mark.parametrize("row", range(7))
@pytest.mark.parametrize("col", range(7))
def test_every_cell_reaches_the_descriptor(row, col):
    image = np.zeros((28, 28))
    image[4 * row : 4 * row + 4, 4 * col + 2] = 1.0
    assert np.abs(hog_features(image.reshape(1, -1))).max() > 0.0


def test_bottom_right_corner_changes_the_descriptor():
    rng = Rng(6)
    a = rng.uniform(size=(28, 28))
    b = a.copy()
    b[24:, 24:] = 0.0
    b[24:, 25] = 1.0
    assert np.abs(hog_features(a.reshape(1, -1)) - hog_features(b.reshape(1, -1))).max() > 0.0


def test_vertical_edge_votes_for_horizontal_gradient():
    image = np.zeros((28, 28))
    image[:, 14:] = 1.0
    histograms = cell_histograms(image[None])
    energy = histograms.sum(axis=(0, 1, 2))
    assert energy[0] > 0
    assert energy[1:].sum() == pytest.approx(0.0)


def test_feature_map_rejects_non_square_input():
    with pytest.raises(DimensionError):
        FeatureMap("pxl")(np.zeros((1, 10)))


def test_identity_feature_map_is_synthetic():
    feature_map = FeatureMap.for_kind("synthetic")
    X = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(feature_map(X), X)
    assert feature_map.feature_kind == "synthetic"


def test_clean_noise_is_identity(rng):
    Z = rng.normal(size=(5, 3))
    np.testing.assert_array_equal(inject_noise(Z, CLEAN, seed=1), Z)


def test_noise_variance_follows_snr():
    Z = Rng(0).normal(0.0, 1.0, (10000, 1))
    noisy = inject_noise(Z, 4.0, seed=5)
    assert (noisy - Z).var() == pytest.approx(Z.var() / 4.0, rel=0.1)


def test_noise_is_deterministic(rng):
    Z = rng.normal(size=(20, 4))
    np.testing.assert_array_equal(inject_noise(Z, 2.0, 7), inject_noise(Z, 2.0, 7))


def test_noise_rejects_non_positive_snr(rng):
    with pytest.raises(ParameterError):
        inject_noise(np.zeros((2, 2)), 0.0, 1)


def test_noise_std_uses_column_variance():
    Z = np.array([[0.0, 1.0], [2.0, 1.0]])
    np.testing.assert_allclose(noise_std(Z, 1.0), [1.0, 0.0])


def test_subsample_keeps_requested_columns():
    Z = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(subsample_features(Z, [0, 1, 2]), Z)
    np.testing.assert_array_equal(subsample_features(Z, [0]), Z[:, :1])
    with pytest.raises(ParameterError):
        subsample_features(Z, [3])


def test_random_kept_dims_are_reproducible():
    kept = random_kept_dims(49, 0.5, seed=3)
    assert kept == random_kept_dims(49, 0.5, seed=3)
    assert len(kept) == 24 or len(kept) == 25
    assert list(kept) == sorted(set(kept))


def test_corruption_spec_validates():
    with pytest.raises(ParameterError):
        CorruptionSpec("subsample", kept_dims=(2, 1))
    spec = CorruptionSpec("subsample", kept_dims=(0, 2))
    np.testing.assert_array_equal(spec.apply(np.eye(3)), np.eye(3)[:, [0, 2]])


def test_take_fraction_is_stratified():
    subset = take_fraction(_balanced(10000, 10), 0.1, seed=0)
    assert subset.n == 1000
    counts = subset.class_counts()
    assert counts.min() >= 99 and counts.max() <= 101


def test_take_full_fraction_permutes_rows():
    dataset = _balanced(50, 5)
    subset = take_fraction(dataset, 1.0, seed=2)
    np.testing.assert_array_equal(np.sort(subset.X[:, 0]), dataset.X[:, 0])
    np.testing.assert_array_equal(subset.X, take_fraction(dataset, 1.0, seed=2).X)


def test_take_fraction_overlap_between_seeds():
    dataset = _balanced(10000, 10)
    overlaps = []
    for draw in range(20):
        a = set(take_fraction(dataset, 0.1, seed=2 * draw).X[:, 0])
        b = set(take_fraction(dataset, 0.1, seed=2 * draw + 1).X[:, 0])
        overlaps.append(len(a & b) / len(a))
    assert np.mean(overlaps) == pytest.approx(0.1, abs=0.02)


def test_take_fraction_rejects_too_few_rows():
    with pytest.raises(ParameterError):
        take_fraction(_balanced(100, 10), 0.05, seed=0)
    with pytest.raises(ParameterError):
        take_fraction(_balanced(100, 10), 0.0, seed=0)


def test_train_val_split_partitions_rows():
    dataset = _balanced(100, 4)
    train, val = train_val_split(dataset, 0.2, seed=1)
    assert (train.n, val.n) == (80, 20)
    assert train.split == "train" and val.split == "val"
    ids = np.concatenate([train.X[:, 0], val.X[:, 0]])
    np.testing.assert_array_equal(np.sort(ids), dataset.X[:, 0])


def test_standardizer_centres_and_scales(rng):
    Z = rng.normal(3.0, 2.0, (200, 3))
    Z[:, 2] = 1.5
    standardized = Standardizer.fit(Z)(Z)
    np.testing.assert_allclose(standardized[:, :2].mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(standardized[:, :2].std(axis=0), 1.0)
    np.testing.assert_array_equal(standardized[:, 2], 0.0)


def test_clean_corrupted_map_only_standardizes(tiny_images):
    base = FeatureMap("pxl")
    standardizer = Standardizer.fit(base(tiny_images.X))
    phi = CorruptedFeatureMap(base, standardizer)
    np.testing.assert_array_equal(phi(tiny_images.X), standardizer(base(tiny_images.X)))


def test_corrupted_map_subsamples_after_standardizing(tiny_images):
    base = FeatureMap("pxl")
    standardizer = Standardizer.fit(base(tiny_images.X))
    phi = CorruptedFeatureMap(base, standardizer, kept_dims=(1, 5))
    np.testing.assert_array_equal(phi(tiny_images.X), standardizer(base(tiny_images.X))[:, [1, 5]])


def test_bound_noise_is_reproducible(tiny_images):
    base = FeatureMap("pxl")
    Z = base(tiny_images.X)
    phi = CorruptedFeatureMap(base, Standardizer.fit(Z), std=noise_std(Z, 1.0))
    a = phi.bound(Rng(3))(tiny_images.X)
    b = phi.bound(Rng(3))(tiny_images.X)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, phi.bound(Rng(4))(tiny_images.X))


def test_csv_round_trip(tmp_path, blobs):
    write_csv_dataset(blobs, tmp_path / "train.csv")
    loaded = read_csv_dataset(tmp_path / "train.csv", blobs.n_classes)
    np.testing.assert_array_equal(loaded.X, blobs.X)
    np.testing.assert_array_equal(loaded.Z, blobs.Z)
    np.testing.assert_array_equal(loaded.y, blobs.y)


def test_csv_without_labels(tmp_path):
    (tmp_path / "bad.csv").write_text("x0,x1\n0.1,0.2\n")
    with pytest.raises(FormatError):
        read_csv_dataset(tmp_path / "bad.csv")


def test_synthetic_truth_separates_classes():
    dataset, truth = make_synthetic(600, n_classes=3, dim=6, noise=0.08, seed=1)
    scores = truth.b + dataset.X @ truth.w
    assert (scores.argmax(axis=1) == dataset.y).mean() > 0.85
    np.testing.assert_array_equal(dataset.Z, dataset.X)
    assert dataset.class_counts().tolist() == [200, 200, 200]
