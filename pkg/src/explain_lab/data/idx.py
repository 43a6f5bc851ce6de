"""
Reader and writer for the IDX binary format used by MNIST
"""

from __future__ import annotations

import gzip
import logging
import struct
from pathlib import Path

import numpy as np

from explain_lab.data.Dataset import Dataset
from explain_lab.data.features import FeatureMap
from explain_lab.errors import FormatError

logger = logging.getLogger(__name__)

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


def _read_bytes(path: Path) -> bytes:
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as f:
            return f.read()
    return path.read_bytes()


def read_idx_array(path: Path | str, magic: int) -> np.ndarray:
    """
    Parse an unsigned-byte IDX file.

    Raise
    -----
    `FormatError` on a bad magic number or a truncated header or payload,
    with the byte offset where parsing stopped
    """

    path = Path(path)
    raw = _read_bytes(path)
    if len(raw) < 4:
        raise FormatError("truncated magic number", path, len(raw))
    (found,) = struct.unpack_from(">I", raw, 0)
    if found != magic:
        raise FormatError(f"bad magic number 0x{found:08x}, expected 0x{magic:08x}", path, 0)
    ndim = magic & 0xFF
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise FormatError("truncated dimension table", path, len(raw))
    dims = struct.unpack_from(f">{ndim}I", raw, 4)
    size = int(np.prod(dims))
    if len(raw) < header + size:
        raise FormatError(
            f"truncated payload: expected {size} bytes, found {len(raw) - header}",
            path,
            len(raw),
        )
    return np.frombuffer(raw, dtype=np.uint8, count=size, offset=header).reshape(dims)


def load_idx(
    images_path: Path | str,
    labels_path: Path | str,
    feature_map: FeatureMap | None = None,
    n_classes: int = 10,
) -> Dataset:
    """
    Load an IDX image/label pair as a `Dataset` with pixels scaled to [0, 1].

    Parameters
    ----------
    `images_path` `Path | str` IDX3 image file (optionally gzipped)
    `labels_path` `Path | str` IDX1 label file (optionally gzipped)
    `feature_map` `FeatureMap | None` `phi` used to fill `Z`; pooled pixels by default
    `n_classes` `int` Number of label values

    Raise
    -----
    `FormatError` on malformed files or an image/label count mismatch
    """

    images = read_idx_array(images_path, IMAGES_MAGIC)
    labels = read_idx_array(labels_path, LABELS_MAGIC)
    if images.shape[0] != labels.shape[0]:
        raise FormatError(
            f"image count {images.shape[0]} does not match label count {labels.shape[0]}",
            labels_path,
            4,
        )
    X = images.reshape(images.shape[0], -1).astype(np.float64) / 255.0
    feature_map = feature_map or FeatureMap("pxl")
    logger.info("loaded %d images of %s from %s", X.shape[0], images.shape[1:], images_path)
    return Dataset(X, feature_map(X), labels.astype(np.int64), n_classes, feature_map.feature_kind)


def write_idx(
    X: np.ndarray, y: np.ndarray, images_path: Path | str, labels_path: Path | str
) -> None:
    """
    Write square images in [0, 1] and their labels as an IDX pair
    """

    X = np.atleast_2d(X)
    side = int(round(np.sqrt(X.shape[1])))
    pixels = np.clip(np.rint(X * 255.0), 0, 255).astype(np.uint8)
    labels = np.asarray(y).astype(np.uint8)
    Path(images_path).write_bytes(
        struct.pack(">IIII", IMAGES_MAGIC, X.shape[0], side, side) + pixels.tobytes()
    )
    Path(labels_path).write_bytes(struct.pack(">II", LABELS_MAGIC, labels.shape[0]) + labels.tobytes())
