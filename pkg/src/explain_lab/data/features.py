"""
Interpretable feature maps over 28x28-style square images
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from explain_lab.errors import DimensionError, ParameterError
from explain_lab.typings import FeatureKind, Matrix

MapKind = Literal["pxl", "hog", "identity"]

# rows per HOG chunk; bounds the (rows, side, side, bins) temporary
_HOG_CHUNK = 2048


def _as_images(X: Matrix) -> tuple[np.ndarray, int]:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    side = int(round(np.sqrt(X.shape[1])))
    if side * side != X.shape[1]:
        raise DimensionError(f"input length {X.shape[1]} is not a square image")
    return X.reshape(X.shape[0], side, side), side


def pixel_features(X: Matrix, grid: int = 7) -> Matrix:
    """
    Average-pool each image onto a `grid x grid` lattice
    """

    images, side = _as_images(X)
    if side % grid:
        raise DimensionError(f"a {side}x{side} image cannot be pooled onto a {grid}x{grid} grid")
    step = side // grid
    pooled = images.reshape(images.shape[0], grid, step, grid, step).mean(axis=(2, 4))
    return pooled.reshape(images.shape[0], grid * grid)


def _gradients(images: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gx = np.zeros_like(images)
    gy = np.zeros_like(images)
    gx[:, :, 1:-1] = images[:, :, 2:] - images[:, :, :-2]
    gy[:, 1:-1, :] = images[:, 2:, :] - images[:, :-2, :]
    return gx, gy


def cell_histograms(images: np.ndarray, cell: int = 4, bins: int = 9) -> np.ndarray:
    """
    Unsigned-orientation histograms of gradient magnitude per `cell x cell` patch.

    Returns
    -------
    `(n, cells, cells, bins)` array
    """

    n, side, _ = images.shape
    if side % cell:
        raise DimensionError(f"a {side}x{side} image does not split into {cell}x{cell} cells")
    gx, gy = _gradients(images)
    magnitude = np.hypot(gx, gy)
    angle = np.mod(np.degrees(np.arctan2(gy, gx)), 180.0)
    index = np.floor(angle / (180.0 / bins)).astype(np.int64) % bins
    votes = (index[..., None] == np.arange(bins)) * magnitude[..., None]
    cells = side // cell
    return votes.reshape(n, cells, cell, cells, cell, bins).sum(axis=(2, 4))


def block_starts(cells: int, block: int, stride: int) -> list[int]:
    starts = list(range(0, cells - block + 1, stride))
    if starts[-1] != cells - block:
        starts.append(cells - block)
    return starts


def hog_features(
    X: Matrix,
    cell: int = 4,
    bins: int = 9,
    block: int = 2,
    block_stride: int = 2,
    eps: float = 1e-6,
) -> Matrix:
    """
    Histogram-of-oriented-gradients descriptor with L2 block normalisation.

    Blocks step by `block_stride` cells; when the stride does not land on the
    last cells, one more block is placed flush with the edge so every cell is
    covered. The default 7x7 cell grid gives 4x4 blocks, 576 features.
    """

    images, side = _as_images(X)
    cells = side // cell
    if block > cells or block_stride < 1:
        raise ParameterError(f"block {block} / stride {block_stride} do not fit {cells} cells")
    starts = block_starts(cells, block, block_stride)
    out = []
    for lo in range(0, images.shape[0], _HOG_CHUNK):
        hist = cell_histograms(images[lo : lo + _HOG_CHUNK], cell, bins)
        n = hist.shape[0]
        blocks = []
        for i in starts:
            for j in starts:
                v = hist[:, i : i + block, j : j + block, :].reshape(n, -1)
                blocks.append(v / np.sqrt((v * v).sum(axis=1, keepdims=True) + eps * eps))
        out.append(np.concatenate(blocks, axis=1))
    return np.concatenate(out, axis=0)


@dataclass(frozen=True)
class FeatureMap:
    """
    The deterministic map `phi` from raw inputs to interpretable features

    Parameters
    ----------
    `kind` `MapKind` `pxl` (pooled pixels), `hog`, or `identity` (synthetic data)
    `grid` `int` Pooling lattice size for `pxl`
    `cell` `int` HOG cell size in pixels
    `bins` `int` HOG orientation bins over [0, 180)
    `block` `int` HOG block size in cells
    `block_stride` `int` HOG block stride in cells
    """

    kind: MapKind = "pxl"
    grid: int = 7
    cell: int = 4
    bins: int = 9
    block: int = 2
    block_stride: int = 2

    def __call__(self, X: Matrix) -> Matrix:
        if self.kind == "pxl":
            return pixel_features(X, self.grid)
        if self.kind == "hog":
            return hog_features(X, self.cell, self.bins, self.block, self.block_stride)
        if self.kind == "identity":
            return np.atleast_2d(np.asarray(X, dtype=np.float64)).copy()
        raise ParameterError(f"unknown feature kind {self.kind!r}")

    @property
    def feature_kind(self) -> FeatureKind:
        return "synthetic" if self.kind == "identity" else self.kind

    @classmethod
    def for_kind(cls, kind: FeatureKind | MapKind) -> "FeatureMap":
        return cls(kind="identity" if kind == "synthetic" else kind)


def extract_features(X: Matrix, kind: FeatureKind | MapKind, params: FeatureMap | None = None) -> Matrix:
    """
    `Z = phi(X)` for the `pxl` or `hog` representation
    """

    feature_map = params if params is not None else FeatureMap.for_kind(kind)
    if params is not None and FeatureMap.for_kind(kind).kind != params.kind:
        raise ParameterError(f"kind {kind!r} conflicts with feature map {params.kind!r}")
    return feature_map(X)


@dataclass(frozen=True, eq=False)
class Standardizer:
    """
    Column-wise affine standardisation fit on clean training features
    """

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, Z: Matrix) -> "Standardizer":
        Z = np.atleast_2d(Z)
        scale = Z.std(axis=0)
        scale = np.where(scale > 1e-12, scale, 1.0)
        return cls(Z.mean(axis=0), scale)

    @classmethod
    def identity(cls, dim: int) -> "Standardizer":
        return cls(np.zeros(dim), np.ones(dim))

    def __call__(self, Z: Matrix) -> Matrix:
        Z = np.asarray(Z, dtype=np.float64)
        if Z.shape[-1] != self.mean.shape[0]:
            raise DimensionError(f"standardizer fit on {self.mean.shape[0]} columns, got {Z.shape[-1]}")
        return (Z - self.mean) / self.scale

    def take(self, kept_dims: np.ndarray) -> "Standardizer":
        return Standardizer(self.mean[kept_dims], self.scale[kept_dims])
