"""Raster primitives: saliency grids, binary masks, and bounding boxes.

Saliency maps are 2-D float64 arrays, binary masks are 2-D uint8 arrays
with values in {0, 1}. Both are row-major with origin at the top-left.
All operations are pure functions over immutable inputs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    BoxOutOfBounds,
    EmptyMask,
    InvalidInput,
    InvalidRaster,
    ShapeMismatch,
)


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box with inclusive min/max row and column indices."""

    min_r: int
    min_c: int
    max_r: int
    max_c: int

    def __post_init__(self):
        if self.min_r < 0 or self.min_c < 0:
            raise InvalidInput(f"box coordinates must be nonnegative: {self}")
        if self.max_r < self.min_r or self.max_c < self.min_c:
            raise InvalidInput(f"box max must be >= min: {self}")

    @property
    def area(self):
        return (self.max_r - self.min_r + 1) * (self.max_c - self.min_c + 1)


def as_saliency(values):
    """Validate a grid of finite real scores and return it as float64.

    Only the pixel ordering of a saliency map matters to the metrics, so
    values outside [0, 1] are accepted here; loaders guarantee [0, 1].
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidRaster(f"saliency map must be a nonempty 2-D grid, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidRaster("saliency map contains non-finite values")
    return arr


def as_mask(values):
    """Validate a grid of {0,1} labels and return it as uint8."""
    arr = np.asarray(values)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidRaster(f"mask must be a nonempty 2-D grid, got shape {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    if not np.all((arr == 0) | (arr == 1)):
        raise InvalidRaster("mask values must be exactly 0 or 1")
    return arr.astype(np.uint8)


def normalize_saliency(raw):
    """Min-max rescale a raw score grid to [0, 1].

    A constant grid normalizes to all zeros; the downstream metrics are
    rank-based, so this convention is observationally irrelevant.
    """
    arr = as_saliency(raw)
    lo = arr.min()
    hi = arr.max()
    if hi > lo:
        return (arr - lo) / (hi - lo)
    return np.zeros_like(arr)


def rasterize_box(box, width, height):
    """Paint an inclusive bounding box as a binary mask of the given size."""
    if box.max_r >= height or box.max_c >= width:
        raise BoxOutOfBounds(box, width, height)
    mask = np.zeros((height, width), dtype=np.uint8)
    mask[box.min_r : box.max_r + 1, box.min_c : box.max_c + 1] = 1
    return mask


def union_masks(masks):
    """Pixelwise OR of a nonempty list of same-shape binary masks."""
    if not masks:
        raise InvalidInput("union_masks requires at least one mask")
    out = as_mask(masks[0]).copy()
    for m in masks[1:]:
        m = as_mask(m)
        if m.shape != out.shape:
            raise ShapeMismatch(out.shape, m.shape, "union_masks")
        np.maximum(out, m, out=out)
    return out


def containment(inner, outer):
    """Fraction of inner's positive pixels that are also positive in outer."""
    inner = as_mask(inner)
    outer = as_mask(outer)
    if inner.shape != outer.shape:
        raise ShapeMismatch(inner.shape, outer.shape, "containment")
    inner_count = int(inner.sum())
    if inner_count == 0:
        raise EmptyMask("containment requires a nonempty inner mask")
    overlap = int(np.sum((inner == 1) & (outer == 1)))
    return overlap / inner_count


def mask_counts(mask):
    """Return (positives, negatives) pixel counts of a binary mask."""
    mask = as_mask(mask)
    p = int(mask.sum())
    return p, mask.size - p
