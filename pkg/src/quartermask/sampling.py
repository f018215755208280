"""Simulated quarter-sampled acquisition.

A high-resolution image is measured through a (tiled) quarter-sampling
mask; only the pixels under transparent mask positions are kept. For
comparison, :func:`box_downscale_2x2` gives the image an unmasked
low-resolution sensor with the same pixel count would record.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mask import DimensionError, QuarterMask, tile_to

__all__ = ["SampledImage", "box_downscale_2x2", "crop_even", "subsample"]


@dataclass(frozen=True, eq=False)
class SampledImage:
    """Image dimensions plus the intensities known at sampled positions.

    Parameters
    ----------
    values : ndarray of shape (H, W)
        Intensities; only entries where ``known`` is set carry information.
    known : ndarray of bool, shape (H, W)
        Sampled positions.
    mask : QuarterMask, optional
        The tiled mask that produced ``known``, if any.
    """

    values: np.ndarray
    known: np.ndarray
    mask: QuarterMask | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        known = np.array(self.known, dtype=bool)
        if values.shape != known.shape or values.ndim != 2:
            raise DimensionError("values and known must be 2-D arrays of equal shape")
        if not np.all(np.isfinite(values[known])):
            raise ValueError("known intensities must be finite")
        values = np.where(known, values, 0.0)
        values.flags.writeable = False
        known.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "known", known)

    @classmethod
    def from_mask(cls, image, mask: QuarterMask) -> "SampledImage":
        return cls(image, mask.grid, mask)

    @property
    def shape(self):
        return self.values.shape

    @property
    def positions(self) -> np.ndarray:
        """``(n, 2)`` array of known (row, col) positions in row-major order."""
        return np.argwhere(self.known)

    @property
    def known_values(self) -> np.ndarray:
        return self.values[self.known]

    def as_image(self) -> np.ndarray:
        """Debug view: known intensities, zeros elsewhere."""
        return self.values.copy()


def crop_even(image) -> np.ndarray:
    """Drop the last row and/or column so both dimensions are even."""
    h, w = image.shape
    return image[: h - h % 2, : w - w % 2]


def subsample(image, mask: QuarterMask) -> SampledImage:
    """Keep ``image`` only at the transparent pixels of the tiled ``mask``."""
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape
    if h % 2 or w % 2:
        raise DimensionError(f"image dimensions must be even, got {h}x{w}")
    if mask.height > h or mask.width > w:
        raise DimensionError(
            f"mask {mask.height}x{mask.width} is larger than image {h}x{w}"
        )
    if mask.shape != (h, w):
        mask = tile_to(mask, h, w)
    return SampledImage.from_mask(image, mask)


def box_downscale_2x2(image) -> np.ndarray:
    """Average non-overlapping 2x2 blocks."""
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape
    if h % 2 or w % 2:
        raise DimensionError(f"image dimensions must be even, got {h}x{w}")
    return image.reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))
