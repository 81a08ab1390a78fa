"""Image-quality metrics on reconstructed delta maps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MetricError
from .grid import ImageGrid2D

#: Smallest ROI (pixels) that gives a meaningful mean / standard deviation.
_MIN_ROI_PIXELS = 16


@dataclass(frozen=True)
class RoiSpec:
    """Signal and background regions as ``(row, col, height, width)`` pixel
    rectangles."""

    signal: tuple[int, int, int, int]
    background: tuple[int, int, int, int]

    def __post_init__(self):
        for name, rect in (("signal", self.signal), ("background", self.background)):
            if len(rect) != 4:
                raise MetricError(f"{name} ROI must be (row, col, height, width)")
            row, col, height, width = rect
            if row < 0 or col < 0 or height < 1 or width < 1:
                raise MetricError(f"{name} ROI {rect} is malformed")
            if height * width < _MIN_ROI_PIXELS:
                raise MetricError(
                    f"{name} ROI has {height * width} pixels, "
                    f"need at least {_MIN_ROI_PIXELS}")
        object.__setattr__(self, "signal", tuple(int(v) for v in self.signal))
        object.__setattr__(self, "background", tuple(int(v) for v in self.background))

    def masks(self, shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        """Boolean masks for an image of the given shape; the rectangles
        must fit inside it and must not overlap."""
        masks = []
        for name, rect in (("signal", self.signal), ("background", self.background)):
            row, col, height, width = rect
            if row + height > shape[0] or col + width > shape[1]:
                raise MetricError(
                    f"{name} ROI {rect} falls outside image of shape {shape}")
            mask = np.zeros(shape, dtype=bool)
            mask[row:row + height, col:col + width] = True
            masks.append(mask)
        if np.any(masks[0] & masks[1]):
            raise MetricError("signal and background ROIs overlap")
        return masks[0], masks[1]


def snr(image: ImageGrid2D, roi: RoiSpec, db: bool = False) -> float:
    """Mean of the signal ROI over the sample standard deviation (ddof=1)
    of the background ROI; ``db=True`` returns 20 log10 of the ratio."""
    sig_mask, bg_mask = roi.masks(image.data.shape)
    sig_mean = float(np.mean(image.data[sig_mask]))
    bg_std = float(np.std(image.data[bg_mask], ddof=1))
    if bg_std == 0.0:
        raise MetricError("background ROI has zero variance; SNR undefined")
    ratio = sig_mean / bg_std
    if not db:
        return ratio
    if ratio <= 0:
        raise MetricError(f"cannot express non-positive SNR {ratio} in dB")
    return float(20.0 * np.log10(ratio))


def rmse(image: ImageGrid2D, truth: ImageGrid2D) -> float:
    """Root-mean-square error against a ground-truth map on the same grid."""
    _check_same_grid(image, truth)
    diff = image.data - truth.data
    return float(np.sqrt(np.mean(diff * diff)))


def residual_map(image: ImageGrid2D, truth: ImageGrid2D) -> ImageGrid2D:
    """Pixelwise absolute error map."""
    _check_same_grid(image, truth)
    return ImageGrid2D(data=np.abs(image.data - truth.data),
                       pixel_size_nm=image.pixel_size_nm)


def _check_same_grid(a: ImageGrid2D, b: ImageGrid2D):
    if a.data.shape != b.data.shape:
        raise MetricError(
            f"image shapes differ: {a.data.shape} vs {b.data.shape}")
    if abs(a.pixel_size_nm - b.pixel_size_nm) > 1e-9:
        raise MetricError(
            f"pixel sizes differ: {a.pixel_size_nm} vs {b.pixel_size_nm}")
