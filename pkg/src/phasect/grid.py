"""Core containers: image grids, sinograms, and acquisition geometry.

Conventions used throughout the package:

* images are square ``n x n`` float64 arrays of refractive-index decrements
  (delta, dimensionless); pixel ``(row, col)`` has its center at physical
  offsets ``((col - c) * pixel_size, (row - c) * pixel_size)`` from the
  rotation axis, with ``c = (n - 1) / 2``;
* a sinogram row is one projection view; column ``q`` is detector element
  ``q`` whose ray passes at signed distance ``(q - (m - 1)/2) * pitch``
  from the rotation axis;
* projection values are accumulated phase in radians:
  ``phi(theta, u) = k * integral of delta along the ray``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import GridError

#: Photon energy [keV] times wavelength [nm] (hc in keV.nm).
HC_KEV_NM = 1.2398


def _as_readonly_f64(a, name: str, ndim: int) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
    if arr.ndim != ndim:
        raise GridError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


class SinogramKind(Enum):
    """What a sinogram's values mean, which in turn selects the valid
    reconstruction filter."""

    CLEAN = "clean"          # unsplit noiseless phase projections
    SPLIT = "split"          # split-operator output (differential-like)
    INVERTED = "inverted"    # direct inversion of split data
    DENOISED = "denoised"    # penalized weighted-least-squares output


@dataclass(frozen=True)
class ImageGrid2D:
    """A square 2D field sampled on an isotropic pixel grid."""

    data: np.ndarray
    pixel_size_nm: float

    def __post_init__(self):
        data = _as_readonly_f64(self.data, "image data", 2)
        if data.shape[0] != data.shape[1]:
            raise GridError(f"image must be square, got shape {data.shape}")
        if data.shape[0] < 2:
            raise GridError("image must be at least 2 x 2")
        if not np.all(np.isfinite(data)):
            raise GridError("image contains non-finite values")
        if not (self.pixel_size_nm > 0):
            raise GridError(f"pixel size must be positive, got {self.pixel_size_nm}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "pixel_size_nm", float(self.pixel_size_nm))

    @property
    def n(self) -> int:
        """Grid side length in pixels."""
        return self.data.shape[0]

    @property
    def extent_nm(self) -> float:
        """Physical side length of the grid."""
        return self.n * self.pixel_size_nm


@dataclass(frozen=True)
class Sinogram:
    """A stack of 1D projections, one row per view."""

    data: np.ndarray
    angles_deg: np.ndarray
    element_pitch_nm: float
    kind: SinogramKind

    def __post_init__(self):
        data = _as_readonly_f64(self.data, "sinogram data", 2)
        angles = _as_readonly_f64(self.angles_deg, "view angles", 1)
        if data.shape[0] != angles.shape[0]:
            raise GridError(
                f"sinogram has {data.shape[0]} rows but {angles.shape[0]} view angles")
        if angles.shape[0] < 1:
            raise GridError("sinogram needs at least one view")
        if np.any(np.diff(angles) <= 0):
            raise GridError("view angles must be strictly increasing")
        if angles[0] < 0 or angles[-1] >= 360.0:
            raise GridError("view angles must lie in [0, 360) degrees")
        if not (self.element_pitch_nm > 0):
            raise GridError(
                f"element pitch must be positive, got {self.element_pitch_nm}")
        if not isinstance(self.kind, SinogramKind):
            raise GridError(f"kind must be a SinogramKind, got {self.kind!r}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "angles_deg", angles)
        object.__setattr__(self, "element_pitch_nm", float(self.element_pitch_nm))

    @property
    def n_views(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        """Detector element count."""
        return self.data.shape[1]

    def with_data(self, data: np.ndarray, kind: SinogramKind | None = None) -> "Sinogram":
        """New sinogram with replaced values, metadata carried over bit-exactly."""
        if np.shape(data) != self.data.shape:
            raise GridError(
                f"replacement data shape {np.shape(data)} does not match "
                f"the sinogram's {self.data.shape}")
        return Sinogram(data=data, angles_deg=self.angles_deg,
                        element_pitch_nm=self.element_pitch_nm,
                        kind=self.kind if kind is None else kind)


@dataclass(frozen=True)
class SystemGeometry:
    """Acquisition geometry of the magnifying phase-contrast CT system."""

    energy_kev: float = 8.0
    magnification: float = 650.0
    detector_pitch_um: float = 6.5
    n_views: int = 720
    angular_step_deg: float = 0.5

    def __post_init__(self):
        if not (self.energy_kev > 0):
            raise GridError(f"photon energy must be positive, got {self.energy_kev}")
        if not (self.magnification > 0):
            raise GridError(f"magnification must be positive, got {self.magnification}")
        if not (self.detector_pitch_um > 0):
            raise GridError(
                f"detector pitch must be positive, got {self.detector_pitch_um}")
        if self.n_views < 1:
            raise GridError(f"need at least one view, got {self.n_views}")
        if not (self.angular_step_deg > 0):
            raise GridError(
                f"angular step must be positive, got {self.angular_step_deg}")
        span = self.n_views * self.angular_step_deg
        if abs(span - 360.0) > 1e-9:
            raise GridError(
                f"views must cover a full turn: n_views * angular_step = {span} deg")

    @property
    def wavelength_nm(self) -> float:
        return HC_KEV_NM / self.energy_kev

    @property
    def wavenumber_per_nm(self) -> float:
        """k = 2 pi / lambda."""
        return 2.0 * np.pi / self.wavelength_nm

    @property
    def element_pitch_nm(self) -> float:
        """Detector pitch demagnified into the object plane."""
        return effective_pitch(self)

    def angles_deg(self) -> np.ndarray:
        """View angles, ascending from zero."""
        return np.arange(self.n_views, dtype=np.float64) * self.angular_step_deg


def effective_pitch(geometry: SystemGeometry) -> float:
    """Object-plane sampling pitch in nm: detector pitch / magnification."""
    return geometry.detector_pitch_um * 1e3 / geometry.magnification
