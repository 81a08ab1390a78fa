"""Phase-retrieval noise model for split projections.

The retrieved phase at detector element q carries approximately Gaussian
noise whose variance is set by the fringe visibility and the photon budget
accumulated over the phase steps:

    sigma_q^2 = 2 / (epsilon^2 * sum_k I_q^(k))   [rad^2]

with epsilon the visibility and I_q^(k) the mean photon count at element q
in phase step k.  With a flat illumination of ``photons`` counts per step
and ``phase_steps`` steps the sum is phase_steps * photons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoiseError
from .grid import Sinogram

#: Default fringe visibility.
DEFAULT_EPSILON = 0.7

#: Default photon budget per detector element per view (total over steps).
DEFAULT_TOTAL_PHOTONS = 1e4


def variance(epsilon: float, total_photons) -> np.ndarray | float:
    """Phase variance [rad^2] for visibility ``epsilon`` and a total photon
    count (scalar or per-element array) summed over phase steps."""
    if not (0 < epsilon <= 1):
        raise NoiseError(f"visibility must lie in (0, 1], got {epsilon}")
    total = np.asarray(total_photons, dtype=np.float64)
    if np.any(~(total > 0)):
        raise NoiseError("photon counts must be positive")
    out = 2.0 / (epsilon ** 2 * total)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class NoiseModel:
    """Visibility + photon budget; ``photons`` is per phase step, scalar or
    a per-element array."""

    epsilon: float = DEFAULT_EPSILON
    photons: float | np.ndarray = DEFAULT_TOTAL_PHOTONS
    phase_steps: int = 1

    def __post_init__(self):
        if not (0 < self.epsilon <= 1):
            raise NoiseError(f"visibility must lie in (0, 1], got {self.epsilon}")
        if self.phase_steps < 1:
            raise NoiseError(f"need at least one phase step, got {self.phase_steps}")
        photons = np.asarray(self.photons, dtype=np.float64)
        if photons.ndim > 1:
            raise NoiseError("per-element photon counts must be 1D")
        if np.any(~(photons > 0)):
            raise NoiseError("photon counts must be positive")
        object.__setattr__(self, "photons",
                           float(photons) if photons.ndim == 0 else photons)

    def total_photons(self):
        """Counts per element per view summed over phase steps."""
        return self.phase_steps * np.asarray(self.photons, dtype=np.float64)

    def variance_per_element(self, m: int) -> np.ndarray:
        """Length-m vector of phase variances sigma_q^2."""
        total = np.broadcast_to(self.total_photons(), (m,))
        out = 2.0 / (self.epsilon ** 2 * total)
        if not np.all(np.isfinite(out)):
            raise NoiseError("photon counts produce non-finite variance")
        return np.ascontiguousarray(out)


def inject_noise(sino: Sinogram, model: NoiseModel, seed: int) -> Sinogram:
    """Add zero-mean Gaussian noise with the model's per-element variance to
    every view.  Deterministic for a given seed; shape and angle metadata
    are preserved bit-exactly."""
    sigma = np.sqrt(model.variance_per_element(sino.m))
    rng = np.random.default_rng(seed)
    noisy = sino.data + rng.normal(0.0, 1.0, size=sino.data.shape) * sigma
    return sino.with_data(noisy)


def build_weight_matrix(model: NoiseModel, m: int) -> np.ndarray:
    """Diagonal entries of the noise covariance Lambda = diag(sigma_q^2).

    The penalized solver weights residuals by Lambda^{-1}; a zero variance
    (infinite weight) is rejected here.
    """
    var = model.variance_per_element(m)
    if np.any(var <= 0):
        raise NoiseError("noise variance must be positive for weighting")
    return var
