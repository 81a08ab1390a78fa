"""Exception hierarchy for phasect.

Every error raised on purpose by the package derives from PhasectError so
callers (and the CLI) can distinguish domain failures from genuine bugs.
"""

from __future__ import annotations


class PhasectError(Exception):
    """Base class for all phasect errors."""


class GridError(PhasectError, ValueError):
    """Invalid image grid, sinogram, or geometry description."""


class PhantomError(PhasectError, ValueError):
    """Invalid phantom specification (unknown material, out-of-range delta,
    shape outside the grid)."""


class SplittingError(PhasectError, ValueError):
    """Invalid split-operator parameters (negative shift, shift too large
    for the detector)."""


class NoiseError(PhasectError, ValueError):
    """Invalid noise-model parameters (epsilon outside (0, 1], non-positive
    photon counts, degenerate variance)."""


class FilterError(PhasectError, ValueError):
    """Reconstruction filter misconfiguration (kind/filter mismatch,
    missing splitting distance for split data)."""


class MetricError(PhasectError, ValueError):
    """Invalid metric inputs (overlapping or undersized ROIs, shape
    mismatch, zero background variance)."""


class ConfigError(PhasectError, ValueError):
    """Malformed or inconsistent experiment configuration."""


class NumericalError(PhasectError, RuntimeError):
    """A numerical stage failed (inversion residual too large, solver
    diverged).  Carries enough context to diagnose the failure."""

    def __init__(self, message: str, *, view: int | None = None,
                 residual: float | None = None,
                 condition: float | None = None):
        parts = [message]
        if view is not None:
            parts.append(f"view={view}")
        if residual is not None:
            parts.append(f"residual={residual:.3e}")
        if condition is not None:
            parts.append(f"condition~{condition:.3e}")
        super().__init__("; ".join(parts))
        self.view = view
        self.residual = residual
        self.condition = condition
