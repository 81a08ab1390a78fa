"""Kernel backend selection.

Hot loops (forward projection, backprojection, per-row denoising) exist in
two interchangeable implementations: numba-jitted loops and a pure-numpy
fallback.  The active backend is chosen by the ``PHASECT_BACKEND``
environment variable:

* ``auto`` (default): numba if importable, else numpy;
* ``numba``: require numba, error if unavailable;
* ``numpy``: force the fallback.
"""

from __future__ import annotations

import importlib
import logging
import os

from .errors import ConfigError

BACKEND_ENV = "PHASECT_BACKEND"
_CHOICES = ("auto", "numba", "numpy")

log = logging.getLogger(__name__)


def get_kernels(name: str | None = None):
    """Return the kernel module for ``name`` (default: env var / auto)."""
    if name is None:
        name = os.environ.get(BACKEND_ENV, "auto").strip().lower() or "auto"
    if name not in _CHOICES:
        raise ConfigError(
            f"unknown backend {name!r} (choices: {', '.join(_CHOICES)})")
    if name == "numpy":
        return importlib.import_module("phasect._kernels_numpy")
    try:
        return importlib.import_module("phasect._kernels_numba")
    except ImportError as exc:
        if name == "numba":
            raise ConfigError(f"numba backend requested but unavailable: {exc}")
        log.debug("numba unavailable (%s); falling back to numpy kernels", exc)
        return importlib.import_module("phasect._kernels_numpy")


def active_backend() -> str:
    """Name of the backend ``get_kernels()`` currently resolves to."""
    return get_kernels().BACKEND_NAME
