"""Shared fixtures.

The full-scale experiment objects (default phantom, its clean projection,
the three default pipelines, and the three-seed sweep) are expensive, so
they are computed once per session and shared read-only between the unit
tests and the acceptance suite.
"""
from __future__ import annotations

import numpy as np
import pytest

from phasect.config import ExperimentConfig, apply_overrides, load_config
from phasect.pipeline import ExperimentRunner

SWEEP_SEEDS = (1234, 7, 99)


@pytest.fixture(scope="session")
def default_config() -> ExperimentConfig:
    return load_config()


@pytest.fixture(scope="session")
def default_runner(default_config) -> ExperimentRunner:
    """Runner over the default config; phantom/projection cached inside."""
    return ExperimentRunner(default_config)


@pytest.fixture(scope="session")
def default_pipelines(default_runner):
    """The three default pipelines (seed 1234, Δs=200 nm), run once."""
    return default_runner.run_all()


@pytest.fixture(scope="session")
def sweep_curves(default_config):
    """Default 8-point sweep run on three seeds: {seed: [(delta_s, snr)]}."""
    curves = {}
    for seed in SWEEP_SEEDS:
        cfg = apply_overrides(default_config, [f"noise.seed={seed}"])
        result = ExperimentRunner(cfg).run_sweep()
        assert not result.errors, f"sweep failures at seed {seed}: {result.errors}"
        curves[seed] = [(row.delta_s_nm, row.snr) for row in result.rows]
    return curves


def small_experiment_config(**overrides) -> ExperimentConfig:
    """A fast, fully valid experiment: 128² phantom, 90 views, 160 elements.

    Keyword overrides are dotted config keys with ``__`` for the dot, e.g.
    ``noise__seed=7``.
    """
    assignments = [
        "phantom.n=128",
        ("phantom.shapes=[{type: circle, cx: 50.0, cy: 58.0, radius: 26.0,"
         " material: polystyrene},"
         " {type: ring, cx: 84.0, cy: 70.0, r_inner: 8.0, r_outer: 14.0,"
         " material: lung_tissue},"
         " {type: bar, cx: 64.0, cy: 96.0, width: 30.0, height: 10.0,"
         " material: protein}]"),
        "geometry.n_views=90",
        "geometry.angular_step_deg=4.0",
        "geometry.n_detector=160",
        "splitting.delta_s_nm=80.0",
        "splitting.sweep_nm=[20.0, 80.0, 100.0]",
        "pwls.max_iters=40",
        "recon.output_n=128",
        "rois.signal=[52, 44, 8, 8]",
        "rois.background=[8, 8, 24, 24]",
    ]
    assignments += [f"{k.replace('__', '.')}={v}" for k, v in overrides.items()]
    return apply_overrides(load_config(), assignments)


@pytest.fixture
def small_config() -> ExperimentConfig:
    return small_experiment_config()


def smooth_rows(count: int, m: int, seed: int) -> np.ndarray:
    """Random smooth, strictly positive test signals (band-limited cosines)."""
    rng = np.random.default_rng(seed)
    u = np.linspace(0.0, 1.0, m)
    rows = np.empty((count, m))
    for r in range(count):
        c = rng.normal(0.0, 1.0, 7)
        rows[r] = sum(c[n] * np.cos((n + 1) * np.pi * u + c[6]) for n in range(6))
        rows[r] += np.abs(rows[r]).max() + 1.0
    return rows
