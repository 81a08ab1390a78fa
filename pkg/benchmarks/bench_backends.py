"""Compare the jit and pure-numpy compute backends on the hot paths.

Runs the forward projector, the filtered backprojection, and the
penalized weighted-least-squares refinement through the public API once
per backend (selected via the PHASECT_BACKEND environment flag), timing
best-of-N and reporting the speedup plus the worst output deviation
between the two backends.

Usage:
    python3 benchmarks/bench_backends.py [--views 90] [--rows 32]
                                         [--iters 40] [--repeats 3]
"""
from __future__ import annotations

import argparse
import os
import time

import numpy as np

from phasect import (
    BACKEND_ENV,
    NoiseModel,
    ProjectionConfig,
    PwlsConfig,
    ReconConfig,
    Sinogram,
    SinogramKind,
    SystemGeometry,
    build_operator,
    default_phantom_spec,
    denoise_sinogram,
    forward_project,
    inject_noise,
    reconstruct,
    render_phantom,
    shift_from_separation,
    split_sinogram,
)
from phasect.splitop import invert_sinogram

BACKENDS = ("numpy", "numba")


def best_of(repeats: int, fn):
    best = np.inf
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def build_workloads(views: int, rows: int, iters: int):
    geometry = SystemGeometry(n_views=views, angular_step_deg=360.0 / views)
    phantom = render_phantom(default_phantom_spec())
    projection = ProjectionConfig(m=600)
    recon = ReconConfig()
    pwls = PwlsConfig(max_iters=iters, rel_tol=0.0)

    os.environ[BACKEND_ENV] = "numpy"  # deterministic inputs for every stage
    clean = forward_project(phantom, geometry, projection)
    op = build_operator(clean.m,
                        shift_from_separation(200.0, clean.element_pitch_nm))
    noisy = inject_noise(split_sinogram(clean, op), NoiseModel(), seed=1234)
    inverted = invert_sinogram(noisy, op)
    subset = Sinogram(np.ascontiguousarray(inverted.data[:rows]),
                      inverted.angles_deg[:rows], inverted.element_pitch_nm,
                      SinogramKind.INVERTED)

    return {
        "forward_project": lambda: forward_project(
            phantom, geometry, projection).data,
        "reconstruct": lambda: reconstruct(
            clean, geometry.wavenumber_per_nm, recon).data,
        f"denoise ({rows} rows x {iters} iters)": lambda: denoise_sinogram(
            subset, op, NoiseModel(), config=pwls).data,
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--views", type=int, default=90,
                        help="projection views (default 90)")
    parser.add_argument("--rows", type=int, default=32,
                        help="sinogram rows pushed through the solver")
    parser.add_argument("--iters", type=int, default=40,
                        help="fixed solver iteration count")
    parser.add_argument("--repeats", type=int, default=3,
                        help="repeats per timing (best is reported)")
    args = parser.parse_args()

    workloads = build_workloads(args.views, args.rows, args.iters)

    times: dict[str, dict[str, float]] = {}
    outputs: dict[str, dict[str, np.ndarray]] = {}
    for backend in BACKENDS:
        os.environ[BACKEND_ENV] = backend
        for name, fn in workloads.items():
            fn()  # warm-up: jit compilation / cache load stays untimed
            elapsed, result = best_of(args.repeats, fn)
            times.setdefault(name, {})[backend] = elapsed
            outputs.setdefault(name, {})[backend] = result

    width = max(len(name) for name in workloads)
    print(f"{'workload':<{width}}  {'numpy':>10}  {'numba':>10}  "
          f"{'speedup':>8}  {'max|diff|':>10}")
    for name in workloads:
        t_np, t_nb = times[name]["numpy"], times[name]["numba"]
        dev = float(np.max(np.abs(outputs[name]["numpy"]
                                  - outputs[name]["numba"])))
        print(f"{name:<{width}}  {t_np:>9.4f}s  {t_nb:>9.4f}s  "
              f"{t_np / t_nb:>7.1f}x  {dev:>10.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
