"""Command-line interface.

Subcommands mirror the pipeline stages so each can be run and inspected
separately, with sinograms handed between stages as ``.npz`` archives:

    phasect phantom      render the phantom and write its image files
    phasect project      phantom -> clean sinogram (clean.npz)
    phasect split        clean.npz -> split.npz (operator + optional noise)
    phasect invert       split.npz -> inverted.npz
    phasect denoise      inverted.npz -> denoised.npz
    phasect reconstruct  any sinogram -> delta-map image files
    phasect pipeline     full three-route comparison + metrics.csv
    phasect sweep        separation sweep -> sweep.csv + images

Exit codes: 0 success, 1 usage, 2 configuration, 3 numerical/stage failure.
The output directory resolves as --output-dir, else $PHASECT_OUTPUT_DIR,
else the config's ``output.dir``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from ._backend import active_backend
from .config import ExperimentConfig, apply_overrides, load_config
from .errors import ConfigError, PhasectError
from .fbp import reconstruct
from .grid import SinogramKind
from .io import load_sinogram, save_sinogram, write_csv, write_image
from .metrics import residual_map
from .noise import inject_noise
from .phantom import render_phantom
from .pipeline import ExperimentRunner
from .pwlstv import denoise_sinogram
from .splitop import build_operator, invert_sinogram, shift_from_separation, split_sinogram

log = logging.getLogger("phasect.cli")

OUTPUT_DIR_ENV = "PHASECT_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="YAML config overlaid on the packaged defaults")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        dest="overrides",
                        help="override a config entry, e.g. noise.seed=7")
    common.add_argument("--output-dir", metavar="DIR",
                        help=f"output directory (default: ${OUTPUT_DIR_ENV} "
                             "or the config's output.dir)")
    common.add_argument("--seed", type=int, help="shorthand for noise.seed")
    common.add_argument("-v", "--verbose", action="store_true",
                        help="debug-level logging")

    parser = _Parser(prog="phasect",
                     description="Simulation and reconstruction for "
                                 "split-signal phase-contrast CT")
    parser.add_argument("--version", action="version",
                        version=f"phasect {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub.add_parser("phantom", parents=[common],
                   help="render the phantom and write its image files")
    sub.add_parser("project", parents=[common],
                   help="forward-project the phantom to clean.npz")

    p = sub.add_parser("split", parents=[common],
                       help="apply the splitting operator (and noise) to a "
                            "clean sinogram")
    p.add_argument("--input", metavar="NPZ", help="clean sinogram archive")
    p.add_argument("--no-noise", action="store_true",
                   help="skip noise injection")

    p = sub.add_parser("invert", parents=[common],
                       help="directly invert the splitting operator")
    p.add_argument("--input", metavar="NPZ", help="split sinogram archive")

    p = sub.add_parser("denoise", parents=[common],
                       help="penalized weighted-least-squares refinement")
    p.add_argument("--input", metavar="NPZ", help="inverted sinogram archive")

    p = sub.add_parser("reconstruct", parents=[common],
                       help="filtered backprojection of a sinogram archive")
    p.add_argument("--input", metavar="NPZ", help="sinogram archive")
    p.add_argument("--output", metavar="NAME",
                   help="basename for the image files (default derives "
                        "from the sinogram kind)")

    p = sub.add_parser("pipeline", parents=[common],
                       help="run all three reconstruction routes and write "
                            "images + metrics.csv")
    p.add_argument("--save-intermediates", action="store_true",
                   help="also archive the stage sinograms")

    sub.add_parser("sweep", parents=[common],
                   help="sweep the splitting separation and write the "
                        "per-separation metrics to sweep.csv")
    return parser


def _configure(args) -> tuple[ExperimentConfig, Path]:
    config = load_config(args.config)
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"noise.seed={args.seed}")
    config = apply_overrides(config, overrides)
    outdir = Path(args.output_dir or os.environ.get(OUTPUT_DIR_ENV)
                  or config.output_dir())
    outdir.mkdir(parents=True, exist_ok=True)
    log.info("phasect %s | backend=%s | config sha256=%s | seed=%d",
             __version__, active_backend(), config.config_hash(), config.seed())
    return config, outdir


def _input_path(args, outdir: Path, default_name: str) -> Path:
    if args.input:
        return Path(args.input)
    return outdir / default_name


def _operator_for(config: ExperimentConfig, m: int, pitch_nm: float):
    return build_operator(
        m, shift_from_separation(config.delta_s_nm(), pitch_nm),
        gamma=config.gamma())


def _cmd_phantom(args, config: ExperimentConfig, outdir: Path) -> int:
    image = render_phantom(config.phantom_spec(), n=config.phantom_n(),
                           pixel_size_nm=config.pixel_size_nm())
    paths = write_image(image, outdir / "phantom", config.image_window())
    log.info("wrote %s", paths["pgm"])
    return 0

def _cmd_project(args, config: ExperimentConfig, outdir: Path) -> int:
    runner = ExperimentRunner(config)
    path = save_sinogram(runner.clean_sinogram, outdir / "clean.npz")
    log.info("wrote %s", path)
    return 0


def _cmd_split(args, config: ExperimentConfig, outdir: Path) -> int:
    sino = load_sinogram(_input_path(args, outdir, "clean.npz"))
    op = _operator_for(config, sino.m, sino.element_pitch_nm)
    split = split_sinogram(sino, op)
    if not args.no_noise:
        split = inject_noise(split, config.noise_model(), config.seed())
    path = save_sinogram(split, outdir / "split.npz")
    log.info("wrote %s", path)
    return 0


def _cmd_invert(args, config: ExperimentConfig, outdir: Path) -> int:
    sino = load_sinogram(_input_path(args, outdir, "split.npz"))
    op = _operator_for(config, sino.m, sino.element_pitch_nm)
    path = save_sinogram(invert_sinogram(sino, op), outdir / "inverted.npz")
    log.info("wrote %s", path)
    return 0


def _cmd_denoise(args, config: ExperimentConfig, outdir: Path) -> int:
    sino = load_sinogram(_input_path(args, outdir, "inverted.npz"))
    op = _operator_for(config, sino.m, sino.element_pitch_nm)
    t0 = time.perf_counter()
    denoised, reports = denoise_sinogram(sino, op, config.noise_model(),
                                         config=config.pwls_config(),
                                         return_reports=True)
    log.info("refined %d views, %d total iterations, %.1f ms", sino.n_views,
             sum(r.iterations_run for r in reports),
             1e3 * (time.perf_counter() - t0))
    path = save_sinogram(denoised, outdir / "denoised.npz")
    log.info("wrote %s", path)
    return 0


def _cmd_reconstruct(args, config: ExperimentConfig, outdir: Path) -> int:
    sino = load_sinogram(_input_path(args, outdir, "denoised.npz"))
    delta_s = config.delta_s_nm() if sino.kind is SinogramKind.SPLIT else None
    image = reconstruct(sino, config.geometry().wavenumber_per_nm,
                        config.recon_config(), delta_s_nm=delta_s)
    name = args.output or f"recon_{sino.kind.value}"
    paths = write_image(image, outdir / name, config.image_window())
    log.info("wrote %s", paths["pgm"])
    return 0


def _cmd_pipeline(args, config: ExperimentConfig, outdir: Path) -> int:
    runner = ExperimentRunner(config)
    write_image(runner.phantom, outdir / "phantom", config.image_window())
    results = runner.run_all()
    rows = []
    for name, result in results.items():
        write_image(result.image, outdir / f"recon_{name}", config.image_window())
        write_image(residual_map(result.image, result.truth),
                    outdir / f"residual_{name}", config.residual_window())
        rows.append([name, result.snr, result.rmse,
                     result.iterations, result.runtime_ms])
        if args.save_intermediates:
            for stage, sino in result.sinograms.items():
                save_sinogram(sino, outdir / f"{name}_{stage}.npz")
    path = write_csv(outdir / "metrics.csv",
                     ["pipeline", "snr", "rmse", "iterations", "runtime_ms"],
                     rows)
    log.info("wrote %s", path)
    return 0


def _cmd_sweep(args, config: ExperimentConfig, outdir: Path) -> int:
    runner = ExperimentRunner(config)
    result = runner.run_sweep()
    for ds, message in result.errors:
        log.error("separation %.6g nm failed: %s", ds, message)
    path = write_csv(outdir / "sweep.csv",
                     ["delta_s_nm", "snr", "rmse", "iterations", "runtime_ms"],
                     [[r.delta_s_nm, r.snr, r.rmse, r.iterations, r.runtime_ms]
                      for r in result.rows])
    log.info("wrote %s with %d rows (%d failures)", path, len(result.rows),
             len(result.errors))
    if not result.rows:
        print("phasect: all sweep entries failed", file=sys.stderr)
        return 3
    return 0


_COMMANDS = {
    "phantom": _cmd_phantom,
    "project": _cmd_project,
    "split": _cmd_split,
    "invert": _cmd_invert,
    "denoise": _cmd_denoise,
    "reconstruct": _cmd_reconstruct,
    "pipeline": _cmd_pipeline,
    "sweep": _cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        config, outdir = _configure(args)
        return _COMMANDS[args.command](args, config, outdir)
    except ConfigError as exc:
        print(f"phasect: configuration error: {exc}", file=sys.stderr)
        return 2
    except PhasectError as exc:
        print(f"phasect: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
