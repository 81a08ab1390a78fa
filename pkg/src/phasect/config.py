"""Experiment configuration: YAML loading, strict validation, overrides.

A configuration is a nested mapping with the sections shown in the
packaged ``data/default.yaml``.  ``load_config`` merges a user file over
the defaults; ``apply_overrides`` merges ``key.subkey=value`` strings on
top of that; ``ExperimentConfig.from_dict`` validates strictly (unknown
sections or keys are errors) and exposes typed accessors that build the
domain objects.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .errors import ConfigError, PhasectError
from .fbp import ReconConfig
from .grid import SystemGeometry
from .metrics import RoiSpec
from .noise import NoiseModel
from .phantom import (Bar, Circle, Material, PhantomSpec, Ring,
                      default_phantom_spec)
from .projector import ProjectionConfig
from .pwlstv import PwlsConfig

_SECTIONS = {
    "geometry": {"energy_kev", "magnification", "detector_pitch_um",
                 "n_views", "angular_step_deg", "n_detector"},
    "phantom": {"n", "pixel_size_nm", "delta_table", "shapes"},
    "projection": {"sampling_step_nm"},
    "splitting": {"delta_s_nm", "gamma", "sweep_nm"},
    "noise": {"epsilon", "photons", "phase_steps", "seed"},
    "pwls": {"alpha", "tau", "tv_eps", "max_iters", "rel_tol", "nonneg"},
    "recon": {"output_n", "output_pixel_size_nm", "window", "window_cutoff"},
    "rois": {"signal", "background"},
    "output": {"dir", "save_intermediates", "image_window", "residual_window"},
}

_SHAPE_FIELDS = {
    "circle": ({"type", "cx", "cy", "radius", "material"}, Circle),
    "ring": ({"type", "cx", "cy", "r_inner", "r_outer", "material"}, Ring),
    "bar": ({"type", "cx", "cy", "width", "height", "material"}, Bar),
}


def default_config_dict() -> dict:
    """The packaged defaults as a plain nested dict."""
    text = resources.files("phasect").joinpath("data/default.yaml").read_text()
    return yaml.safe_load(text)


def load_config(path: str | Path | None = None) -> "ExperimentConfig":
    """Defaults, optionally overlaid with a user YAML file."""
    merged = default_config_dict()
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}")
        try:
            user = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed YAML in {path}: {exc}")
        if user is None:
            user = {}
        if not isinstance(user, dict):
            raise ConfigError(f"config root must be a mapping, got {type(user).__name__}")
        merged = _deep_merge(merged, user)
    return ExperimentConfig.from_dict(merged)


def _deep_merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for key, value in over.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def apply_overrides(config: "ExperimentConfig",
                    assignments: list[str]) -> "ExperimentConfig":
    """Apply ``section.key=value`` strings (values parsed as YAML)."""
    if not assignments:
        return config
    raw = config.as_dict()
    for item in assignments:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        parts = key.strip().split(".")
        try:
            parsed = yaml.safe_load(value)
        except yaml.YAMLError as exc:
            raise ConfigError(f"override value {value!r} is not valid YAML: {exc}")
        if parts == ["splitting"] and isinstance(parsed, list):
            # ``splitting=[...]`` is shorthand for the sweep list.
            parts = ["splitting", "sweep_nm"]
        node = raw
        for part in parts[:-1]:
            nxt = node.get(part)
            if not isinstance(nxt, dict):
                raise ConfigError(f"override {item!r}: no section {part!r}")
            node = nxt
        node[parts[-1]] = parsed
    return ExperimentConfig.from_dict(raw)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description (immutable; rebuild to change)."""

    raw: dict = field(repr=False)

    @staticmethod
    def from_dict(raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a mapping")
        unknown = set(raw) - set(_SECTIONS)
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")
        for section, keys in _SECTIONS.items():
            if section not in raw:
                raise ConfigError(f"missing config section {section!r}")
            if not isinstance(raw[section], dict):
                raise ConfigError(f"config section {section!r} must be a mapping")
            bad = set(raw[section]) - keys
            if bad:
                raise ConfigError(
                    f"unknown keys in section {section!r}: {sorted(bad)}")
            missing = keys - set(raw[section])
            if missing:
                raise ConfigError(
                    f"missing keys in section {section!r}: {sorted(missing)}")
        cfg = ExperimentConfig(raw=raw)
        try:
            cfg.geometry()
            cfg.phantom_spec()
            cfg.projection_config()
            cfg.noise_model()
            cfg.pwls_config()
            cfg.recon_config()
            cfg.rois()
            cfg.delta_s_nm()
            cfg.sweep_values()
            cfg.gamma()
            cfg.seed()
            cfg.image_window()
            cfg.residual_window()
        except PhasectError as exc:
            raise ConfigError(f"invalid configuration: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid configuration value: {exc}") from exc
        return cfg

    def as_dict(self) -> dict:
        """Deep copy of the underlying mapping."""
        return yaml.safe_load(yaml.safe_dump(self.raw))

    def config_hash(self) -> str:
        """sha256 of the canonical serialized form."""
        canon = yaml.safe_dump(self.raw, sort_keys=True)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    # -- typed accessors -------------------------------------------------

    def geometry(self) -> SystemGeometry:
        g = self.raw["geometry"]
        return SystemGeometry(
            energy_kev=float(g["energy_kev"]),
            magnification=float(g["magnification"]),
            detector_pitch_um=float(g["detector_pitch_um"]),
            n_views=int(g["n_views"]),
            angular_step_deg=float(g["angular_step_deg"]))

    def phantom_n(self) -> int:
        return int(self.raw["phantom"]["n"])

    def pixel_size_nm(self) -> float:
        return float(self.raw["phantom"]["pixel_size_nm"])

    def delta_table(self) -> dict[Material, float]:
        table = {}
        for name, value in self.raw["phantom"]["delta_table"].items():
            try:
                mat = Material(name)
            except ValueError:
                known = ", ".join(m.value for m in Material)
                raise ConfigError(f"unknown material {name!r} (known: {known})")
            table[mat] = float(value)
        return table

    def phantom_spec(self) -> PhantomSpec:
        shapes = self.raw["phantom"]["shapes"]
        table = self.delta_table()
        if shapes == "default":
            return default_phantom_spec(delta_table=table)
        if not isinstance(shapes, list) or not shapes:
            raise ConfigError("phantom.shapes must be 'default' or a non-empty list")
        built = []
        for i, entry in enumerate(shapes):
            if not isinstance(entry, dict) or "type" not in entry:
                raise ConfigError(f"shape {i} must be a mapping with a 'type'")
            kind = entry["type"]
            if kind not in _SHAPE_FIELDS:
                raise ConfigError(
                    f"shape {i}: unknown type {kind!r} "
                    f"(known: {', '.join(sorted(_SHAPE_FIELDS))})")
            fields_allowed, cls = _SHAPE_FIELDS[kind]
            bad = set(entry) - fields_allowed
            if bad:
                raise ConfigError(f"shape {i}: unknown fields {sorted(bad)}")
            missing = fields_allowed - set(entry)
            if missing:
                raise ConfigError(f"shape {i}: missing fields {sorted(missing)}")
            kwargs = {k: v for k, v in entry.items() if k != "type"}
            try:
                kwargs["material"] = Material(kwargs["material"])
            except ValueError:
                raise ConfigError(
                    f"shape {i}: unknown material {kwargs['material']!r}")
            built.append(cls(**kwargs))
        return PhantomSpec(shapes=tuple(built), delta_table=table)

    def projection_config(self) -> ProjectionConfig:
        step = self.raw["projection"]["sampling_step_nm"]
        return ProjectionConfig(
            m=int(self.raw["geometry"]["n_detector"]),
            sampling_step_nm=None if step is None else float(step))

    def delta_s_nm(self) -> float:
        value = float(self.raw["splitting"]["delta_s_nm"])
        if value < 0:
            raise ConfigError(f"splitting.delta_s_nm must be nonnegative, got {value}")
        return value

    def gamma(self) -> float:
        value = float(self.raw["splitting"]["gamma"])
        if not (value > 0):
            raise ConfigError(f"splitting.gamma must be positive, got {value}")
        return value

    def sweep_values(self) -> list[float]:
        values = self.raw["splitting"]["sweep_nm"]
        if not isinstance(values, list) or not values:
            raise ConfigError("splitting.sweep_nm must be a non-empty list")
        return [float(v) for v in values]

    def noise_model(self) -> NoiseModel:
        n = self.raw["noise"]
        return NoiseModel(epsilon=float(n["epsilon"]),
                          photons=float(n["photons"]),
                          phase_steps=int(n["phase_steps"]))

    def seed(self) -> int:
        return int(self.raw["noise"]["seed"])

    def pwls_config(self) -> PwlsConfig:
        p = self.raw["pwls"]
        return PwlsConfig(
            alpha=float(p["alpha"]), tau=float(p["tau"]),
            tv_eps=None if p["tv_eps"] is None else float(p["tv_eps"]),
            max_iters=int(p["max_iters"]), rel_tol=float(p["rel_tol"]),
            nonneg=bool(p["nonneg"]))

    def recon_config(self) -> ReconConfig:
        r = self.raw["recon"]
        return ReconConfig(
            output_n=int(r["output_n"]),
            output_pixel_size_nm=float(r["output_pixel_size_nm"]),
            window=str(r["window"]),
            window_cutoff=float(r["window_cutoff"]))

    def rois(self) -> RoiSpec:
        r = self.raw["rois"]
        return RoiSpec(signal=tuple(r["signal"]), background=tuple(r["background"]))

    def output_dir(self) -> Path:
        return Path(self.raw["output"]["dir"])

    def save_intermediates(self) -> bool:
        return bool(self.raw["output"]["save_intermediates"])

    def image_window(self) -> tuple[float, float]:
        return _window(self.raw["output"]["image_window"], "output.image_window")

    def residual_window(self) -> tuple[float, float]:
        return _window(self.raw["output"]["residual_window"], "output.residual_window")


def _window(value, name: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{name} must be a [lo, hi] pair")
    lo, hi = float(value[0]), float(value[1])
    if not (hi > lo):
        raise ConfigError(f"{name} must satisfy hi > lo, got [{lo}, {hi}]")
    return lo, hi
