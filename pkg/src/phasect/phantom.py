"""Piecewise-constant 2D phantoms built from primitive shapes.

A phantom is an ordered list of shapes, each tagged with a material whose
refractive-index decrement (delta) comes from a per-energy lookup table.
Later shapes overwrite earlier ones where they overlap, so nested
structures (e.g. a disk inside an annulus) are expressed by listing the
outer shape first.

Coordinates: shape centers are given as ``(cx, cy)`` in pixel units, where
``cx`` indexes columns and ``cy`` indexes rows; the grid center is at
``((n - 1) / 2, (n - 1) / 2)``.  A pixel belongs to a shape when its
center lies inside the shape boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import PhantomError
from .grid import ImageGrid2D


class Material(Enum):
    LUNG_TISSUE = "lung_tissue"
    PROTEIN = "protein"
    POLYSTYRENE = "polystyrene"


#: Refractive-index decrements at 8.0 keV.  Externally sourced constants
#: (tabulated optical data for ICRU-44 inflated lung tissue, generic
#: protein, and polystyrene); see the packaged default config for the
#: underlying densities and compositions.
_DELTA_8KEV = {
    Material.LUNG_TISSUE: 9.3e-7,
    Material.PROTEIN: 4.7e-6,
    Material.POLYSTYRENE: 3.7e-6,
}

#: Energies [keV] the built-in table covers.
_TABULATED_ENERGIES = (8.0,)

#: Energy range [keV] the system model is meant for.
ENERGY_RANGE_KEV = (5.0, 30.0)


@dataclass(frozen=True)
class Circle:
    """Filled disk."""
    cx: float
    cy: float
    radius: float
    material: Material

    def __post_init__(self):
        if not (self.radius > 0):
            raise PhantomError(f"circle radius must be positive, got {self.radius}")

    def bounds(self) -> tuple[float, float, float, float]:
        return (self.cx - self.radius, self.cx + self.radius,
                self.cy - self.radius, self.cy + self.radius)

    def mask(self, xx: np.ndarray, yy: np.ndarray) -> np.ndarray:
        return (xx - self.cx) ** 2 + (yy - self.cy) ** 2 <= self.radius ** 2


@dataclass(frozen=True)
class Ring:
    """Annulus between two radii."""
    cx: float
    cy: float
    r_inner: float
    r_outer: float
    material: Material

    def __post_init__(self):
        if not (0 < self.r_inner < self.r_outer):
            raise PhantomError(
                f"ring needs 0 < r_inner < r_outer, got {self.r_inner}, {self.r_outer}")

    def bounds(self) -> tuple[float, float, float, float]:
        return (self.cx - self.r_outer, self.cx + self.r_outer,
                self.cy - self.r_outer, self.cy + self.r_outer)

    def mask(self, xx: np.ndarray, yy: np.ndarray) -> np.ndarray:
        r2 = (xx - self.cx) ** 2 + (yy - self.cy) ** 2
        return (r2 >= self.r_inner ** 2) & (r2 <= self.r_outer ** 2)


@dataclass(frozen=True)
class Bar:
    """Axis-aligned filled rectangle."""
    cx: float
    cy: float
    width: float
    height: float
    material: Material

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise PhantomError(
                f"bar needs positive width and height, got {self.width} x {self.height}")

    def bounds(self) -> tuple[float, float, float, float]:
        return (self.cx - self.width / 2, self.cx + self.width / 2,
                self.cy - self.height / 2, self.cy + self.height / 2)

    def mask(self, xx: np.ndarray, yy: np.ndarray) -> np.ndarray:
        return ((np.abs(xx - self.cx) <= self.width / 2)
                & (np.abs(yy - self.cy) <= self.height / 2))


Shape = Circle | Ring | Bar


@dataclass(frozen=True)
class PhantomSpec:
    """An ordered collection of shapes plus the material lookup table."""

    shapes: tuple[Shape, ...]
    delta_table: dict[Material, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "shapes", tuple(self.shapes))
        table = dict(self.delta_table) if self.delta_table else dict(_DELTA_8KEV)
        for mat, delta in table.items():
            if not isinstance(mat, Material):
                raise PhantomError(f"unknown material {mat!r}")
            if not (0 < delta < 1e-4):
                raise PhantomError(
                    f"delta for {mat.value} must lie in (0, 1e-4), got {delta}")
        object.__setattr__(self, "delta_table", table)
        for shape in self.shapes:
            if not isinstance(shape, (Circle, Ring, Bar)):
                raise PhantomError(f"unsupported shape {shape!r}")
            if shape.material not in self.delta_table:
                raise PhantomError(
                    f"material {shape.material.value} missing from delta table")


def default_delta_table(energy_kev: float = 8.0) -> dict[Material, float]:
    """Built-in delta lookup.  Only tabulated energies are served; anything
    else inside the supported range needs a user-supplied table."""
    lo, hi = ENERGY_RANGE_KEV
    if not (lo <= energy_kev <= hi):
        raise PhantomError(
            f"photon energy {energy_kev} keV outside supported range [{lo}, {hi}] keV")
    for tab in _TABULATED_ENERGIES:
        if abs(energy_kev - tab) < 1e-9:
            return dict(_DELTA_8KEV)
    raise PhantomError(
        f"no built-in delta table at {energy_kev} keV (tabulated: "
        f"{', '.join(str(e) for e in _TABULATED_ENERGIES)}); supply a custom "
        "delta_table with externally sourced values")


def default_phantom_spec(delta_table: dict[Material, float] | None = None) -> PhantomSpec:
    """Resolution-style phantom for a 512 x 512 grid: a two-material
    annulus/core target, a disk pair, and bar groups of decreasing pitch.

    All shapes stay well inside a centered circle of radius ~170 px so the
    whole object is covered by every view of a 600-element detector at
    matched pitch.
    """
    table = dict(delta_table) if delta_table is not None else dict(_DELTA_8KEV)
    c = 255.5
    shapes = (
        # annulus with a softer core, upper-left
        Ring(cx=c - 80, cy=c - 75, r_inner=28, r_outer=52, material=Material.PROTEIN),
        Circle(cx=c - 80, cy=c - 75, radius=28, material=Material.LUNG_TISSUE),
        # solid disks, upper-right
        Circle(cx=c + 88, cy=c - 80, radius=36, material=Material.POLYSTYRENE),
        Circle(cx=c + 88, cy=c - 80, radius=14, material=Material.PROTEIN),
        # small isolated disk near the middle
        Circle(cx=c + 10, cy=c + 6, radius=11, material=Material.PROTEIN),
        # resolution bar groups, lower half: 12, 8, 5, 3 px half-pitch
        Bar(cx=c - 120, cy=c + 95, width=12, height=88, material=Material.POLYSTYRENE),
        Bar(cx=c - 96, cy=c + 95, width=12, height=88, material=Material.POLYSTYRENE),
        Bar(cx=c - 72, cy=c + 95, width=12, height=88, material=Material.POLYSTYRENE),
        Bar(cx=c - 28, cy=c + 95, width=8, height=88, material=Material.PROTEIN),
        Bar(cx=c - 12, cy=c + 95, width=8, height=88, material=Material.PROTEIN),
        Bar(cx=c + 4, cy=c + 95, width=8, height=88, material=Material.PROTEIN),
        Bar(cx=c + 40, cy=c + 95, width=5, height=88, material=Material.POLYSTYRENE),
        Bar(cx=c + 50, cy=c + 95, width=5, height=88, material=Material.POLYSTYRENE),
        Bar(cx=c + 60, cy=c + 95, width=5, height=88, material=Material.POLYSTYRENE),
        Bar(cx=c + 84, cy=c + 95, width=3, height=88, material=Material.PROTEIN),
        Bar(cx=c + 90, cy=c + 95, width=3, height=88, material=Material.PROTEIN),
        Bar(cx=c + 96, cy=c + 95, width=3, height=88, material=Material.PROTEIN),
    )
    return PhantomSpec(shapes=shapes, delta_table=table)


def render_phantom(spec: PhantomSpec, n: int = 512,
                   pixel_size_nm: float = 10.0) -> ImageGrid2D:
    """Rasterize a phantom spec onto an ``n x n`` grid.

    Rendering is deterministic: pixel-center membership tests, shapes
    painted in listed order.
    """
    if n < 2:
        raise PhantomError(f"grid side must be at least 2, got {n}")
    if not (pixel_size_nm > 0):
        raise PhantomError(f"pixel size must be positive, got {pixel_size_nm}")
    for i, shape in enumerate(spec.shapes):
        x_lo, x_hi, y_lo, y_hi = shape.bounds()
        if x_lo < 0 or y_lo < 0 or x_hi > n - 1 or y_hi > n - 1:
            raise PhantomError(
                f"shape {i} ({type(shape).__name__}) extends outside the "
                f"{n} x {n} grid: bounds x [{x_lo}, {x_hi}], y [{y_lo}, {y_hi}]")
    yy, xx = np.mgrid[0:n, 0:n].astype(np.float64)
    data = np.zeros((n, n), dtype=np.float64)
    for shape in spec.shapes:
        data[shape.mask(xx, yy)] = spec.delta_table[shape.material]
    return ImageGrid2D(data=data, pixel_size_nm=pixel_size_nm)
