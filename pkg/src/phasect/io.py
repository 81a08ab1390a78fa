"""Deterministic file output: viewable images, lossless dumps, CSV tables,
and sinogram archives.

``write_image`` produces three files per image:

* ``<base>.pgm``  - 16-bit binary PGM (big-endian, maxval 65535), values
  windowed to ``[lo, hi]`` and clamped, for direct viewing;
* ``<base>.f64``  - the raw float64 pixels, little-endian, C order,
  bit-exact for archival and comparison;
* ``<base>.hdr``  - a small text sidecar describing both.

All writers are byte-deterministic for identical inputs.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import GridError
from .grid import ImageGrid2D, Sinogram, SinogramKind


def write_image(image: ImageGrid2D, path: str | Path,
                window: tuple[float, float]) -> dict[str, Path]:
    """Write the viewable + lossless image pair; returns the paths used."""
    lo, hi = float(window[0]), float(window[1])
    if not (hi > lo):
        raise GridError(f"display window must satisfy hi > lo, got [{lo}, {hi}]")
    base = Path(path)
    if base.suffix == ".pgm":
        base = base.with_suffix("")
    pgm_path = base.with_suffix(".pgm")
    dump_path = base.with_suffix(".f64")
    hdr_path = base.with_suffix(".hdr")

    n = image.n
    scaled = (image.data - lo) / (hi - lo)
    levels = np.clip(np.rint(scaled * 65535.0), 0.0, 65535.0).astype(">u2")
    with open(pgm_path, "wb") as fh:
        fh.write(f"P5\n{n} {n}\n65535\n".encode("ascii"))
        fh.write(levels.tobytes(order="C"))

    image.data.astype("<f8").tofile(dump_path)

    hdr_path.write_text(
        "format phasect-image-v1\n"
        f"n {n}\n"
        f"pixel_size_nm {image.pixel_size_nm!r}\n"
        "dump_dtype <f8\n"
        "dump_order C\n"
        f"window_lo {lo!r}\n"
        f"window_hi {hi!r}\n",
        encoding="ascii")
    return {"pgm": pgm_path, "dump": dump_path, "header": hdr_path}


def read_image_dump(path: str | Path) -> ImageGrid2D:
    """Rehydrate an image from its ``.f64`` dump + ``.hdr`` sidecar."""
    base = Path(path)
    if base.suffix in (".f64", ".pgm", ".hdr"):
        base = base.with_suffix("")
    fields: dict[str, str] = {}
    for line in base.with_suffix(".hdr").read_text(encoding="ascii").splitlines():
        key, _, value = line.partition(" ")
        fields[key] = value
    n = int(fields["n"])
    data = np.fromfile(base.with_suffix(".f64"), dtype="<f8").reshape(n, n)
    return ImageGrid2D(data=data, pixel_size_nm=float(fields["pixel_size_nm"]))


def format_float(value: float) -> str:
    """17-significant-digit decimal form used in CSV output; reloads to the
    identical float."""
    return f"{float(value):.17g}"


def write_csv(path: str | Path, header: list[str], rows) -> Path:
    """RFC-4180-style CSV with LF line endings; floats are written in
    round-trippable form so identical inputs give identical bytes."""
    path = Path(path)
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([
                format_float(v) if isinstance(v, float) else v for v in row])
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    """Header + string rows of a CSV written by ``write_csv``."""
    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise GridError(f"{path} is empty")
    return rows[0], rows[1:]


def save_sinogram(sino: Sinogram, path: str | Path) -> Path:
    """Archive a sinogram (data + metadata) as .npz."""
    path = Path(path)
    np.savez(path, data=sino.data, angles_deg=sino.angles_deg,
             element_pitch_nm=np.float64(sino.element_pitch_nm),
             kind=np.str_(sino.kind.value))
    return path if path.suffix == ".npz" else path.with_suffix(path.suffix + ".npz")


def load_sinogram(path: str | Path) -> Sinogram:
    with np.load(path) as archive:
        return Sinogram(data=archive["data"],
                        angles_deg=archive["angles_deg"],
                        element_pitch_nm=float(archive["element_pitch_nm"]),
                        kind=SinogramKind(str(archive["kind"])))
