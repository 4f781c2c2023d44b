"""File formats: binary sinograms, CSV export, PGM and raw float images.

The binary forms (``.sino`` and ``.img``) round-trip losslessly; PGM is
a quantized export for viewing.  All multi-byte fields are little
endian.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .geometry import FanGeometry, ParallelGeometry
from .projector import FanSinogram, Image, Sinogram

__all__ = [
    "write_sinogram",
    "read_sinogram",
    "write_sinogram_csv",
    "write_image_raw",
    "read_image_raw",
    "write_pgm",
]

MAGIC = b"TOMO1"
TAG_PARALLEL = 0
TAG_FAN = 1


def write_sinogram(sino, path: str | Path) -> None:
    """Binary sinogram: magic ``TOMO1``, u32 geometry tag and counts,
    f64 geometry parameters, then the row-major f64 payload."""
    with open(path, "wb") as f:
        f.write(MAGIC)
        if isinstance(sino, Sinogram):
            g = sino.geometry
            f.write(struct.pack("<III", TAG_PARALLEL, g.M, g.N))
            f.write(struct.pack("<dd", g.d, g.r))
        elif isinstance(sino, FanSinogram):
            g = sino.geometry
            f.write(struct.pack("<III", TAG_FAN, g.q, g.p))
            f.write(struct.pack("<ddd", g.D, g.phi, g.r))
        else:
            raise TypeError(f"expected Sinogram or FanSinogram, got {type(sino).__name__}")
        f.write(np.ascontiguousarray(sino.values, dtype="<f8").tobytes())


def read_sinogram(path: str | Path):
    """Read a binary sinogram; returns a Sinogram or FanSinogram."""
    data = Path(path).read_bytes()
    if data[:5] != MAGIC:
        raise ValueError(f"{path}: not a TOMO1 sinogram file")
    (tag, c1, c2) = struct.unpack_from("<III", data, 5)
    off = 5 + 12
    if tag == TAG_PARALLEL:
        d, r = struct.unpack_from("<dd", data, off)
        off += 16
        geom = ParallelGeometry(d=d, M=c1, N=c2, r=r)
        shape = (2 * c1 + 1, c2)
        cls = Sinogram
    elif tag == TAG_FAN:
        D, phi, r = struct.unpack_from("<ddd", data, off)
        off += 24
        geom = FanGeometry(D=D, phi=phi, p=c2, q=c1, r=r)
        shape = (2 * c1 + 1, c2)
        cls = FanSinogram
    else:
        raise ValueError(f"{path}: unknown geometry tag {tag}")
    count = shape[0] * shape[1]
    if len(data) - off < 8 * count:
        raise ValueError(f"{path}: truncated payload")
    payload = np.frombuffer(data, dtype="<f8", count=count, offset=off)
    return cls(geometry=geom, values=payload.reshape(shape).copy())


def write_sinogram_csv(sino, path: str | Path) -> None:
    """CSV export: one row per radial index, one column per angle index."""
    values = np.asarray(sino.values if hasattr(sino, "values") else sino, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("# t-index, angle-index, value\n")
        for row in values:
            f.write(",".join(repr(float(v)) for v in row) + "\n")


def write_image_raw(img: Image, path: str | Path) -> None:
    """Raw f64 image: 16-byte header (rows, cols as u64) + row-major payload."""
    with open(path, "wb") as f:
        f.write(struct.pack("<QQ", img.n_rows, img.n_cols))
        f.write(np.ascontiguousarray(img.values, dtype="<f8").tobytes())


def read_image_raw(path: str | Path, extent: float = 1.0) -> Image:
    """Read a raw f64 image; the extent is not stored and must be supplied."""
    data = Path(path).read_bytes()
    if len(data) < 16:
        raise ValueError(f"{path}: truncated header")
    rows, cols = struct.unpack_from("<QQ", data, 0)
    count = rows * cols
    if len(data) - 16 < 8 * count:
        raise ValueError(f"{path}: truncated payload")
    payload = np.frombuffer(data, dtype="<f8", count=count, offset=16)
    return Image(values=payload.reshape(rows, cols).copy(), extent=extent)


def write_pgm(img: Image, path: str | Path, binary: bool = True,
              window: tuple[float, float] | None = None) -> None:
    """8-bit PGM export (P5 binary or P2 ascii).

    The default window maps [min, max] linearly to 0..255; pass a fixed
    ``window`` for cross-run comparability.
    """
    vals = img.values
    if window is None:
        lo, hi = float(vals.min()), float(vals.max())
    else:
        lo, hi = map(float, window)
    if hi <= lo:
        gray = np.zeros(vals.shape, dtype=np.uint8)
    else:
        gray = np.clip(np.rint((vals - lo) / (hi - lo) * 255.0), 0, 255).astype(np.uint8)
    header = f"{'P5' if binary else 'P2'}\n{img.n_cols} {img.n_rows}\n255\n"
    with open(path, "wb") as f:
        f.write(header.encode("ascii"))
        if binary:
            f.write(gray.tobytes())
        else:
            body = "\n".join(" ".join(str(v) for v in row) for row in gray)
            f.write((body + "\n").encode("ascii"))
