"""Discrete projection over the pixel basis.

The forward projector computes exact intersection lengths between rays
and the square pixels of an image grid (a sparse row of the Radon
matrix); the back projector spreads sinogram values over the grid by
averaging interpolated column values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import FanGeometry, LineParam, ParallelGeometry

__all__ = [
    "Image",
    "Sinogram",
    "FanSinogram",
    "ray_pixel_intersections",
    "forward_project",
    "back_project",
    "back_project_at",
]

# |direction component| below which a ray counts as axis-parallel
_PARALLEL_EPS = 1e-12


@dataclass(frozen=True)
class Image:
    """Pixel image on the square [-r, r]^2; row 0 holds the largest y."""

    values: np.ndarray
    extent: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.size == 0:
            raise ValueError(f"image values must be a non-empty 2D array, got shape {v.shape}")
        if self.extent <= 0:
            raise ValueError(f"image extent must be > 0, got {self.extent}")
        object.__setattr__(self, "values", v)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @property
    def pixel_width(self) -> float:
        return 2.0 * self.extent / self.n_cols

    @property
    def pixel_height(self) -> float:
        return 2.0 * self.extent / self.n_rows

    @property
    def xs(self) -> np.ndarray:
        """Pixel-center x coordinates, left to right."""
        w = self.pixel_width
        return -self.extent + w * (np.arange(self.n_cols) + 0.5)

    @property
    def ys(self) -> np.ndarray:
        """Pixel-center y coordinates, top to bottom (descending)."""
        h = self.pixel_height
        return self.extent - h * (np.arange(self.n_rows) + 0.5)

    @classmethod
    def zeros(cls, shape, extent: float) -> "Image":
        if isinstance(shape, int):
            shape = (shape, shape)
        return cls(values=np.zeros(shape), extent=extent)


@dataclass(frozen=True)
class Sinogram:
    """Parallel-beam Radon samples, shape (2M+1, N), indexed [j+M, k]."""

    geometry: ParallelGeometry
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.geometry.shape:
            raise ValueError(
                f"sinogram shape {v.shape} does not match geometry {self.geometry.shape}"
            )
        object.__setattr__(self, "values", v)

    def with_values(self, values: np.ndarray) -> "Sinogram":
        return replace(self, values=values)


@dataclass(frozen=True)
class FanSinogram:
    """Fan-beam samples, shape (2q+1, p), indexed [j+q, k]."""

    geometry: FanGeometry
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.geometry.shape:
            raise ValueError(
                f"fan sinogram shape {v.shape} does not match geometry {self.geometry.shape}"
            )
        object.__setattr__(self, "values", v)

    def with_values(self, values: np.ndarray) -> "FanSinogram":
        return replace(self, values=values)


def ray_pixel_intersections(
    line: LineParam, n: int, extent: float
) -> tuple[np.ndarray, np.ndarray]:
    """Intersection lengths of a line with the pixels of an n x n grid.

    Returns (pixel_indices, lengths) with column-wise pixel labeling:
    index = column * n + row, columns left to right, rows top to bottom.
    Only pixels with positive intersection length appear; indices are
    strictly increasing.  A ray running exactly along a pixel edge is
    attributed to the pixel on the side of increasing coordinate.
    """
    if n < 1:
        raise ValueError(f"grid size must be >= 1, got {n}")
    r = float(extent)
    w = 2.0 * r / n
    ct, st = math.cos(line.theta), math.sin(line.theta)
    p0 = np.array([line.t * ct, line.t * st])
    dvec = np.array([-st, ct])

    # clip the line against the square [-r, r]^2 (slab method)
    s_lo, s_hi = -np.inf, np.inf
    for axis in range(2):
        d_a, p_a = dvec[axis], p0[axis]
        if abs(d_a) < _PARALLEL_EPS:
            if abs(p_a) > r:
                return np.empty(0, dtype=np.int64), np.empty(0)
        else:
            sa = (-r - p_a) / d_a
            sb = (r - p_a) / d_a
            s_lo = max(s_lo, min(sa, sb))
            s_hi = min(s_hi, max(sa, sb))
    if not s_hi - s_lo > 2e-14 * r:
        return np.empty(0, dtype=np.int64), np.empty(0)

    # parameter values where the line crosses pixel boundaries
    bounds = -r + w * np.arange(n + 1)
    crossings = [np.array([s_lo, s_hi])]
    for axis in range(2):
        d_a, p_a = dvec[axis], p0[axis]
        if abs(d_a) >= _PARALLEL_EPS:
            s = (bounds - p_a) / d_a
            crossings.append(s[(s > s_lo) & (s < s_hi)])
    s_all = np.sort(np.concatenate(crossings))

    lengths = np.diff(s_all)
    keep = lengths > 2e-14 * r
    if not np.any(keep):
        return np.empty(0, dtype=np.int64), np.empty(0)
    lengths = lengths[keep]
    s_mid = 0.5 * (s_all[:-1] + s_all[1:])[keep]

    x = p0[0] + s_mid * dvec[0]
    y = p0[1] + s_mid * dvec[1]
    col = np.floor((x + r) / w).astype(np.int64)
    iy = np.floor((y + r) / w).astype(np.int64)  # counted from the bottom
    inside = (col >= 0) & (col < n) & (iy >= 0) & (iy < n)
    col, iy, lengths = col[inside], iy[inside], lengths[inside]
    row = n - 1 - iy
    idx = col * n + row

    order = np.argsort(idx, kind="stable")
    return idx[order], lengths[order]


def forward_project(img: Image, g: ParallelGeometry) -> Sinogram:
    """Sinogram of a pixel image: exact ray sums value * intersection length."""
    if img.n_rows != img.n_cols:
        raise ValueError(
            f"forward projection needs a square grid, got {img.n_rows}x{img.n_cols}"
        )
    if img.extent > g.M * g.d * (1.0 + 1e-12):
        raise ValueError(
            f"image extent {img.extent:g} exceeds sampled range M*d = {g.M * g.d:g}"
        )
    n = img.n_rows
    flat = img.values.T.ravel()  # column-wise pixel order
    out = np.zeros(g.shape)
    for k, theta in enumerate(g.angles):
        for j, t in enumerate(g.offsets):
            idx, lengths = ray_pixel_intersections(
                LineParam(t=float(t), theta=float(theta)), n, img.extent
            )
            if idx.size:
                out[j, k] = flat[idx] @ lengths
    return Sinogram(geometry=g, values=out)


def _interp_sampled(values, spacing, queries, method, first_index):
    """Interpolate uniformly sampled values at arbitrary query points.

    ``values[i]`` sits at ``(first_index + i) * spacing``.  Nearest
    neighbour resolves ties towards the left sample; queries outside the
    sampled range yield 0.
    """
    values = np.asarray(values, dtype=float)
    q = np.asarray(queries, dtype=float)
    if method == "linear":
        xp = (first_index + np.arange(values.size)) * spacing
        return np.interp(q, xp, values, left=0.0, right=0.0)
    if method == "nearest":
        u = q / spacing - first_index
        last = values.size - 1
        inside = (u >= -1e-9) & (u <= last + 1e-9)
        idx = np.clip(np.ceil(u - 0.5).astype(np.int64), 0, last)
        return np.where(inside, values[idx], 0.0)
    raise ValueError(f"unknown interpolation method {method!r}")


def _back_project_columns(columns, spacing, angles, first_index, x, y, interp):
    """Angle average of interpolated columns at points (x, y): the core sum."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    acc = np.zeros(np.broadcast(x, y).shape)
    for k, theta in enumerate(angles):
        t = x * math.cos(theta) + y * math.sin(theta)
        acc += _interp_sampled(columns[:, k], spacing, t, interp, first_index)
    return acc / len(angles)


def back_project_at(sino: Sinogram, x, y, interp: str = "linear") -> np.ndarray:
    """Discrete back projection evaluated at arbitrary points (x, y).

    Averages the interpolated sinogram columns over all angles:
    (1/N) * sum_k I[col_k](x cos(theta_k) + y sin(theta_k)).  Offsets
    outside the sampled range contribute 0.
    """
    g = sino.geometry
    return _back_project_columns(sino.values, g.d, g.angles, -g.M, x, y, interp)


def back_project(sino: Sinogram, shape, extent: float | None = None,
                 interp: str = "linear") -> Image:
    """Discrete back projection onto a pixel grid."""
    if extent is None:
        extent = sino.geometry.r
    out = Image.zeros(shape, extent)
    vals = back_project_at(sino, out.xs[None, :], out.ys[:, None], interp)
    return Image(values=vals, extent=extent)
