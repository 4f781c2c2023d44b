"""Discrete filtered back projection for parallel and fan beam data.

Parallel beam: convolve each sinogram column with the sampled filter
kernel, then back project the interpolated result with the factor 1/2.
Fan beam: a weighted convolution over the fan angle followed by a
distance-weighted back projection over the source positions.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .filters import FilterSpec, kernel_samples, kernel_value
from .projector import (
    FanSinogram,
    Image,
    Sinogram,
    _back_project_columns,
    _interp_sampled,
)

__all__ = [
    "interpolate",
    "convolve_rows",
    "filtered_columns",
    "fbp_parallel",
    "fbp_fan",
]

INTERP_METHODS = ("nearest", "linear")


def interpolate(values, spacing: float, t, method: str = "linear",
                first_index: int = 0):
    """Value of a uniformly sampled function at query points ``t``.

    ``values[i]`` is the sample at ``(first_index + i) * spacing``.
    ``nearest`` picks the closer sample and resolves ties towards the
    left neighbour; ``linear`` is the two-point spline.  Queries outside
    the sampled range return 0.
    """
    if method not in INTERP_METHODS:
        raise ValueError(f"unknown interpolation method {method!r}")
    return _interp_sampled(values, spacing, t, method, first_index)


def filtered_columns(sino: Sinogram, spec: FilterSpec, half_count: int) -> np.ndarray:
    """Filtered sinogram values h(t_i, theta_k) on the index set i = -half_count..half_count.

    Computes h(t_i, theta_k) = d * sum_j kernel(t_i - t_j) * Rf(t_j, theta_k).
    The index set may extend beyond the data range: the kernel tails keep
    contributing there even though the data itself is compactly supported.
    """
    g = sino.geometry
    if not math.isclose(g.d, math.pi / spec.L, rel_tol=1e-9):
        warnings.warn(
            f"sinogram spacing d={g.d:g} is not Nyquist-coupled to the filter "
            f"bandwidth (pi/L={math.pi / spec.L:g})",
            stacklevel=3,
        )
    M, h = g.M, half_count
    kern = kernel_samples(spec, h + M)
    out = np.empty((2 * h + 1, g.N))
    for k in range(g.N):
        full = np.convolve(sino.values[:, k], kern)
        out[:, k] = full[2 * M : 2 * M + 2 * h + 1]
    return g.d * out


def convolve_rows(sino: Sinogram, spec: FilterSpec) -> Sinogram:
    """Discrete convolution of every sinogram column with the filter kernel.

    Evaluates the filtered values on the data index set i = -M..M; use
    :func:`filtered_columns` for a wider evaluation range.  The sample
    spacing should match the Nyquist rate d = pi/L of the filter
    bandwidth; a mismatch triggers a warning but is carried through with
    the actual spacing as quadrature weight.
    """
    return sino.with_values(filtered_columns(sino, spec, sino.geometry.M))


def fbp_parallel(sino: Sinogram, spec: FilterSpec, shape=256,
                 extent: float | None = None, interp: str = "linear") -> Image:
    """Filtered back projection from parallel-beam data.

    f(x_m, y_n) = (1/2N) * sum_k I[h(., theta_k)](x_m cos + y_n sin)
    with h the filtered sinogram, evaluated on an index set wide enough
    to cover every offset the grid queries (up to sqrt(2) * extent).
    """
    if interp not in INTERP_METHODS:
        raise ValueError(f"unknown interpolation method {interp!r}")
    g = sino.geometry
    if extent is None:
        extent = g.r
    out = Image.zeros(shape, extent)
    half = int(math.ceil(math.sqrt(2.0) * extent / g.d)) + 1
    h = filtered_columns(sino, spec, half)
    vals = _back_project_columns(
        h, g.d, g.angles, -half, out.xs[None, :], out.ys[:, None], interp
    )
    return Image(values=0.5 * vals, extent=extent)


def fbp_fan(fan: FanSinogram, spec: FilterSpec, shape=256,
            extent: float | None = None, interp: str = "linear") -> Image:
    """Filtered back projection from fan-beam data.

    Phase 1 convolves each source view over the fan angle with the
    kernel evaluated at D*sin(alpha_i - alpha_j) and the cos(alpha_j)
    weight; phase 2 back projects with the approximate inverse-square
    distance weight D^3/(2p) * ||x - x_S||^-2, valid for support radii
    small against the source radius D.
    """
    if interp not in INTERP_METHODS:
        raise ValueError(f"unknown interpolation method {interp!r}")
    g = fan.geometry
    L, D, q, p = spec.L, g.D, g.q, g.p
    _warn_fan_sampling(g, L)

    # phase 1: weighted convolution over the fan angle, on the alpha grid
    m = np.arange(-2 * q, 2 * q + 1)
    kern = kernel_value(spec, D * np.sin(g.dalpha * m))
    i = np.arange(2 * q + 1)
    kmat = kern[i[:, None] - i[None, :] + 2 * q]
    weighted = np.cos(g.fan_angles)[:, None] * fan.values
    h = g.dalpha * (kmat @ weighted)

    if extent is None:
        extent = g.r
    out = Image.zeros(shape, extent)
    X = out.xs[None, :]
    Y = out.ys[:, None]
    exclude_radius = math.hypot(out.pixel_width, out.pixel_height)

    # phase 2: distance-weighted back projection over the source positions
    acc = np.zeros(out.values.shape)
    excluded = 0
    for k, beta in enumerate(g.source_angles):
        sx, sy = D * math.cos(beta), D * math.sin(beta)
        dist2 = (X - sx) ** 2 + (Y - sy) ** 2
        near = dist2 < exclude_radius**2
        if np.any(near):
            excluded += int(np.count_nonzero(near))
            dist2 = np.where(near, np.inf, dist2)
        arg = (D - X * math.cos(beta) - Y * math.sin(beta)) / np.sqrt(dist2)
        gamma = np.sign(X * math.sin(beta) - Y * math.cos(beta)) * np.arccos(
            np.clip(arg, -1.0, 1.0)
        )
        acc += _interp_sampled(h[:, k], g.dalpha, gamma, interp, -q) / dist2
    if excluded:
        warnings.warn(
            f"{excluded} reconstruction point evaluations coincide with a "
            "source position and were set to 0",
            stacklevel=2,
        )
    return Image(values=(D**3 / (2.0 * p)) * acc, extent=extent)


def _warn_fan_sampling(g, L: float) -> None:
    """Warn when the fan sampling falls short of the resolution conditions."""
    tol = 1.0 + 1e-9
    if g.q * tol < g.phi / (2.0 * math.pi) * g.D * L:
        warnings.warn(
            f"fan ray count q={g.q} below the sampling condition "
            f"q >= phi/(2 pi) * D * L = {g.phi / (2 * math.pi) * g.D * L:g}",
            stacklevel=3,
        )
    if g.p * tol < 2.0 * g.D / (g.D + g.r) * g.r * L:
        warnings.warn(
            f"source count p={g.p} below the sampling condition "
            f"p >= 2D/(D+r) * r * L = {2 * g.D / (g.D + g.r) * g.r * L:g}",
            stacklevel=3,
        )
    if g.D * tol < 3.0 * g.r:
        warnings.warn(
            f"source radius D={g.D:g} below 3r = {3 * g.r:g}; the fan "
            "back projection weight assumes r << D",
            stacklevel=3,
        )
