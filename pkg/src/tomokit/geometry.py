"""Line parametrization and sampling geometries for 2D tomography.

A line is described by its signed distance ``t`` from the origin and the
angle ``theta`` of its unit normal.  Parallel-beam and fan-beam sampling
schemes discretize the ``(t, theta)`` plane; the conversions between the
two live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LineParam",
    "ParallelGeometry",
    "FanGeometry",
    "canonicalize",
    "line_point",
    "project_point",
    "fan_to_parallel",
    "make_parallel_geometry",
]


@dataclass(frozen=True)
class LineParam:
    """A straight line: signed radial offset ``t`` and normal angle ``theta``.

    The canonical representative has ``theta`` in ``[0, pi)``; the pairs
    ``(t, theta + pi)`` and ``(-t, theta)`` describe the same line.
    """

    t: float
    theta: float


def canonicalize(line: LineParam) -> LineParam:
    """Map a line to its canonical representative with theta in [0, pi).

    Reduces theta modulo 2*pi first, then folds [pi, 2*pi) down by the
    identity (t, theta + pi) = (-t, theta).  Idempotent.
    """
    t, theta = line.t, line.theta
    theta = theta % (2.0 * math.pi)
    # the modulo may round up to exactly 2*pi for tiny negative inputs,
    # so the fold can need a second application
    for _ in range(2):
        if theta >= math.pi:
            theta -= math.pi
            t = -t
    return LineParam(t=t, theta=theta)


def line_point(line: LineParam, s: float) -> tuple[float, float]:
    """Point on the line at arc-length parameter ``s``.

    Returns ``t*n + s*n_perp`` with ``n = (cos theta, sin theta)`` and
    ``n_perp = (-sin theta, cos theta)``.
    """
    ct, st = math.cos(line.theta), math.sin(line.theta)
    return (line.t * ct - s * st, line.t * st + s * ct)


def project_point(x: float, y: float, theta: float) -> tuple[float, float]:
    """Coordinates (t, s) of the point (x, y) in the frame of angle theta.

    ``t`` is the offset of the unique line with normal angle ``theta``
    through the point; ``s`` is the position along that line.  Satisfies
    ``x**2 + y**2 == t**2 + s**2`` up to rounding.
    """
    ct, st = math.cos(theta), math.sin(theta)
    return (x * ct + y * st, -x * st + y * ct)


def fan_to_parallel(alpha: float, beta: float, D: float) -> LineParam:
    """Convert a fan ray (alpha, beta) on a source circle of radius D.

    The ray through the source at angle ``beta``, deflected by ``alpha``
    from the central ray, coincides with the line ``t = D*sin(alpha)``,
    ``theta = alpha + beta - pi/2``.  The result is canonicalized.

    Raises ValueError for ``|alpha| >= pi/2`` (the ray would not point
    towards the scanned region).
    """
    if abs(alpha) >= math.pi / 2.0:
        raise ValueError(f"fan angle alpha must be in (-pi/2, pi/2), got {alpha}")
    t = D * math.sin(alpha)
    theta = alpha + beta - math.pi / 2.0
    return canonicalize(LineParam(t=t, theta=theta))


@dataclass(frozen=True)
class ParallelGeometry:
    """Equispaced parallel-beam sampling of the (t, theta) plane.

    Samples sit at ``t_j = j*d`` for ``j = -M..M`` and
    ``theta_k = k*pi/N`` for ``k = 0..N-1``.  The scanned object must fit
    in the disk of radius ``r``, which requires ``M*d >= r``.
    """

    d: float
    M: int
    N: int
    r: float

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError(f"radial spacing d must be > 0, got {self.d}")
        if self.M < 1 or self.N < 1:
            raise ValueError(f"M and N must be >= 1, got M={self.M}, N={self.N}")
        if self.r <= 0:
            raise ValueError(f"support radius r must be > 0, got {self.r}")
        if self.M * self.d < self.r * (1.0 - 1e-12):
            raise ValueError(
                f"support not covered: M*d = {self.M * self.d:g} < r = {self.r:g}"
            )

    @property
    def offsets(self) -> np.ndarray:
        """Radial sample positions t_j = j*d, j = -M..M."""
        return self.d * np.arange(-self.M, self.M + 1, dtype=float)

    @property
    def angles(self) -> np.ndarray:
        """Projection angles theta_k = k*pi/N, k = 0..N-1."""
        return (math.pi / self.N) * np.arange(self.N, dtype=float)

    @property
    def shape(self) -> tuple[int, int]:
        return (2 * self.M + 1, self.N)

    def lines(self) -> list[LineParam]:
        """All sampled lines, angle-major: (t_-M..t_M) for theta_0, then theta_1, ..."""
        return [
            LineParam(t=float(t), theta=float(th))
            for th in self.angles
            for t in self.offsets
        ]


@dataclass(frozen=True)
class FanGeometry:
    """Equiangular fan-beam sampling.

    The source moves on a circle of radius ``D`` through ``p`` positions
    ``beta_k = k*2*pi/p``; each fan consists of ``2q+1`` rays at angles
    ``alpha_j = j*dalpha`` with ``dalpha = phi/(2q)`` for opening angle
    ``phi``.  The support disk of radius ``r`` must satisfy
    ``r <= D*sin(phi/2)``.
    """

    D: float
    phi: float
    p: int
    q: int
    r: float

    def __post_init__(self):
        if self.D <= 0:
            raise ValueError(f"source radius D must be > 0, got {self.D}")
        if not 0.0 < self.phi < math.pi:
            raise ValueError(f"opening angle phi must be in (0, pi), got {self.phi}")
        if self.p < 1 or self.q < 1:
            raise ValueError(f"p and q must be >= 1, got p={self.p}, q={self.q}")
        if self.r <= 0:
            raise ValueError(f"support radius r must be > 0, got {self.r}")
        if self.r > self.D * math.sin(self.phi / 2.0) * (1.0 + 1e-12):
            raise ValueError(
                f"support not covered: r = {self.r:g} > D*sin(phi/2) = "
                f"{self.D * math.sin(self.phi / 2.0):g}"
            )

    @property
    def dalpha(self) -> float:
        return self.phi / (2 * self.q)

    @property
    def dbeta(self) -> float:
        return 2.0 * math.pi / self.p

    @property
    def fan_angles(self) -> np.ndarray:
        """Ray angles alpha_j = j*dalpha, j = -q..q."""
        return self.dalpha * np.arange(-self.q, self.q + 1, dtype=float)

    @property
    def source_angles(self) -> np.ndarray:
        """Source positions beta_k = k*dbeta, k = 0..p-1."""
        return self.dbeta * np.arange(self.p, dtype=float)

    @property
    def shape(self) -> tuple[int, int]:
        return (2 * self.q + 1, self.p)


def make_parallel_geometry(L: float, r: int) -> ParallelGeometry:
    """Bandwidth-coupled parallel geometry: d = pi/L, M = r*L/pi, N = 3*M.

    ``L`` must be a positive integer multiple of pi so that M is an
    integer; ``N = 3*M`` is the integer-friendly substitute for the ideal
    coupling N = pi*M.
    """
    J = L / math.pi
    J_int = round(J)
    if J_int < 1 or abs(J - J_int) > 1e-9 * max(1.0, abs(J)):
        raise ValueError(f"bandwidth L must be a positive multiple of pi, got {L}")
    if r < 1 or r != int(r):
        raise ValueError(f"support radius r must be a positive integer, got {r}")
    M = int(r) * J_int
    return ParallelGeometry(d=math.pi / L, M=M, N=3 * M, r=float(r))
