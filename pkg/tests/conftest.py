import math

import numpy as np
import pytest

from tomokit import (
    FilterSpec,
    Image,
    Sinogram,
    analytic_sinogram,
    builtin_phantom,
    make_parallel_geometry,
    rasterize,
)


@pytest.fixture(scope="session")
def ball_phantom():
    return builtin_phantom("unit-ball")


@pytest.fixture(scope="session")
def geometry_50pi():
    return make_parallel_geometry(50 * math.pi, 1)


@pytest.fixture(scope="session")
def ball_sinogram(ball_phantom, geometry_50pi):
    return analytic_sinogram(ball_phantom, geometry_50pi)


@pytest.fixture(scope="session")
def ball_image_256(ball_phantom):
    return rasterize(ball_phantom, 256)


@pytest.fixture(scope="session")
def ramlak_50pi():
    return FilterSpec("ram-lak", 50 * math.pi)


def gaussian_blob_image(n: int, extent: float = 1.0, s: float = 0.1) -> Image:
    """Smooth test field exp(-||x||^2 / s) sampled at pixel centers."""
    w = 2.0 * extent / n
    xs = -extent + w * (np.arange(n) + 0.5)
    ys = extent - w * (np.arange(n) + 0.5)
    vals = np.exp(-(xs[None, :] ** 2 + ys[:, None] ** 2) / s)
    return Image(values=vals, extent=extent)


def gaussian_blob_sinogram(g, s: float = 0.1) -> Sinogram:
    """Exact line integrals of the blob: sqrt(pi*s) * exp(-t^2 / s)."""
    T = g.offsets[:, None] + 0.0 * g.angles[None, :]
    return Sinogram(geometry=g, values=math.sqrt(math.pi * s) * np.exp(-(T**2) / s))


def rel_l2(a, b) -> float:
    av = np.asarray(a.values if hasattr(a, "values") else a, dtype=float)
    bv = np.asarray(b.values if hasattr(b, "values") else b, dtype=float)
    return float(np.linalg.norm(av - bv) / np.linalg.norm(bv))
