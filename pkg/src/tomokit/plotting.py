"""Matplotlib figure rendering for the CLI report path.

Figures are written with fixed metadata so that identical runs produce
byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .projector import FanSinogram, Image, Sinogram  # noqa: E402

__all__ = ["save_image_figure", "save_sinogram_figure"]

_SAVE_OPTS = dict(dpi=150, metadata={"Software": None}, bbox_inches="tight")


def save_image_figure(img: Image, path: str | Path, title: str | None = None,
                      window: tuple[float, float] | None = None) -> None:
    """Render a reconstruction or phantom image to an image file."""
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    vmin, vmax = (None, None) if window is None else window
    e = img.extent
    im = ax.imshow(img.values, cmap="gray", extent=(-e, e, -e, e),
                   vmin=vmin, vmax=vmax, origin="upper")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def save_sinogram_figure(sino, path: str | Path, title: str | None = None) -> None:
    """Render parallel or fan-beam data with labeled sample axes."""
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    if isinstance(sino, Sinogram):
        g = sino.geometry
        extent = (0.0, math.pi * (g.N - 1) / g.N, -g.M * g.d, g.M * g.d)
        xlabel, ylabel = "angle", "offset t"
    elif isinstance(sino, FanSinogram):
        g = sino.geometry
        extent = (0.0, g.dbeta * (g.p - 1), -g.q * g.dalpha, g.q * g.dalpha)
        xlabel, ylabel = "source angle", "fan angle"
    else:
        raise TypeError(f"expected Sinogram or FanSinogram, got {type(sino).__name__}")
    im = ax.imshow(sino.values, cmap="gray", aspect="auto",
                   extent=extent, origin="lower")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
