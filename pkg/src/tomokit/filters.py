"""Band-limited ramp filters for filtered back projection.

A reconstruction filter is ``F_L(S) = |S| * W(S/L)`` with bandwidth ``L``
and an even window ``W`` supported on ``[-1, 1]`` with ``W(0) = 1``.  The
convolution kernels used by the discrete algorithms are samples of the
inverse Fourier transform of ``F_L``; for the Ram-Lak, Shepp-Logan and
Cosine windows these have closed forms at the grid points ``j*pi/L``,
while the Hamming and Gaussian kernels are obtained by quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FilterSpec",
    "parse_filter",
    "window_value",
    "filter_value",
    "kernel_samples",
    "kernel_value",
]

KINDS = ("ram-lak", "shepp-logan", "cosine", "hamming", "gaussian")


@dataclass(frozen=True)
class FilterSpec:
    """Filter family member: window kind, bandwidth L and optional shape beta.

    ``beta`` is required for the Hamming (``1/2 <= beta <= 1``) and
    Gaussian (``beta > 1``) windows and ignored otherwise.
    """

    kind: str
    L: float
    beta: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r}, expected one of {KINDS}")
        if self.L <= 0:
            raise ValueError(f"bandwidth L must be > 0, got {self.L}")
        if self.kind == "hamming":
            if self.beta is None or not 0.5 <= self.beta <= 1.0:
                raise ValueError(f"hamming window needs beta in [1/2, 1], got {self.beta}")
        elif self.kind == "gaussian":
            if self.beta is None or self.beta <= 1.0:
                raise ValueError(f"gaussian window needs beta > 1, got {self.beta}")

    def with_bandwidth(self, L: float) -> "FilterSpec":
        return FilterSpec(kind=self.kind, L=L, beta=self.beta)

    @property
    def name(self) -> str:
        if self.kind in ("hamming", "gaussian"):
            return f"{self.kind}:{self.beta:g}"
        return self.kind


def parse_filter(name: str, L: float) -> FilterSpec:
    """Parse a CLI filter name like ``ram-lak`` or ``hamming:0.75``."""
    kind, sep, param = name.partition(":")
    beta = None
    if sep:
        try:
            beta = float(param)
        except ValueError:
            raise ValueError(f"bad filter parameter in {name!r}") from None
    return FilterSpec(kind=kind, L=L, beta=beta)


def window_value(spec: FilterSpec, s):
    """Window W(s): even, 1 at s = 0, zero outside [-1, 1].

    Evaluated on |s|, so evenness holds exactly.
    """
    a = np.abs(np.asarray(s, dtype=float))
    inside = a <= 1.0
    if spec.kind == "ram-lak":
        w = np.ones_like(a)
    elif spec.kind == "shepp-logan":
        # sinc(pi*s/2) with the removable singularity at 0
        x = math.pi * a / 2.0
        w = np.ones_like(a)
        nz = x != 0
        w[nz] = np.sin(x[nz]) / x[nz]
    elif spec.kind == "cosine":
        w = np.cos(math.pi * a / 2.0)
    elif spec.kind == "hamming":
        w = spec.beta + (1.0 - spec.beta) * np.cos(math.pi * a)
    else:  # gaussian
        w = np.exp(-((math.pi * a / spec.beta) ** 2))
    return np.where(inside, w, 0.0)


def filter_value(spec: FilterSpec, S):
    """Low-pass ramp F_L(S) = |S| * W(S/L); zero for |S| > L."""
    S = np.asarray(S, dtype=float)
    return np.abs(S) * window_value(spec, S / spec.L)


def kernel_samples(spec: FilterSpec, count: int) -> np.ndarray:
    """Kernel samples (inverse Fourier transform of F_L) at t_j = j*pi/L.

    Returns an array of length ``2*count + 1`` for ``j = -count..count``;
    the kernel is even, so the array is symmetric about its middle.
    Ram-Lak, Shepp-Logan and Cosine use closed forms; Hamming and
    Gaussian are computed by composite Simpson quadrature.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    L = spec.L
    j = np.arange(0, count + 1, dtype=float)
    if spec.kind == "ram-lak":
        half = np.zeros(count + 1)
        half[0] = L * L / (2.0 * math.pi)
        odd = (np.arange(count + 1) % 2) == 1
        half[odd] = -2.0 * L * L / (math.pi**3 * j[odd] ** 2)
    elif spec.kind == "shepp-logan":
        half = 4.0 * L * L / (math.pi**3 * (1.0 - 4.0 * j * j))
    elif spec.kind == "cosine":
        sign = np.where(np.arange(count + 1) % 2 == 0, 1.0, -1.0)
        half = (2.0 * L * L / math.pi**2) * (
            sign / (1.0 - 4.0 * j * j)
            - 2.0 * (1.0 + 4.0 * j * j) / (math.pi * (1.0 - 4.0 * j * j) ** 2)
        )
    else:
        half = _kernel_simpson(spec, j * math.pi / L, panels=4096)
    return np.concatenate([half[:0:-1], half])


def kernel_value(spec: FilterSpec, t, panels: int = 8192) -> np.ndarray:
    """Kernel (inverse Fourier transform of F_L) at arbitrary points t.

    Evaluates (1/pi) * integral_0^L F_L(S) cos(S t) dS.  The Ram-Lak,
    Shepp-Logan, Cosine and Hamming kernels use exact antiderivatives;
    the Gaussian kernel falls back to composite Simpson quadrature with
    the given (even) number of panels.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    L = spec.L
    if spec.kind == "ram-lak":
        out = _int_s_cos(L, t) / math.pi
    elif spec.kind == "shepp-logan":
        a = math.pi / (2.0 * L)
        out = (2.0 * L / math.pi**2) * 0.5 * (_int_sin(L, a + t) + _int_sin(L, a - t))
    elif spec.kind == "cosine":
        a = math.pi / (2.0 * L)
        out = 0.5 / math.pi * (_int_s_cos_b(L, a + t) + _int_s_cos_b(L, a - t))
    elif spec.kind == "hamming":
        b = math.pi / L
        out = (
            spec.beta * _int_s_cos(L, t)
            + (1.0 - spec.beta) * 0.5 * (_int_s_cos_b(L, b + t) + _int_s_cos_b(L, b - t))
        ) / math.pi
    else:  # gaussian: no elementary antiderivative
        out = _kernel_simpson(spec, t, panels=panels)
    return out


def _kernel_simpson(spec: FilterSpec, t: np.ndarray, panels: int) -> np.ndarray:
    """Composite Simpson quadrature of (1/pi) integral_0^L F_L(S) cos(S t) dS."""
    if panels % 2 != 0:
        raise ValueError(f"Simpson rule needs an even panel count, got {panels}")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    L = spec.L
    S = np.linspace(0.0, L, panels + 1)
    weights = np.full(panels + 1, 2.0)
    weights[1::2] = 4.0
    weights[0] = weights[-1] = 1.0
    weights *= L / panels / 3.0
    FL = filter_value(spec, S)
    return (np.cos(np.outer(t, S)) @ (weights * FL)) / math.pi


def _int_s_cos(L: float, t: np.ndarray) -> np.ndarray:
    """integral_0^L S cos(S t) dS."""
    return _int_s_cos_scaled(L, t)


def _int_s_cos_b(L: float, b: np.ndarray) -> np.ndarray:
    """integral_0^L S cos(b S) dS, vectorized over b."""
    return _int_s_cos_scaled(L, np.asarray(b, dtype=float))


def _int_s_cos_scaled(L: float, b: np.ndarray) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    out = np.full(b.shape, L * L / 2.0)
    nz = np.abs(b) > 1e-300
    bn = b[nz]
    out[nz] = L * np.sin(bn * L) / bn + (np.cos(bn * L) - 1.0) / (bn * bn)
    # series fallback where b*L is tiny: the closed form cancels badly
    small = nz.copy()
    small[nz] = np.abs(bn * L) < 1e-4
    if np.any(small):
        bs = b[small]
        x = bs * L
        # L^2 * (1/2 - x^2/8 + x^4/144)
        out[small] = L * L * (0.5 - x * x / 8.0 + x**4 / 144.0)
    return out


def _int_sin(L: float, b: np.ndarray) -> np.ndarray:
    """integral_0^L sin(b S) dS, vectorized over b."""
    b = np.asarray(b, dtype=float)
    out = np.zeros(b.shape)
    nz = np.abs(b * L) > 1e-8
    bn = b[nz]
    out[nz] = (1.0 - np.cos(bn * L)) / bn
    out[~nz] = 0.5 * b[~nz] * L * L
    return out
