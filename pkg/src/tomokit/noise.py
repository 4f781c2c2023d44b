"""Seeded, platform-independent noise injection for sinograms.

The generator is fixed down to the bit level so that runs are
reproducible across machines and across implementations of the same
recipe: a splitmix64 counter stream produces 53-bit uniforms, which are
mapped to normal variates through Acklam's rational approximation of
the inverse normal CDF (relative error below 1.2e-9, ample for noise).
"""

from __future__ import annotations

import numpy as np

__all__ = ["PortableRng", "add_noise"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)

# Acklam's inverse normal CDF coefficients
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def _splitmix64(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start .. start+count-1`` of the splitmix64 stream for ``seed``."""
    i = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + i * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def inverse_normal_cdf(p: np.ndarray) -> np.ndarray:
    """Acklam's piecewise rational approximation of the standard normal quantile."""
    p = np.asarray(p, dtype=float)
    x = np.empty_like(p)

    low = p < _P_LOW
    high = p > 1.0 - _P_LOW
    mid = ~(low | high)

    q = p[mid] - 0.5
    r = q * q
    num = ((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    x[mid] = num * q / den

    for mask, tail_p, sign in ((low, p[low], 1.0), (high, 1.0 - p[high], -1.0)):
        if np.any(mask):
            q = np.sqrt(-2.0 * np.log(tail_p))
            num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
            den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
            x[mask] = sign * num / den
    return x


class PortableRng:
    """Counter-based splitmix64 stream with inverse-CDF normal variates."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._pos = 0

    def uniform(self, count: int) -> np.ndarray:
        """``count`` uniforms in the open interval (0, 1), 53-bit resolution."""
        z = _splitmix64(self.seed, self._pos, count)
        self._pos += count
        return ((z >> np.uint64(11)).astype(float) + 0.5) / 2.0**53

    def standard_normal(self, count: int) -> np.ndarray:
        return inverse_normal_cdf(self.uniform(count))


def add_noise(sino, level: float, seed: int):
    """Add white Gaussian noise scaled to a relative L2 energy ``level``.

    The noise standard deviation is level * ||values||_2 / sqrt(count),
    so the expected noise energy is ``level`` times the data energy.
    Returns the noisy sinogram together with the realized ratio
    ||noise||_2 / ||values||_2.  Bit-identical for identical inputs and
    seeds.
    """
    if level < 0:
        raise ValueError(f"noise level must be >= 0, got {level}")
    values = np.asarray(sino.values if hasattr(sino, "values") else sino, dtype=float)
    data_norm = float(np.linalg.norm(values))
    if level == 0.0 or data_norm == 0.0:
        noisy_values = values.copy()
        realized = 0.0
    else:
        sigma = level * data_norm / np.sqrt(values.size)
        eps = PortableRng(seed).standard_normal(values.size).reshape(values.shape)
        noise = sigma * eps
        noisy_values = values + noise
        realized = float(np.linalg.norm(noise)) / data_norm
    if hasattr(sino, "with_values"):
        return sino.with_values(noisy_values), realized
    return noisy_values, realized
