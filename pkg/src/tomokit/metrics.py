"""Image comparison metrics."""

from __future__ import annotations

import numpy as np

__all__ = ["error_metrics"]


def error_metrics(a, b) -> dict[str, float]:
    """Error of ``a`` against the reference ``b``.

    Returns relative_l2 = ||a - b|| / ||b|| (0/0 maps to 0), max_abs and
    mean_abs of the difference.  Accepts images or plain arrays of
    matching shape.
    """
    av = np.asarray(a.values if hasattr(a, "values") else a, dtype=float)
    bv = np.asarray(b.values if hasattr(b, "values") else b, dtype=float)
    if av.shape != bv.shape:
        raise ValueError(f"shape mismatch: {av.shape} vs {bv.shape}")
    diff = av - bv
    diff_norm = float(np.linalg.norm(diff))
    ref_norm = float(np.linalg.norm(bv))
    if diff_norm == 0.0:
        rel = 0.0
    elif ref_norm == 0.0:
        rel = float("inf")
    else:
        rel = diff_norm / ref_norm
    return {
        "relative_l2": rel,
        "max_abs": float(np.max(np.abs(diff))),
        "mean_abs": float(np.mean(np.abs(diff))),
    }
