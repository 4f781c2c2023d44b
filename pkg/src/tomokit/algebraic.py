"""Fully discrete reconstruction: Radon matrix, Kaczmarz sweeps, least squares.

The image is expanded in the pixel basis, which turns reconstruction
into a sparse linear system whose entries are ray-pixel intersection
lengths.  Solvers: cyclic row projections (plain, relaxed and
non-negative), Tikhonov-regularized least squares via matrix-free
conjugate gradients, and dense QR for small overdetermined systems.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import LineParam
from .projector import ray_pixel_intersections

__all__ = [
    "SparseMatrix",
    "SolveReport",
    "build_radon_matrix",
    "project_row",
    "kaczmarz",
    "kaczmarz_nonneg",
    "tikhonov_cg",
    "least_squares_qr",
]

QR_ELEMENT_LIMIT = 10**7


@dataclass(frozen=True)
class SolveReport:
    """Outcome of an iterative solve."""

    iterations: int
    residual_norm: float
    stop_reason: str  # "tol_step" | "tol_residual" | "max_iter"

    @property
    def converged(self) -> bool:
        return self.stop_reason != "max_iter"


@dataclass(frozen=True)
class SparseMatrix:
    """Compressed sparse rows with non-negative values.

    ``indptr`` has length n_rows + 1; row j occupies
    ``indices[indptr[j]:indptr[j+1]]`` (strictly increasing) with the
    matching ``values`` slice.
    """

    n_rows: int
    n_cols: int
    indptr: np.ndarray
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "indptr", np.asarray(self.indptr, dtype=np.int64))
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.indptr.shape != (self.n_rows + 1,):
            raise ValueError("indptr must have length n_rows + 1")
        if self.indices.shape != self.values.shape:
            raise ValueError("indices and values must have equal length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("matrix values must be finite")
        if self.indices.size:
            gaps = np.diff(self.indices)
            row_start = np.zeros(self.indices.size, dtype=bool)
            starts = self.indptr[1:-1]  # first entry of each later row
            row_start[starts[starts < self.indices.size]] = True
            if not np.all(gaps[~row_start[1:]] > 0):
                raise ValueError("per-row column indices must be strictly increasing")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def row(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        sl = slice(self.indptr[j], self.indptr[j + 1])
        return self.indices[sl], self.values[sl]

    def matvec(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        prod = self.values * c[self.indices]
        out = np.zeros(self.n_rows)
        np.add.at(out, self._row_of(), prod)
        return out

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.bincount(
            self.indices, weights=self.values * x[self._row_of()], minlength=self.n_cols
        )

    def _row_of(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_rows), np.diff(self.indptr))

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self._row_of(), self.indices] = self.values
        return out

    def row_norms_sq(self) -> np.ndarray:
        out = np.zeros(self.n_rows)
        np.add.at(out, self._row_of(), self.values**2)
        return out

    def dump(self, path: str | Path) -> None:
        """Text dump: header ``M N nnz`` then one ``row col value`` triple per line."""
        rows = self._row_of()
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"{self.n_rows} {self.n_cols} {self.nnz}\n")
            for r, c, v in zip(rows, self.indices, self.values):
                f.write(f"{r} {c} {float(v)!r}\n")


def build_radon_matrix(n: int, extent: float, lines: list[LineParam]) -> SparseMatrix:
    """Radon matrix rows: ray-pixel intersection lengths, column-wise pixel order."""
    indptr = np.zeros(len(lines) + 1, dtype=np.int64)
    idx_parts = []
    val_parts = []
    for j, line in enumerate(lines):
        idx, lengths = ray_pixel_intersections(line, n, extent)
        indptr[j + 1] = indptr[j] + idx.size
        idx_parts.append(idx)
        val_parts.append(lengths)
    return SparseMatrix(
        n_rows=len(lines),
        n_cols=n * n,
        indptr=indptr,
        indices=np.concatenate(idx_parts) if idx_parts else np.empty(0, dtype=np.int64),
        values=np.concatenate(val_parts) if val_parts else np.empty(0),
    )


def project_row(u: np.ndarray, a: np.ndarray, y: float, omega: float = 1.0) -> np.ndarray:
    """Relaxed orthogonal projection of u onto the affine space {c : a.c = y}.

    With omega = 1 the result satisfies a.result = y exactly and the
    projection is idempotent.
    """
    u = np.asarray(u, dtype=float)
    a = np.asarray(a, dtype=float)
    denom = a @ a
    if denom == 0.0:
        raise ValueError("cannot project onto a zero row")
    return u - omega * ((a @ u - float(y)) / denom) * a


def _check_kaczmarz_args(A: SparseMatrix, y, omega):
    if not 0.0 < omega < 2.0:
        raise ValueError(f"relaxation omega must lie in (0, 2), got {omega}")
    y = np.asarray(y, dtype=float)
    if y.shape != (A.n_rows,):
        raise ValueError(f"y has shape {y.shape}, expected ({A.n_rows},)")
    return y


def _default_sweeps(A: SparseMatrix) -> int:
    return int(10 * A.n_rows / max(A.n_cols, 1) + 100)


def kaczmarz(
    A: SparseMatrix,
    y,
    c0=None,
    omega: float = 1.0,
    delta: float = 1e-6,
    max_sweeps: int | None = None,
    row_order: str | None = None,
    seed: int | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Kaczmarz's method: cyclic relaxed projections onto the row spaces.

    Sweeps the rows in order 1..M (or in a fresh random permutation per
    sweep for ``row_order='random'``) and stops when the iterate moves
    less than ``delta``, when the relative residual drops below
    ``delta``, or after ``max_sweeps`` sweeps.  Rows with zero norm are
    skipped.  Started from c0 = 0 (or any point in the row space), the
    iteration converges to the minimal-norm solution of a consistent
    system.
    """
    return _kaczmarz_impl(A, y, c0, omega, delta, max_sweeps, row_order, seed, nonneg=False)


def kaczmarz_nonneg(
    A: SparseMatrix,
    y,
    c0=None,
    delta: float = 1e-6,
    max_sweeps: int | None = None,
    row_order: str | None = None,
    seed: int | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Kaczmarz's method with the classic non-negativity clamp after every projection."""
    return _kaczmarz_impl(A, y, c0, 1.0, delta, max_sweeps, row_order, seed, nonneg=True)


def _kaczmarz_impl(A, y, c0, omega, delta, max_sweeps, row_order, seed, nonneg):
    y = _check_kaczmarz_args(A, y, omega)
    if max_sweeps is None:
        max_sweeps = _default_sweeps(A)
    if row_order not in (None, "sequential", "random"):
        raise ValueError(f"row_order must be 'random' or None, got {row_order!r}")
    c = np.zeros(A.n_cols) if c0 is None else np.array(c0, dtype=float)
    norms_sq = A.row_norms_sq()
    zero_rows = norms_sq == 0.0
    if np.any(zero_rows):
        warnings.warn(
            f"skipping {int(np.count_nonzero(zero_rows))} zero rows "
            "(rays that miss the grid)",
            stacklevel=3,
        )
    rng = np.random.default_rng(seed) if row_order == "random" else None
    y_norm = float(np.linalg.norm(y))
    first_update = True
    sweeps = 0
    reason = "max_iter"
    resid = float(np.linalg.norm(A.matvec(c) - y))
    for sweep in range(1, max_sweeps + 1):
        sweeps = sweep
        c_prev = c.copy()
        order = rng.permutation(A.n_rows) if rng is not None else range(A.n_rows)
        for j in order:
            if zero_rows[j]:
                continue
            idx, vals = A.row(j)
            coef = omega * (vals @ c[idx] - y[j]) / norms_sq[j]
            if nonneg:
                if first_update:
                    # the clamp acts on the whole vector; afterwards only
                    # the touched entries can go negative again
                    c[idx] -= coef * vals
                    np.maximum(c, 0.0, out=c)
                    first_update = False
                else:
                    c[idx] = np.maximum(c[idx] - coef * vals, 0.0)
            else:
                c[idx] -= coef * vals
        resid = float(np.linalg.norm(A.matvec(c) - y))
        if np.linalg.norm(c - c_prev) <= delta:
            reason = "tol_step"
            break
        if resid <= delta * y_norm:
            reason = "tol_residual"
            break
    return c, SolveReport(iterations=sweeps, residual_norm=resid, stop_reason=reason)


def tikhonov_cg(
    A,
    y,
    gamma: float,
    B: np.ndarray | None = None,
    cg_tol: float = 1e-10,
    cg_max_iter: int | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Regularized least squares via conjugate gradients.

    Solves the generalized normal equation (A^T A + gamma B) c = A^T y
    with matrix-free products; B = None means the identity (classical
    Tikhonov).  ``A`` may be a SparseMatrix or a dense 2D array.
    """
    if gamma <= 0:
        raise ValueError(f"regularization parameter gamma must be > 0, got {gamma}")
    matvec, rmatvec, n_rows, n_cols = _as_operator(A)
    y = np.asarray(y, dtype=float)
    if y.shape != (n_rows,):
        raise ValueError(f"y has shape {y.shape}, expected ({n_rows},)")
    if B is not None:
        B = np.asarray(B, dtype=float)
        if B.shape != (n_cols, n_cols):
            raise ValueError(f"B has shape {B.shape}, expected ({n_cols}, {n_cols})")

    def apply(c):
        reg = gamma * c if B is None else gamma * (B @ c)
        return rmatvec(matvec(c)) + reg

    rhs = rmatvec(y)
    rhs_norm = float(np.linalg.norm(rhs))
    if cg_max_iter is None:
        cg_max_iter = 10 * n_cols
    c = np.zeros(n_cols)
    r = rhs.copy()
    p = r.copy()
    rs = float(r @ r)
    reason = "max_iter"
    iters = 0
    if rhs_norm == 0.0:
        return c, SolveReport(iterations=0, residual_norm=0.0, stop_reason="tol_residual")
    for it in range(1, cg_max_iter + 1):
        iters = it
        Ap = apply(p)
        alpha = rs / float(p @ Ap)
        c += alpha * p
        r -= alpha * Ap
        rs_new = float(r @ r)
        if math.sqrt(rs_new) <= cg_tol * rhs_norm:
            reason = "tol_residual"
            break
        p = r + (rs_new / rs) * p
        rs = rs_new
    resid = float(np.linalg.norm(apply(c) - rhs))
    return c, SolveReport(iterations=iters, residual_norm=resid, stop_reason=reason)


def _as_operator(A):
    if isinstance(A, SparseMatrix):
        return A.matvec, A.rmatvec, A.n_rows, A.n_cols
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError("A must be a SparseMatrix or a 2D array")
    return (lambda c: A @ c), (lambda x: A.T @ x), A.shape[0], A.shape[1]


def least_squares_qr(A: np.ndarray, y) -> tuple[np.ndarray, float]:
    """Dense least squares by Householder QR with backward substitution.

    Requires an overdetermined (or square) full-rank system at desk
    scale; returns the minimizer and the residual norm ||A c - y||.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2:
        raise ValueError("A must be a 2D array")
    m, n = A.shape
    if m < n:
        raise ValueError(f"system must have at least as many rows as columns, got {m}x{n}")
    if A.size > QR_ELEMENT_LIMIT:
        raise ValueError(
            f"dense QR limited to {QR_ELEMENT_LIMIT} elements, got {A.size}; "
            "use tikhonov_cg for large systems"
        )
    if y.shape != (m,):
        raise ValueError(f"y has shape {y.shape}, expected ({m},)")
    Q, R = np.linalg.qr(A, mode="reduced")
    diag = np.abs(np.diag(R))
    tol = max(m, n) * np.finfo(float).eps * (diag.max() if diag.size else 0.0)
    if np.any(diag <= tol):
        raise ValueError("rank-deficient system: a diagonal entry of R vanishes")
    y1 = Q.T @ y
    c = _back_substitute(R, y1)
    residual = float(np.linalg.norm(A @ c - y))
    return c, residual


def _back_substitute(R: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = R.shape[1]
    c = np.zeros(n)
    for k in range(n - 1, -1, -1):
        c[k] = (b[k] - R[k, k + 1 :] @ c[k + 1 :]) / R[k, k]
    return c
