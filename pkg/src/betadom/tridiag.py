"""Extremal eigenpairs of symmetric tridiagonal matrices.

Eigenvalues come from bisection on Sturm counts inside the Gershgorin
interval, so every answer is bracketed. Eigenvectors come from inverse
iteration. Only the extremes are ever needed downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np
from scipy.linalg import solve_banded

from .errors import NumericalError, ParameterError

__all__ = [
    "SymTridiagonal",
    "gram_tridiagonal",
    "sturm_count",
    "gershgorin_bounds",
    "extremal_eigenvalue",
    "top_eigenvector",
]

MAX_BISECTION_ITER = 200
DEFAULT_TOL = 1e-12
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SymTridiagonal:
    """Diagonal plus symmetric off-diagonal of an n x n matrix."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(self.diag, dtype=float)
        e = np.ascontiguousarray(self.offdiag, dtype=float)
        if d.ndim != 1 or e.ndim != 1 or d.size < 1 or e.size != d.size - 1:
            raise ParameterError(
                f"inconsistent tridiagonal shapes: diag {d.shape}, offdiag {e.shape}"
            )
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ParameterError("tridiagonal entries must be finite")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def corner(self, k: int) -> "SymTridiagonal":
        """Top-left k x k principal submatrix."""
        return SymTridiagonal(self.diag[:k], self.offdiag[: k - 1])

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def quadratic_form(self, v: np.ndarray) -> float:
        return float(v @ self.matvec(v))

    def norm_inf(self) -> float:
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.offdiag)
        row[1:] += np.abs(self.offdiag)
        return float(row.max())


def gram_tridiagonal(diag, subdiag) -> SymTridiagonal:
    """B^T B for the lower bidiagonal B with ``diag`` and ``subdiag``.

    ``B[i, i] = diag[i]`` and ``B[i+1, i] = subdiag[i]``, so
    ``(B^T B)[i, i] = diag[i]**2 + subdiag[i]**2`` (the last row has no
    subdiagonal term) and ``(B^T B)[i, i+1] = diag[i+1] * subdiag[i]``.
    """
    z = np.asarray(diag, dtype=float)
    w = np.asarray(subdiag, dtype=float)
    if w.size != z.size - 1:
        raise ParameterError("bidiagonal needs len(subdiag) == len(diag) - 1")
    d = z**2
    d[:-1] += w**2
    return SymTridiagonal(d, z[1:] * w)


@nb.njit(cache=True)
def _pivmin(diag, off2):
    scale = 1.0
    for i in range(diag.size):
        a = abs(diag[i])
        if a > scale:
            scale = a
    for i in range(off2.size):
        if off2[i] > scale * scale:
            scale = np.sqrt(off2[i])
    return 2.220446049250313e-16 * scale


@nb.njit(cache=True)
def _count_below(diag, off2, x, pivmin):
    q = diag[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    count = 1 if q < 0 else 0
    for i in range(1, diag.size):
        q = diag[i] - x - off2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


@nb.njit(cache=True)
def _gershgorin(diag, offdiag):
    n = diag.size
    lo = np.inf
    hi = -np.inf
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(offdiag[i - 1])
        if i < n - 1:
            r += abs(offdiag[i])
        if diag[i] - r < lo:
            lo = diag[i] - r
        if diag[i] + r > hi:
            hi = diag[i] + r
    return lo, hi


@nb.njit(cache=True)
def _bisect(diag, offdiag, largest, tol, max_iter):
    n = diag.size
    off2 = offdiag * offdiag
    pivmin = _pivmin(diag, off2)
    glo, ghi = _gershgorin(diag, offdiag)
    radius = max(abs(glo), abs(ghi))
    pad = 2.0 * 2.220446049250313e-16 * radius * n + 2.0 * pivmin
    lo = glo - pad
    hi = ghi + pad
    width = tol * max(1.0, radius)
    target = n if largest else 1
    for it in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= width or mid <= lo or mid >= hi:
            return mid, it
        # count(lo) < target <= count(hi) throughout
        if _count_below(diag, off2, mid, pivmin) >= target:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi), -1


def sturm_count(T: SymTridiagonal, x: float) -> int:
    """Number of eigenvalues of ``T`` strictly below ``x``."""
    off2 = T.offdiag**2
    if np.isposinf(x):
        return T.n
    if np.isneginf(x):
        return 0
    return int(_count_below(T.diag, off2, float(x), _pivmin(T.diag, off2)))


def gershgorin_bounds(T: SymTridiagonal) -> tuple[float, float]:
    return _gershgorin(T.diag, T.offdiag)


def extremal_eigenvalue(T: SymTridiagonal, which: str = "largest", tol: float = DEFAULT_TOL) -> float:
    """Smallest or largest eigenvalue of ``T`` by Sturm bisection.

    The bracket is shrunk to ``tol * max(1, r)`` where ``r`` is the largest
    Gershgorin bound in magnitude, or until it stops shrinking in floating
    point.
    """
    if which not in ("largest", "smallest"):
        raise ParameterError(f"which must be 'largest' or 'smallest', got {which!r}")
    if not tol > 0:
        raise ParameterError("tol must be positive")
    value, iters = _bisect(T.diag, T.offdiag, which == "largest", float(tol), MAX_BISECTION_ITER)
    if iters < 0:
        lo, hi = gershgorin_bounds(T)
        raise NumericalError(
            f"bisection exceeded {MAX_BISECTION_ITER} iterations "
            f"(n={T.n}, gershgorin=[{lo:.6g}, {hi:.6g}], tol={tol})"
        )
    return float(value)


def top_eigenvector(T: SymTridiagonal, lam: float | None = None, tol: float = 1e-12, max_iter: int = 50) -> np.ndarray:
    """Unit eigenvector for the eigenvalue nearest ``lam`` (default: the largest).

    Inverse iteration with the shift nudged by ``1e-10 * scale`` above
    ``lam``. The sign is fixed so the largest-magnitude component is positive.
    """
    if lam is None:
        lam = extremal_eigenvalue(T, "largest")
    n = T.n
    if n == 1:
        return np.ones(1)
    scale = max(1.0, T.norm_inf())
    ab = np.zeros((3, n))
    ab[0, 1:] = T.offdiag
    ab[2, :-1] = T.offdiag
    v = np.full(n, 1.0 / np.sqrt(n))
    for attempt in range(5):
        shift = lam + 1e-10 * scale * (1 + 10 * attempt)
        ab[1] = T.diag - shift
        try:
            for _ in range(max_iter):
                w = solve_banded((1, 1), ab, v, check_finite=True)
                w /= np.linalg.norm(w)
                if w @ v < 0:
                    w = -w
                converged = np.linalg.norm(w - v) <= tol * 10
                v = w
                if converged:
                    break
            break
        except (np.linalg.LinAlgError, ValueError):
            continue
    else:
        raise NumericalError(f"inverse iteration failed: singular solves near shift {lam}")
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return v
