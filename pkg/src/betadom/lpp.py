"""Last-passage percolation with i.i.d. exponential vertex weights.

Weights are drawn one row at a time from the stream and folded into a
single rolling row of passage times, so a field is never stored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import ParameterError

__all__ = [
    "LppConfig",
    "MODELS",
    "passage_times",
    "lpp_point_to_point",
    "lpp_point_to_line",
    "lpp_symmetrized",
    "symmetric_field",
    "sample_lpp",
]

MODELS = ("point_to_point", "point_to_line", "symmetrized")


@dataclass(frozen=True)
class LppConfig:
    model: str
    n: int
    rate: float = 1.0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ParameterError(f"unknown LPP model {self.model!r}; expected one of {MODELS}")
        if self.n < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        if not self.rate > 0:
            raise ParameterError(f"rate must be positive, got {self.rate}")


def _fold_row(prev: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # G(i, j) = w(i, j) + max(G(i-1, j), G(i, j-1)); prev holds row i-1.
    row = np.empty_like(weights)
    left = 0.0
    for j, w in enumerate(weights.tolist()):
        up = prev[j] if j < prev.size else 0.0
        left = w + (up if up > left else left)
        row[j] = left
    return row


def passage_times(weights) -> np.ndarray:
    """Full table of point-to-point passage times from the corner (1, 1)."""
    w = np.asarray(weights, dtype=float)
    table = np.empty_like(w)
    prev = np.zeros(w.shape[1])
    for i in range(w.shape[0]):
        prev = _fold_row(prev, w[i])
        table[i] = prev
    return table


def _check_n(n):
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")


def lpp_point_to_point(n: int, stream: rng.RngStream, rate: float = 1.0) -> float:
    """Passage time from (1, 1) to (n, n)."""
    _check_n(n)
    prev = np.zeros(n)
    for _ in range(n):
        prev = _fold_row(prev, rng.exponential(stream, rate, n))
    return float(prev[-1])


def lpp_point_to_line(n: int, stream: rng.RngStream, rate: float = 1.0) -> float:
    """Maximum passage time from (1, 1) over endpoints with ``i + j = 2n``.

    Row ``i`` of the triangle holds columns ``1..2n-i``; its last entry lies
    on the target antidiagonal.
    """
    _check_n(n)
    prev = np.zeros(0)
    best = -np.inf
    for i in range(1, 2 * n):
        prev = _fold_row(prev, rng.exponential(stream, rate, 2 * n - i))
        best = max(best, prev[-1])
    return float(best)


def symmetric_field(n: int, stream: rng.RngStream, rate: float = 1.0) -> np.ndarray:
    """Symmetric ``2n x 2n`` weight field with zero diagonal.

    One weight per unordered pair ``{i, j}``, drawn row by row over
    ``i < j``.
    """
    _check_n(n)
    size = 2 * n
    field = np.zeros((size, size))
    for i in range(size - 1):
        field[i, i + 1 :] = rng.exponential(stream, rate, size - 1 - i)
    return field + field.T


def lpp_symmetrized(n: int, stream: rng.RngStream, rate: float = 1.0) -> float:
    """Passage time from (1, 1) to (2n, 2n) on the symmetrized field."""
    field = symmetric_field(n, stream, rate)
    prev = np.zeros(field.shape[1])
    for row in field:
        prev = _fold_row(prev, row)
    return float(prev[-1])


_SAMPLERS = {
    "point_to_point": lpp_point_to_point,
    "point_to_line": lpp_point_to_line,
    "symmetrized": lpp_symmetrized,
}


def sample_lpp(config: LppConfig, stream: rng.RngStream) -> float:
    return _SAMPLERS[config.model](config.n, stream, config.rate)
