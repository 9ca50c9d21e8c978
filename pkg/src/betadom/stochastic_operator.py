"""Finite-difference discretization of the stochastic operators

    -d^2/dx^2 + x^(1/(2k+1)) + (2/sqrt(beta)) x^(-k/(2k+1)) W'(x)

on (0, L) with Dirichlet conditions at both ends, plus the rescaled family
used to compare different beta under one shared noise path.

Every operator is kept in coefficient form (Laplacian, potential and noise
coefficients over a shared grid and noise path). Scaling and subtraction act
on the three coefficients, so noise cancellation between operators built on
the same path is checked on scalars rather than on assembled matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import ParameterError
from .tridiag import SymTridiagonal, extremal_eigenvalue

__all__ = [
    "OperatorGrid",
    "NoisePath",
    "DiscretizedOperator",
    "OperatorCouplingSpec",
    "build_noise",
    "discretize",
    "rescaled_operator",
    "sample_tw",
    "admissible_p_range",
    "alpha_range",
    "ordering_gap",
    "coupled_tw_pair",
    "coupled_operators",
    "zero_noise",
    "s_range",
    "EIG_TOL",
]

# Operator norms scale like 4/h^2, so the relative bisection tolerance is
# tightened until the bracket stops shrinking in floating point.
EIG_TOL = 1e-15


@dataclass(frozen=True)
class OperatorGrid:
    """Interior points ``x_i = i*h`` for ``i = 1..N-1`` with ``N = floor(L/h)``."""

    k: int
    L: float = 20.0
    h: float = 0.02

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise ParameterError(f"k must be a non-negative integer, got {self.k}")
        if not (self.h > 0 and self.L > 0):
            raise ParameterError("grid length and step must be positive")
        if self.h >= self.L or self.size < 1:
            raise ParameterError(f"step h={self.h} leaves no interior points on (0, {self.L})")

    @property
    def N(self) -> int:
        # Guard against L/h landing a hair below an integer.
        return int(math.floor(self.L / self.h + 1e-9))

    @property
    def size(self) -> int:
        return self.N - 1

    @property
    def exponent(self) -> float:
        return 1.0 / (2 * self.k + 1)

    @property
    def points(self) -> np.ndarray:
        return self.h * np.arange(1, self.N)

    def potential(self) -> np.ndarray:
        return self.points**self.exponent

    def cell_weights(self) -> np.ndarray:
        """Integral of ``x^(-2k/(2k+1))`` over the cell ``[x_i - h, x_i]``."""
        e = self.exponent
        right = self.points
        left = right - self.h
        left[0] = 0.0
        return (2 * self.k + 1) * (right**e - left**e)


@dataclass(frozen=True)
class NoisePath:
    g: np.ndarray
    cell_weights: np.ndarray

    def amplitudes(self, h: float) -> np.ndarray:
        """Cell-averaged white-noise increments ``sqrt(v_i)/h * g_i``."""
        return np.sqrt(self.cell_weights) / h * self.g


def build_noise(grid: OperatorGrid, stream: rng.RngStream) -> NoisePath:
    """Draw the standard normals shared by every operator on ``grid``."""
    g = rng.normal(stream, 0.0, 1.0, grid.size)
    return NoisePath(g, grid.cell_weights())


def zero_noise(grid: OperatorGrid) -> NoisePath:
    return NoisePath(np.zeros(grid.size), grid.cell_weights())


@dataclass(frozen=True)
class DiscretizedOperator:
    """``lap * (-Delta_h) + pot * x^(1/(2k+1)) + noise * (sqrt(v)/h) g`` on ``grid``."""

    grid: OperatorGrid
    noise: NoisePath
    lap_coef: float
    pot_coef: float
    noise_coef: float

    def tridiagonal(self) -> SymTridiagonal:
        h = self.grid.h
        diag = 2.0 * self.lap_coef / h**2 + self.pot_coef * self.grid.potential()
        if self.noise_coef != 0.0:
            diag = diag + self.noise_coef * self.noise.amplitudes(h)
        off = np.full(self.grid.size - 1, -self.lap_coef / h**2)
        return SymTridiagonal(diag, off)

    def scaled(self, factor: float) -> "DiscretizedOperator":
        return DiscretizedOperator(
            self.grid,
            self.noise,
            factor * self.lap_coef,
            factor * self.pot_coef,
            factor * self.noise_coef,
        )

    def __sub__(self, other: "DiscretizedOperator") -> "DiscretizedOperator":
        if other.grid != self.grid or other.noise is not self.noise:
            raise ParameterError("operators must share grid and noise path to subtract")
        return DiscretizedOperator(
            self.grid,
            self.noise,
            self.lap_coef - other.lap_coef,
            self.pot_coef - other.pot_coef,
            self.noise_coef - other.noise_coef,
        )

    def smallest(self, tol: float = EIG_TOL) -> float:
        return extremal_eigenvalue(self.tridiagonal(), "smallest", tol)


def _noise_coefficient(beta: float, p: float, e: float) -> float:
    return 2.0 / (math.sqrt(p**e) * math.sqrt(beta))


def rescaled_operator(grid: OperatorGrid, beta: float, p: float, noise: NoisePath) -> DiscretizedOperator:
    """The operator after the change of variable ``y = p x``, on the same grid.

    Its eigenvalues are ``1/p`` times those of the unscaled operator (in
    distribution, up to discretization).
    """
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    if not p > 0:
        raise ParameterError(f"p must be positive, got {p}")
    e = grid.exponent
    return DiscretizedOperator(
        grid,
        noise,
        float(p),
        p ** (-(2 * grid.k + 2) * e),
        _noise_coefficient(beta, p, e),
    )


def discretize(grid: OperatorGrid, beta: float, noise: NoisePath | None = None) -> DiscretizedOperator:
    """Finite-difference operator at ``beta``; ``noise=None`` drops the noise term."""
    if noise is None:
        noise = zero_noise(grid)
    return rescaled_operator(grid, beta, 1.0, noise)


def sample_tw(grid: OperatorGrid, beta: float, stream: rng.RngStream) -> float:
    """One draw of the order-k Tracy-Widom law: minus the ground-state eigenvalue."""
    return -discretize(grid, beta, build_noise(grid, stream)).smallest()


def _check_betas(beta1, beta2):
    if not (beta1 > 0 and beta2 > 0):
        raise ParameterError("betas must be positive")
    if beta2 < beta1:
        raise ParameterError(f"need beta2 >= beta1, got beta1={beta1}, beta2={beta2}")


def admissible_p_range(k: int, beta1: float, beta2: float) -> tuple[float, float]:
    """Rescaling coefficients ``p`` for which both gap coefficients are >= 0."""
    _check_betas(beta1, beta2)
    r = beta2 / beta1
    ex = (2 * k + 1) / (4 * k + 3)
    return (1.0 / r) ** ex, r**ex


def alpha_range(k: int, beta1: float, beta2: float) -> tuple[float, float]:
    """Multipliers ``alpha`` with TW_{beta1,k} dominating alpha * TW_{beta2,k}."""
    _check_betas(beta1, beta2)
    r = beta2 / beta1
    return r ** (1.0 / (4 * k + 3)), r ** ((4 * k + 2) / (4 * k + 3))


def s_range(k: int) -> tuple[float, float]:
    return 1.0 / (4 * k + 3), (4 * k + 2) / (4 * k + 3)


@dataclass(frozen=True)
class OperatorCouplingSpec:
    k: int
    beta1: float
    beta2: float
    p: float

    def __post_init__(self):
        _check_betas(self.beta1, self.beta2)
        if not self.p > 0:
            raise ParameterError(f"p must be positive, got {self.p}")

    @classmethod
    def from_s(cls, k: int, beta1: float, beta2: float, s: float) -> "OperatorCouplingSpec":
        """Choose ``p`` so that ``p * gamma == (beta2/beta1)**s``."""
        _check_betas(beta1, beta2)
        alpha = (beta2 / beta1) ** s
        p = (alpha * math.sqrt(beta1 / beta2)) ** (2 * (2 * k + 1) / (4 * k + 1))
        return cls(k, beta1, beta2, p)

    @property
    def gamma(self) -> float:
        e = 1.0 / (2 * self.k + 1)
        return math.sqrt(self.beta2) / (math.sqrt(self.p**e) * math.sqrt(self.beta1))

    @property
    def alpha(self) -> float:
        return self.p * self.gamma

    @property
    def s(self) -> float:
        if self.beta2 == self.beta1:
            return math.nan
        return math.log(self.alpha) / math.log(self.beta2 / self.beta1)

    def gap_coefficients(self) -> tuple[float, float]:
        """(Laplacian, potential) coefficients of the ordering gap."""
        e = 1.0 / (2 * self.k + 1)
        g = self.gamma
        return g - self.p, g - self.p ** (-(2 * self.k + 2) * e)

    def in_range(self) -> bool:
        lo, hi = admissible_p_range(self.k, self.beta1, self.beta2)
        return lo * (1 - 1e-12) <= self.p <= hi * (1 + 1e-12)

    def as_dict(self):
        return {
            "k": self.k,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "p": self.p,
            "gamma": self.gamma,
            "alpha": self.alpha,
            "s": self.s,
        }


def ordering_gap(spec: OperatorCouplingSpec, grid: OperatorGrid) -> SymTridiagonal:
    """Deterministic matrix of ``gamma * H_{beta2} - H^p_{beta1}``.

    With a shared noise path the noise terms cancel, leaving a scaled
    Laplacian plus a scaled potential.
    """
    if grid.k != spec.k:
        raise ParameterError("grid and spec disagree on k")
    lap, pot = spec.gap_coefficients()
    op = DiscretizedOperator(grid, zero_noise(grid), lap, pot, 0.0)
    return op.tridiagonal()


def coupled_operators(spec: OperatorCouplingSpec, grid: OperatorGrid, noise: NoisePath):
    """``(H^p_{beta1}, gamma * H_{beta2})`` sharing ``noise``."""
    lower = rescaled_operator(grid, spec.beta1, spec.p, noise)
    upper = discretize(grid, spec.beta2, noise).scaled(spec.gamma)
    return lower, upper


def coupled_tw_pair(spec: OperatorCouplingSpec, grid: OperatorGrid, stream: rng.RngStream) -> tuple[float, float]:
    """Ground states ``(lambda_min(H^p_{beta1}), lambda_min(gamma H_{beta2}))`` on one noise path.

    For ``p`` in the admissible range the second is at least the first.
    """
    if grid.k != spec.k:
        raise ParameterError("grid and spec disagree on k")
    if not spec.in_range():
        raise ParameterError(
            f"p={spec.p} outside admissible range {admissible_p_range(spec.k, spec.beta1, spec.beta2)}"
        )
    lower, upper = coupled_operators(spec, grid, build_noise(grid, stream))
    return lower.smallest(), upper.smallest()
