"""Tridiagonal Hermite and bidiagonal Laguerre beta-ensemble samplers.

Matrices are stored without the ``1/sqrt(beta)`` prefactor. The coupled
samplers compare matrices of different beta entry by entry, and that
comparison only makes sense at this scale. ``lambda1()`` applies the
normalization that turns a stored matrix into the eigenvalue of the
beta-ensemble density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from numbers import Rational

import numpy as np

from . import rng
from .errors import ParameterError
from .tridiag import SymTridiagonal, extremal_eigenvalue, gram_tridiagonal

__all__ = [
    "HermiteSample",
    "LaguerreSample",
    "HermiteCoupleSpec",
    "LaguerreCoupleSpec",
    "CoupledPair",
    "sample_hermite",
    "sample_laguerre",
    "sample_coupled_hermite",
    "sample_coupled_laguerre",
    "scale_hermite",
    "scale_laguerre",
    "scaling_identity_check",
]


def _as_fraction(x) -> Fraction:
    if isinstance(x, (Fraction, Rational, int)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    # Decimal repr keeps "0.1" as 1/10 rather than its binary expansion.
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class HermiteSample:
    n: int
    beta: float
    diag: np.ndarray
    offdiag: np.ndarray

    def tridiagonal(self) -> SymTridiagonal:
        return SymTridiagonal(self.diag, self.offdiag)

    def largest(self, tol: float = 1e-12) -> float:
        """Largest eigenvalue of the stored (unnormalized) matrix."""
        return extremal_eigenvalue(self.tridiagonal(), "largest", tol)

    def lambda1(self, tol: float = 1e-12) -> float:
        """Largest eigenvalue under the Hermite beta-ensemble density."""
        return self.largest(tol) / math.sqrt(self.beta)


@dataclass(frozen=True)
class LaguerreSample:
    n: int
    kappa: float
    beta: float
    diag: np.ndarray
    subdiag: np.ndarray

    def bidiagonal(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.subdiag, -1)

    def gram(self) -> SymTridiagonal:
        return gram_tridiagonal(self.diag, self.subdiag)

    def largest(self, tol: float = 1e-12) -> float:
        """Largest eigenvalue of B^T B for the stored (unnormalized) B."""
        return extremal_eigenvalue(self.gram(), "largest", tol)

    def lambda1(self, tol: float = 1e-12) -> float:
        """Largest eigenvalue under the Laguerre beta-ensemble density."""
        return self.largest(tol) / self.beta


def _check_beta(beta):
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")


def _hermite_dofs(n, beta) -> np.ndarray:
    return np.array([float(beta * (n - i)) for i in range(1, n)])


def _laguerre_dofs(n, kappa, beta) -> tuple[np.ndarray, np.ndarray]:
    z = np.array([float(beta * (kappa - i + 1)) for i in range(1, n + 1)])
    w = np.array([float(beta * (n - i)) for i in range(1, n)])
    return z, w


def sample_hermite(n: int, beta: float, stream: rng.RngStream) -> HermiteSample:
    """Draw the unnormalized tridiagonal Hermite matrix.

    Diagonal entries are N(0, 2); off-diagonal entry ``i`` (1-based) is
    chi with ``beta * (n - i)`` degrees of freedom.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    _check_beta(beta)
    diag = rng.normal(stream, 0.0, 2.0, n)
    offdiag = rng.chi(stream, _hermite_dofs(n, beta)) if n > 1 else np.empty(0)
    return HermiteSample(n, float(beta), diag, np.asarray(offdiag, dtype=float))


def sample_laguerre(n: int, kappa: float, beta: float, stream: rng.RngStream) -> LaguerreSample:
    """Draw the unnormalized lower-bidiagonal Laguerre matrix (needs kappa > n - 1)."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    _check_beta(beta)
    if not kappa > n - 1:
        raise ParameterError(f"kappa must exceed n - 1 = {n - 1}, got {kappa}")
    zdof, wdof = _laguerre_dofs(n, kappa, beta)
    diag = np.atleast_1d(rng.chi(stream, zdof))
    subdiag = np.atleast_1d(rng.chi(stream, wdof)) if n > 1 else np.empty(0)
    return LaguerreSample(n, float(kappa), float(beta), diag, subdiag)


@dataclass(frozen=True)
class HermiteCoupleSpec:
    """Parameters for comparing T_{m, beta1} against T_{n, beta2}.

    ``beta2 = m * beta1 / n`` is derived, never passed, so ``m * beta1 ==
    n * beta2`` holds exactly in rational arithmetic.
    """

    m: int
    n: int
    beta1_exact: Fraction

    def __init__(self, m: int, n: int, beta1):
        b1 = _as_fraction(beta1)
        if n < 1 or m < n:
            raise ParameterError(f"need m >= n >= 1, got m={m}, n={n}")
        if b1 <= 0:
            raise ParameterError(f"beta1 must be positive, got {beta1}")
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "beta1_exact", b1)

    @property
    def beta2_exact(self) -> Fraction:
        return Fraction(self.m, self.n) * self.beta1_exact

    @property
    def beta1(self) -> float:
        return float(self.beta1_exact)

    @property
    def beta2(self) -> float:
        return float(self.beta2_exact)

    @cached_property
    def _dofs(self):
        b1 = self.beta1_exact
        extra = np.array([float(b1 * (self.m - i)) for i in range(self.n, self.m)])
        return self.coupled_dofs() + (extra,)

    def coupled_dofs(self) -> tuple[np.ndarray, np.ndarray]:
        """(upper, lower) dof pairs of the n - 1 coupled off-diagonal entries."""
        b1, b2 = self.beta1_exact, self.beta2_exact
        hi = np.array([float(b1 * (self.m - i)) for i in range(1, self.n)])
        lo = np.array([float(b2 * (self.n - i)) for i in range(1, self.n)])
        return hi, lo

    def as_dict(self):
        return {"m": self.m, "n": self.n, "beta1": self.beta1, "beta2": self.beta2}


@dataclass(frozen=True)
class LaguerreCoupleSpec:
    """Parameters for comparing B_{m, m kappa / n, beta1} against B_{n, kappa, beta2}."""

    m: int
    n: int
    kappa_exact: Fraction
    beta1_exact: Fraction

    def __init__(self, m: int, n: int, kappa, beta1):
        b1 = _as_fraction(beta1)
        k = _as_fraction(kappa)
        if n < 1 or m < n:
            raise ParameterError(f"need m >= n >= 1, got m={m}, n={n}")
        if b1 <= 0:
            raise ParameterError(f"beta1 must be positive, got {beta1}")
        if not k > n - 1:
            raise ParameterError(f"kappa must exceed n - 1 = {n - 1}, got {kappa}")
        if not Fraction(m, n) * k > m - 1:
            raise ParameterError("m * kappa / n must exceed m - 1")
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "kappa_exact", k)
        object.__setattr__(self, "beta1_exact", b1)

    @property
    def beta2_exact(self) -> Fraction:
        return Fraction(self.m, self.n) * self.beta1_exact

    @property
    def kappa_upper_exact(self) -> Fraction:
        return Fraction(self.m, self.n) * self.kappa_exact

    @property
    def beta1(self) -> float:
        return float(self.beta1_exact)

    @property
    def beta2(self) -> float:
        return float(self.beta2_exact)

    @property
    def kappa(self) -> float:
        return float(self.kappa_exact)

    @property
    def kappa_upper(self) -> float:
        return float(self.kappa_upper_exact)

    @cached_property
    def _dofs(self):
        b1, ku, m, n = self.beta1_exact, self.kappa_upper_exact, self.m, self.n
        extra_z = np.array([float(b1 * (ku - i + 1)) for i in range(n + 1, m + 1)])
        extra_w = np.array([float(b1 * (m - i)) for i in range(n, m)])
        return self.coupled_dofs() + (extra_z, extra_w)

    def coupled_dofs(self):
        """Dof pairs ``(diag_hi, diag_lo, sub_hi, sub_lo)`` of the coupled entries."""
        b1, b2 = self.beta1_exact, self.beta2_exact
        ku, k = self.kappa_upper_exact, self.kappa_exact
        n, m = self.n, self.m
        diag_hi = np.array([float(b1 * (ku - i + 1)) for i in range(1, n + 1)])
        diag_lo = np.array([float(b2 * (k - i + 1)) for i in range(1, n + 1)])
        sub_hi = np.array([float(b1 * (m - i)) for i in range(1, n)])
        sub_lo = np.array([float(b2 * (n - i)) for i in range(1, n)])
        return diag_hi, diag_lo, sub_hi, sub_lo

    def as_dict(self):
        return {
            "m": self.m,
            "n": self.n,
            "kappa": self.kappa,
            "kappa_upper": self.kappa_upper,
            "beta1": self.beta1,
            "beta2": self.beta2,
        }


@dataclass(frozen=True)
class CoupledPair:
    upper: HermiteSample | LaguerreSample
    lower: HermiteSample | LaguerreSample
    shared_seed_record: dict = field(default_factory=dict)

    def largest_pair(self, tol: float = 1e-12) -> tuple[float, float]:
        """Unnormalized largest eigenvalues ``(upper, lower)``."""
        return self.upper.largest(tol), self.lower.largest(tol)


def sample_coupled_hermite(spec: HermiteCoupleSpec, stream: rng.RngStream) -> CoupledPair:
    """Couple T_{m, beta1} (upper) with T_{n, beta2} (lower).

    The top n x n corner of ``upper`` shares its diagonal normals with
    ``lower``, and its off-diagonal entries are quantile-coupled chi draws
    that dominate those of ``lower``. Entries of ``upper`` outside the corner
    are drawn afterwards, independently.
    """
    m, n = spec.m, spec.n
    shared_diag = rng.normal(stream, 0.0, 2.0, n)
    dof_hi, dof_lo, extra_dofs = spec._dofs
    if n > 1:
        off_hi, off_lo = rng.coupled_chi(stream, dof_hi, dof_lo)
    else:
        off_hi = off_lo = np.empty(0)
    extra_diag = rng.normal(stream, 0.0, 2.0, m - n)
    extra_off = rng.chi(stream, extra_dofs) if m > n else np.empty(0)

    upper = HermiteSample(
        m,
        spec.beta1,
        np.concatenate([shared_diag, extra_diag]),
        np.concatenate([off_hi, extra_off]),
    )
    lower = HermiteSample(n, spec.beta2, shared_diag.copy(), np.asarray(off_lo))
    record = {
        "seed": stream.seed,
        "stream_id": stream.stream_id,
        "order": ["shared_diag", "coupled_offdiag", "upper_diag", "upper_offdiag"],
    }
    return CoupledPair(upper, lower, record)


def sample_coupled_laguerre(spec: LaguerreCoupleSpec, stream: rng.RngStream) -> CoupledPair:
    """Couple B_{m, m kappa / n, beta1} (upper) with B_{n, kappa, beta2} (lower).

    The first n diagonal and first n - 1 subdiagonal entries are
    quantile-coupled; at index 1 the two diagonal dofs coincide, so those
    entries are equal. Remaining entries of ``upper`` are drawn afterwards.
    """
    m, n = spec.m, spec.n
    diag_hi_dof, diag_lo_dof, sub_hi_dof, sub_lo_dof, extra_z, extra_w = spec._dofs
    diag_hi, diag_lo = rng.coupled_chi(stream, diag_hi_dof, diag_lo_dof)
    if n > 1:
        sub_hi, sub_lo = rng.coupled_chi(stream, sub_hi_dof, sub_lo_dof)
    else:
        sub_hi = sub_lo = np.empty(0)
    extra_diag = rng.chi(stream, extra_z) if m > n else np.empty(0)
    extra_sub = rng.chi(stream, extra_w) if m > n else np.empty(0)

    upper = LaguerreSample(
        m,
        spec.kappa_upper,
        spec.beta1,
        np.concatenate([diag_hi, extra_diag]),
        np.concatenate([sub_hi, extra_sub]),
    )
    lower = LaguerreSample(n, spec.kappa, spec.beta2, np.asarray(diag_lo), np.asarray(sub_lo))
    record = {
        "seed": stream.seed,
        "stream_id": stream.stream_id,
        "order": ["coupled_diag", "coupled_subdiag", "upper_diag", "upper_subdiag"],
    }
    return CoupledPair(upper, lower, record)


def scale_hermite(lambda1, n: int):
    """Edge scaling ``(lambda1 / sqrt(n) - 2) * n**(2/3)``."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return (np.asarray(lambda1) / math.sqrt(n) - 2.0) * n ** (2.0 / 3.0)


def scale_laguerre(lambda1, n: int, kappa: float):
    """Edge scaling ``(kappa n)^(1/6) (sqrt(kappa)+sqrt(n))^(2/3) (lambda1/(sqrt(kappa)+sqrt(n))^2 - 1)``."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not kappa > 0:
        raise ParameterError(f"kappa must be positive, got {kappa}")
    root = math.sqrt(kappa) + math.sqrt(n)
    return (kappa * n) ** (1.0 / 6.0) * root ** (2.0 / 3.0) * (np.asarray(lambda1) / root**2 - 1.0)


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def scaling_identity_check(spec, rtol: float = 1e-12) -> dict:
    """Check that beta^(2/3)-scaled statistics share one affine map of the
    unnormalized largest eigenvalue across the two coupled ensembles.

    Each entry records both sides, their relative difference and whether it
    is within ``rtol``.
    """
    b1, b2 = spec.beta1, spec.beta2
    m, n = spec.m, spec.n
    rows = {}
    if isinstance(spec, HermiteCoupleSpec):
        # beta^(2/3) H_{n,beta} = (beta n)^(1/6) * lam_raw - 2 (beta n)^(2/3)
        rows["centering"] = (2 * (b1 * m) ** (2 / 3), 2 * (b2 * n) ** (2 / 3))
        rows["slope"] = (
            b1 ** (2 / 3) * m ** (2 / 3) / math.sqrt(b1 * m),
            b2 ** (2 / 3) * n ** (2 / 3) / math.sqrt(b2 * n),
        )
    elif isinstance(spec, LaguerreCoupleSpec):
        k, ku = spec.kappa, spec.kappa_upper
        pref1 = b1 ** (2 / 3) * math.sqrt(m * m * k / n) ** (1 / 3) * (math.sqrt(ku) + math.sqrt(m)) ** (2 / 3)
        pref2 = b2 ** (2 / 3) * math.sqrt(k * n) ** (1 / 3) * (math.sqrt(k) + math.sqrt(n)) ** (2 / 3)
        rows["prefactor"] = (pref1, pref2)
        rows["edge"] = (
            b1 * (math.sqrt(ku) + math.sqrt(m)) ** 2,
            b2 * (math.sqrt(k) + math.sqrt(n)) ** 2,
        )
        rows["slope"] = (
            pref1 / (b1 * (math.sqrt(ku) + math.sqrt(m)) ** 2),
            pref2 / (b2 * (math.sqrt(k) + math.sqrt(n)) ** 2),
        )
    else:
        raise ParameterError(f"unsupported spec type {type(spec).__name__}")
    out = {}
    for name, (lhs, rhs) in rows.items():
        err = _rel(lhs, rhs)
        out[name] = {"lhs": lhs, "rhs": rhs, "rel_err": err, "ok": err <= rtol}
    out["ok"] = all(v["ok"] for v in out.values())
    return out
