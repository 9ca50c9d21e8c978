"""Empirical distributions and Kolmogorov-Smirnov style dominance tests.

``X`` stochastically dominates ``Y`` when ``F_X <= F_Y`` everywhere; the
one-sided statistic ``d_plus = sup_t (F_X(t) - F_Y(t))`` measures how badly a
pair of samples violates that.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special

from .errors import ParameterError

__all__ = [
    "EmpiricalDistribution",
    "DominanceReport",
    "ecdf_eval",
    "one_sided_ks",
    "two_sample_ks",
    "one_sample_ks",
    "one_sided_critical_value",
    "pathwise_report",
    "distributional_report",
    "MIN_VERDICT_SIZE",
]

MIN_VERDICT_SIZE = 1000
DEFAULT_ALPHA_LEVEL = 1e-3


@dataclass(frozen=True)
class EmpiricalDistribution:
    samples: np.ndarray
    count: int

    @classmethod
    def from_samples(cls, values) -> "EmpiricalDistribution":
        x = np.sort(np.asarray(values, dtype=float).ravel())
        if x.size == 0:
            raise ParameterError("empirical distribution needs at least one sample")
        if np.isnan(x).any():
            raise ParameterError("samples contain NaN")
        return cls(x, int(x.size))

    def __len__(self):
        return self.count

    def cdf(self, t):
        """Fraction of samples <= t (right-continuous)."""
        return np.searchsorted(self.samples, t, side="right") / self.count

    def map(self, scale: float = 1.0, shift: float = 0.0) -> "EmpiricalDistribution":
        return EmpiricalDistribution.from_samples(scale * self.samples + shift)

    def mean(self) -> float:
        return float(self.samples.mean())


def _as_empirical(x) -> EmpiricalDistribution:
    if isinstance(x, EmpiricalDistribution):
        return x
    return EmpiricalDistribution.from_samples(x)


def ecdf_eval(E, t):
    E = _as_empirical(E)
    out = E.cdf(t)
    return float(out) if np.ndim(out) == 0 else out


def _pooled_diff(X: EmpiricalDistribution, Y: EmpiricalDistribution) -> np.ndarray:
    pooled = np.concatenate([X.samples, Y.samples])
    return X.cdf(pooled) - Y.cdf(pooled)


def one_sided_ks(X, Y) -> tuple[float, float]:
    """``(d_plus, p)`` for the hypothesis that ``X`` dominates ``Y``.

    ``p = exp(-2 d_plus^2 nm/(n+m))`` is the asymptotic one-sided bound.
    """
    X, Y = _as_empirical(X), _as_empirical(Y)
    d_plus = max(float(_pooled_diff(X, Y).max()), 0.0)
    en = X.count * Y.count / (X.count + Y.count)
    return d_plus, math.exp(-2.0 * d_plus**2 * en)


def two_sample_ks(X, Y) -> tuple[float, float]:
    """``(d, p)`` with ``d = sup |F_X - F_Y|`` and the asymptotic Kolmogorov p-value."""
    X, Y = _as_empirical(X), _as_empirical(Y)
    d = float(np.abs(_pooled_diff(X, Y)).max())
    en = X.count * Y.count / (X.count + Y.count)
    return d, float(special.kolmogorov(math.sqrt(en) * d))


def one_sample_ks(X, cdf) -> tuple[float, float]:
    """``(d, p)`` of a sample against a continuous reference ``cdf``."""
    X = _as_empirical(X)
    n = X.count
    F = np.asarray(cdf(X.samples), dtype=float)
    i = np.arange(1, n + 1)
    d = float(max((i / n - F).max(), (F - (i - 1) / n).max()))
    return d, float(special.kolmogorov(math.sqrt(n) * d))


def one_sided_critical_value(alpha_level: float, n: int, m: int) -> float:
    """``d_plus`` above which dominance is rejected at ``alpha_level``."""
    if not 0 < alpha_level < 1:
        raise ParameterError("alpha_level must lie in (0, 1)")
    return math.sqrt(-math.log(alpha_level) / 2.0) * math.sqrt((n + m) / (n * m))


@dataclass(frozen=True)
class DominanceReport:
    d_plus: float
    p_value_one_sided: float
    pathwise_violations: int
    n_pairs: int
    verdict: str
    critical_value: float | None = None

    def as_dict(self):
        return asdict(self)


def pathwise_report(pairs, tol: float = 0.0) -> DominanceReport:
    """Count pairs ``(hi, lo)`` with ``hi < lo - tol``; pass iff there are none.

    The one-sided KS fields describe the two marginals for reference and do
    not enter the verdict.
    """
    if tol < 0:
        raise ParameterError("tol must be >= 0")
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    hi, lo = arr[:, 0], arr[:, 1]
    violations = int(np.count_nonzero(hi < lo - tol))
    if arr.shape[0]:
        d_plus, p = one_sided_ks(hi, lo)
    else:
        d_plus, p = 0.0, 1.0
    return DominanceReport(
        d_plus, p, violations, int(arr.shape[0]), "pass" if violations == 0 else "fail"
    )


def distributional_report(X, Y, alpha_level: float = DEFAULT_ALPHA_LEVEL) -> DominanceReport:
    """One-sided KS verdict on independent samples for ``X`` dominating ``Y``."""
    X, Y = _as_empirical(X), _as_empirical(Y)
    if min(X.count, Y.count) < MIN_VERDICT_SIZE:
        raise ParameterError(
            f"verdicts need at least {MIN_VERDICT_SIZE} samples per side, "
            f"got {X.count} and {Y.count}"
        )
    d_plus, p = one_sided_ks(X, Y)
    crit = one_sided_critical_value(alpha_level, X.count, Y.count)
    return DominanceReport(d_plus, p, 0, 0, "pass" if d_plus < crit else "fail", crit)
