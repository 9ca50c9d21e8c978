"""Seeded random streams and the distribution primitives the samplers use.

Every stream is identified by ``(seed, stream_id)``. The bits come from a
Philox counter-based generator keyed through :class:`numpy.random.SeedSequence`
with ``stream_id`` as the spawn key, so replica ``r`` of a Monte Carlo run can
be regenerated alone without replaying replicas ``0..r-1``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import NumericalError, ParameterError

__all__ = [
    "RngStream",
    "normal",
    "gamma",
    "chi",
    "chi_cdf",
    "chi_quantile",
    "coupled_chi",
    "exponential",
    "uniform_open",
]

_QUANTILE_MAX_ITER = 200
_QUANTILE_RTOL = 1e-10


class RngStream:
    """A single-owner random source for one replica.

    Parameters
    ----------
    seed : int
        64-bit master seed shared by all replicas of a run.
    stream_id : int
        Replica index. Distinct ids give statistically independent streams.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if stream_id < 0:
            raise ParameterError(f"stream_id must be non-negative, got {stream_id}")
        self.seed = int(seed) & 0xFFFF_FFFF_FFFF_FFFF
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def normal(stream: RngStream, mean=0.0, variance=1.0, size=None):
    """Draw from N(mean, variance)."""
    if variance < 0:
        raise ParameterError(f"variance must be >= 0, got {variance}")
    if variance == 0:
        # Still consume the draws so replay order does not depend on variance.
        z = stream.generator.standard_normal(size)
        return np.full_like(z, mean, dtype=float) if size is not None else float(mean)
    return stream.generator.normal(mean, math.sqrt(variance), size)


def gamma(stream: RngStream, shape, scale=1.0, size=None):
    """Draw from Gamma(shape, scale); any positive shape, including shape < 1."""
    shape = np.asarray(shape, dtype=float)
    if np.any(shape <= 0) or scale <= 0:
        raise ParameterError("gamma shape and scale must be positive")
    if size is None and shape.ndim == 0:
        return float(stream.generator.gamma(float(shape), scale))
    return stream.generator.gamma(shape, scale, size)


def chi(stream: RngStream, dof, size=None):
    """Draw from the chi distribution with ``dof`` degrees of freedom."""
    dof = np.asarray(dof, dtype=float)
    if np.any(dof <= 0):
        raise ParameterError("chi degrees of freedom must be positive")
    return np.sqrt(gamma(stream, dof / 2.0, 2.0, size))


def exponential(stream: RngStream, rate=1.0, size=None):
    """Draw from Exp(rate)."""
    if rate <= 0:
        raise ParameterError(f"rate must be positive, got {rate}")
    return stream.generator.exponential(1.0 / rate, size)


def uniform_open(stream: RngStream, size=None):
    """Uniform draws on the open interval (0, 1); zeros are redrawn."""
    g = stream.generator
    if size is None:
        u = g.random()
        while u == 0.0:
            u = g.random()
        return u
    u = g.random(size)
    bad = u == 0.0
    while np.any(bad):
        u[bad] = g.random(int(bad.sum()))
        bad = u == 0.0
    return u


def chi_cdf(x, dof):
    """P(chi_dof <= x)."""
    x = np.asarray(x, dtype=float)
    return special.gammainc(np.asarray(dof, dtype=float) / 2.0, np.maximum(x, 0.0) ** 2 / 2.0)


def _initial_guess(a, u):
    # Small-y series for the lower tail, Wilson-Hilferty elsewhere.
    small = math.exp((math.log(u) + math.lgamma(a + 1.0)) / a) if u > 0 else 0.0
    z = float(special.ndtri(u))
    wh = a * (1.0 - 1.0 / (9.0 * a) + z / (3.0 * math.sqrt(a))) ** 3
    return small if (wh <= 0 or small < 0.5 * a) else wh


def _gamma_quantile(a: float, u: float) -> float:
    """Solve P(a, y) = u for y by safeguarded Newton on a shrinking bracket."""
    y = max(_initial_guess(a, u), 1e-300)
    lo, hi = 0.0, math.inf
    log_norm = math.lgamma(a)
    for _ in range(_QUANTILE_MAX_ITER):
        f = float(special.gammainc(a, y)) - u
        if f == 0.0:
            return y
        if f < 0:
            lo = y
        else:
            hi = y
        log_dens = (a - 1.0) * math.log(y) - y - log_norm
        cand = y - f * math.exp(-log_dens) if log_dens > -700 else math.nan
        if not (lo < cand < hi):
            if math.isinf(hi):
                cand = 2.0 * y
            elif lo > 0:
                cand = math.sqrt(lo * hi)
            else:
                cand = 0.5 * hi
        if cand <= 0.0:
            # Quantile below the smallest positive double.
            return 0.0
        if abs(cand - y) <= 1e-15 * y or (hi - lo) <= 1e-15 * lo:
            return cand
        y = cand
    raise NumericalError(
        f"chi quantile inversion did not converge in {_QUANTILE_MAX_ITER} "
        f"iterations (shape={a}, u={u})"
    )


def chi_quantile(u, dof):
    """Inverse CDF of the chi distribution.

    Inverts the regularized lower incomplete gamma function with bracketed
    Newton steps (bisection when a step leaves the bracket). The map is
    deterministic and nondecreasing in ``dof`` for fixed ``u``, which is what
    makes it usable for monotone couplings. Accepts scalars or arrays.
    """
    if isinstance(u, float) and isinstance(dof, (float, int)):
        if not 0.0 < u < 1.0:
            raise ParameterError("quantile level must lie in the open interval (0, 1)")
        if dof <= 0:
            raise ParameterError("chi degrees of freedom must be positive")
        return math.sqrt(2.0 * _gamma_quantile(dof / 2.0, u))
    u_arr, dof_arr = np.broadcast_arrays(
        np.asarray(u, dtype=float), np.asarray(dof, dtype=float)
    )
    us, ks = u_arr.ravel().tolist(), dof_arr.ravel().tolist()
    if not all(0.0 < x < 1.0 for x in us):
        raise ParameterError("quantile level must lie in the open interval (0, 1)")
    if not all(k > 0 for k in ks):
        raise ParameterError("chi degrees of freedom must be positive")
    out = np.array([math.sqrt(2.0 * _gamma_quantile(k / 2.0, x)) for x, k in zip(us, ks)])
    if u_arr.ndim == 0:
        return float(out[0])
    return out.reshape(u_arr.shape)


def coupled_chi(stream: RngStream, dof_hi, dof_lo):
    """Quantile coupling of two chi variables through one shared uniform.

    Returns ``(chi_quantile(u, dof_hi), chi_quantile(u, dof_lo))``; the first
    component dominates the second on every draw. Array dofs couple
    elementwise with one uniform per pair.
    """
    if isinstance(dof_hi, (float, int)) and isinstance(dof_lo, (float, int)):
        if dof_lo <= 0:
            raise ParameterError("chi degrees of freedom must be positive")
        if dof_hi < dof_lo:
            raise ParameterError("coupled_chi needs dof_hi >= dof_lo")
        u = uniform_open(stream)
        return chi_quantile(u, float(dof_hi)), chi_quantile(u, float(dof_lo))
    hi, lo = np.broadcast_arrays(np.asarray(dof_hi, float), np.asarray(dof_lo, float))
    if np.any(lo <= 0):
        raise ParameterError("chi degrees of freedom must be positive")
    if np.any(hi < lo):
        raise ParameterError("coupled_chi needs dof_hi >= dof_lo")
    if hi.ndim == 0:
        u = uniform_open(stream)
        return chi_quantile(u, float(hi)), chi_quantile(u, float(lo))
    u = uniform_open(stream, hi.shape)
    return chi_quantile(u, hi), chi_quantile(u, lo)
