"""Replica-parallel Monte Carlo driver.

Replica ``r`` always draws from ``RngStream(seed, r)``, and results are
gathered in replica order, so output does not depend on the worker count.
Samplers are looked up by name so tasks pickle cleanly into worker
processes.
"""

from __future__ import annotations

import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import ensembles as ens
from . import lpp
from . import stochastic_operator as so
from .errors import ParameterError
from .rng import RngStream
from .stats import EmpiricalDistribution

__all__ = ["SAMPLERS", "Sampler", "run_replicas", "mc_run"]


@dataclass(frozen=True)
class Sampler:
    func: object
    columns: tuple[str, ...]


def _hermite(stream, n, beta):
    lam = ens.sample_hermite(n, beta, stream).lambda1()
    return lam, float(ens.scale_hermite(lam, n))


def _laguerre(stream, n, kappa, beta):
    lam = ens.sample_laguerre(n, kappa, beta, stream).lambda1()
    return lam, float(ens.scale_laguerre(lam, n, kappa))


def _couple_hermite(stream, m, n, beta1):
    pair = ens.sample_coupled_hermite(ens.HermiteCoupleSpec(m, n, beta1), stream)
    return pair.largest_pair()


def _couple_laguerre(stream, m, n, kappa, beta1):
    pair = ens.sample_coupled_laguerre(ens.LaguerreCoupleSpec(m, n, kappa, beta1), stream)
    hi, lo = pair.largest_pair()
    return hi, lo, float(pair.upper.diag[0] - pair.lower.diag[0])


def _hermite_independent(stream, m, n, beta1):
    """beta^(2/3)-scaled edge statistics of the two ensembles, drawn independently."""
    spec = ens.HermiteCoupleSpec(m, n, beta1)
    out = []
    for size, beta in ((m, spec.beta1), (n, spec.beta2)):
        lam = ens.sample_hermite(size, beta, stream).lambda1()
        out.append(beta ** (2 / 3) * float(ens.scale_hermite(lam, size)))
    return tuple(out)


def _laguerre_independent(stream, m, n, kappa, beta1):
    spec = ens.LaguerreCoupleSpec(m, n, kappa, beta1)
    out = []
    for size, k, beta in ((m, spec.kappa_upper, spec.beta1), (n, spec.kappa, spec.beta2)):
        lam = ens.sample_laguerre(size, k, beta, stream).lambda1()
        out.append(beta ** (2 / 3) * float(ens.scale_laguerre(lam, size, k)))
    return tuple(out)


def _tw(stream, k, beta, L, h):
    return (so.sample_tw(so.OperatorGrid(k, L, h), beta, stream),)


def _tw_couple(stream, k, beta1, beta2, p, L, h):
    return so.coupled_tw_pair(so.OperatorCouplingSpec(k, beta1, beta2, p), so.OperatorGrid(k, L, h), stream)


def _tw_independent(stream, k, beta1, beta2, alpha, L, h):
    grid = so.OperatorGrid(k, L, h)
    return so.sample_tw(grid, beta1, stream), alpha * so.sample_tw(grid, beta2, stream)


def _lpp(stream, model, n):
    return (lpp.sample_lpp(lpp.LppConfig(model, n), stream),)


# (lpp model, matrix n, kappa, beta, factor applied to the normalized lambda1)
IDENTITIES = {
    "johansson": lambda n: ("point_to_point", n, n, 2.0, 1.0),
    "flat": lambda n: ("point_to_line", 2 * n - 1, 2 * n, 1.0, 0.5),
    "baik": lambda n: ("symmetrized", n, n - 0.5, 4.0, 2.0),
}

# (dominating: n, kappa, beta, factor), (dominated: n, kappa, beta, factor)
COMPARISONS = {
    "stoch12": lambda n: ((2 * n - 1, 2 * n, 1.0, 0.5), (n, n, 2.0, 1.0)),
    "stoch24": lambda n: ((2 * n, 2 * n, 2.0, 0.5), (n, n - 0.5, 4.0, 1.0)),
}


def _identity(stream, which, n):
    model, size, kappa, beta, factor = IDENTITIES[which](n)
    g = lpp.sample_lpp(lpp.LppConfig(model, n), stream)
    lam = ens.sample_laguerre(size, kappa, beta, stream).lambda1()
    return g, factor * lam


def _comparison(stream, which, n):
    out = []
    for size, kappa, beta, factor in COMPARISONS[which](n):
        out.append(factor * ens.sample_laguerre(size, kappa, beta, stream).lambda1())
    return tuple(out)


SAMPLERS = {
    "hermite": Sampler(_hermite, ("lambda1", "scaled")),
    "laguerre": Sampler(_laguerre, ("lambda1", "scaled")),
    "couple_hermite": Sampler(_couple_hermite, ("upper", "lower")),
    "couple_laguerre": Sampler(_couple_laguerre, ("upper", "lower", "first_diag_gap")),
    "hermite_independent": Sampler(_hermite_independent, ("upper", "lower")),
    "laguerre_independent": Sampler(_laguerre_independent, ("upper", "lower")),
    "tw": Sampler(_tw, ("tw",)),
    "tw_couple": Sampler(_tw_couple, ("rescaled_beta1", "gamma_beta2")),
    "tw_independent": Sampler(_tw_independent, ("tw_beta1", "alpha_tw_beta2")),
    "lpp": Sampler(_lpp, ("passage_time",)),
    "identity": Sampler(_identity, ("lpp", "matrix")),
    "comparison": Sampler(_comparison, ("upper", "lower")),
}


def _run_block(sampler_id: str, params: dict, seed: int, start: int, stop: int) -> np.ndarray:
    sampler = SAMPLERS[sampler_id]
    out = np.empty((stop - start, len(sampler.columns)))
    for r in range(start, stop):
        try:
            out[r - start] = sampler.func(RngStream(seed, r), **params)
        except (ArithmeticError, ValueError) as exc:
            raise type(exc)(f"replica {r}: {exc}") from exc
    return out


def run_replicas(sampler_id: str, params: dict, reps: int, seed: int, workers: int = 1) -> np.ndarray:
    """Run ``reps`` replicas; row ``r`` of the result is replica ``r``."""
    if sampler_id not in SAMPLERS:
        raise ParameterError(f"unknown sampler {sampler_id!r}")
    if reps < 1:
        raise ParameterError(f"reps must be >= 1, got {reps}")
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    workers = min(workers, reps)
    if workers == 1:
        return _run_block(sampler_id, params, seed, 0, reps)
    chunk = math.ceil(reps / (4 * workers))
    bounds = [(s, min(s + chunk, reps)) for s in range(0, reps, chunk)]
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        futures = [pool.submit(_run_block, sampler_id, params, seed, a, b) for a, b in bounds]
        return np.concatenate([f.result() for f in futures])


def mc_run(sampler_id: str, params: dict, reps: int, seed: int, workers: int = 1, column: int = 0) -> EmpiricalDistribution:
    """Sorted sample of one output column across ``reps`` replicas."""
    values = run_replicas(sampler_id, params, reps, seed, workers)
    return EmpiricalDistribution.from_samples(values[:, column])
