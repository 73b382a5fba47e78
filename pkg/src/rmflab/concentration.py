"""Tail bounds and Monte Carlo concentration experiments.

Hoeffding's inequality for +-1-weighted sums, empirical tail-frequency
estimation with per-trial seeds derived from a base seed, partial sums of
the summable bound series that feed Borel-Cantelli, and the reduced
Kolmogorov three-series predicate for bounded terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, log, sqrt
from typing import Sequence

import mpmath as mp
import numpy as np

from . import primes as primes_mod
from . import prime_series
from . import rmf as rmf_mod
from .prime_series import CertifiedValue
from .primes import PrimeTable
from .sequences import StepParams, step_sigma_ell


def hoeffding_bound(sum_sq_coeffs: float, lam: float) -> float:
    """One-sided bound exp(-lam^2 / (2 sum a_p^2)) for P(sum a_p eps_p >= lam)
    with independent symmetric +-1 signs; double it for the two-sided event."""
    if not sum_sq_coeffs > 0:
        raise ValueError(f"sum of squared coefficients must be positive, got {sum_sq_coeffs}")
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    return exp(-(lam * lam) / (2.0 * sum_sq_coeffs))


@dataclass(frozen=True)
class TailExperiment:
    trials: int
    threshold: float
    empirical_freq: float
    std_err: float
    bound: float

    def __post_init__(self):
        if not 0.0 <= self.empirical_freq <= 1.0:
            raise ValueError("frequency must lie in [0, 1]")


def mc_tail(
    sigma: float,
    prime_limit: int,
    threshold: float,
    trials: int,
    base_seed: int,
    table: PrimeTable | None = None,
) -> TailExperiment:
    """Empirical frequency of {sum_{p<=prime_limit} sign(p) p^(-sigma) >= threshold}
    over `trials` independently seeded assignments, against the Hoeffding bound
    with sum_sq = the truncated sum of p^(-2 sigma).

    A nonpositive threshold gets the trivial bound 1.
    """
    if sigma <= 0.5:
        raise prime_series.DivergenceError(f"tail experiment requires sigma > 1/2, got {sigma}")
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    if table is None:
        table = primes_mod.cached_primes(prime_limit)
    seeds = np.asarray([rmf_mod.derive_seed(base_seed, i) for i in range(trials)], dtype=np.uint64)
    values = rmf_mod.random_prime_sum_batch(seeds, sigma, prime_limit, table=table)
    freq = float(np.mean(values >= threshold))
    sum_sq = prime_series.truncated_variance(sigma, table, prime_limit)
    bound = 1.0 if threshold <= 0 else hoeffding_bound(sum_sq, threshold)
    return TailExperiment(
        trials=trials,
        threshold=threshold,
        empirical_freq=freq,
        std_err=sqrt(freq * (1.0 - freq) / trials),
        bound=bound,
    )


@dataclass(frozen=True)
class BorelCantelliPartial:
    partial_sum: float
    tail_estimate: float
    terms: int
    closed_bound: float | None = None
    closed_bound_holds: bool | None = None
    ratio: float | None = None


def borel_cantelli_partial(
    series: str,
    terms: int,
    *,
    gamma: float | None = None,
    step: StepParams | None = None,
    ell: int | None = None,
    c1: float = 4.0,
) -> BorelCantelliPartial:
    """Partial sum plus tail estimate for the two summable bound series.

    series="step2": terms exp(-(1+gamma) l^((1-delta) epsilon)) over l = 1..terms,
    tail bounded by the integral of exp(-(1+gamma) t^beta) from `terms` on
    (incomplete gamma closed form).

    series="bigterm": terms q^r with q = exp(-ell^(2 delta) + log 2) over
    r = 1..terms (geometric; the lambda_r schedule makes c1 cancel).  Also
    evaluates the closed bound 16 exp(-ell^(2 delta)) for 2x the full sum,
    which reduces to the ratio condition q < 3/4.
    """
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    if step is None:
        raise ValueError("step parameters are required")
    if series == "step2":
        if gamma is None or gamma <= 0:
            raise ValueError("step2 series needs gamma > 0")
        import math

        a = 1.0 + gamma
        beta = (1.0 - step.delta) * step.epsilon
        ell_grid = np.arange(1, terms + 1, dtype=np.float64)
        # fsum keeps the partial sums exactly Cauchy against the tail estimate.
        partial = math.fsum(np.exp(-a * ell_grid**beta))
        # Integral tail: (1/(beta a^(1/beta))) Gamma(1/beta, a * terms^beta).
        inv_beta = 1.0 / beta
        upper_gamma = mp.gammainc(inv_beta, a * mp.mpf(terms) ** beta, mp.inf)
        tail = float(upper_gamma / (beta * mp.mpf(a) ** inv_beta))
        return BorelCantelliPartial(partial_sum=partial, tail_estimate=tail, terms=terms)
    if series == "bigterm":
        if ell is None or ell < 1:
            raise ValueError("bigterm series needs ell >= 1")
        if c1 <= 0:
            raise ValueError("C1 must be positive")
        import math

        x = float(ell) ** (2.0 * step.delta)
        log_q = -x + log(2.0)
        q = exp(log_q)
        r = np.arange(1, terms + 1, dtype=np.float64)
        partial = math.fsum(np.exp(log_q * r))
        tail = 0.0 if q == 0.0 else q ** (terms + 1) / (1.0 - q)
        closed = 16.0 * exp(-x)
        # 2 * q/(1-q) <= 8 q = 16 e^-x  <=>  q <= 3/4; compare in log space.
        holds = log_q <= log(0.75) and 2.0 * (partial + tail) <= closed
        return BorelCantelliPartial(
            partial_sum=partial,
            tail_estimate=tail,
            terms=terms,
            closed_bound=closed,
            closed_bound_holds=bool(holds),
            ratio=q,
        )
    raise ValueError(f"unknown series {series!r}")


@dataclass(frozen=True)
class ThreeSeriesResult:
    converges: bool
    variance: CertifiedValue | None


def three_series_check(sigma: float) -> ThreeSeriesResult:
    """Almost-sure convergence predicate for sum_p sign(p) p^(-sigma).

    For bounded +-1 terms the three-series criterion reduces to finiteness
    of the variance sum; that holds exactly on sigma > 1/2.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if sigma <= 0.5:
        return ThreeSeriesResult(converges=False, variance=None)
    return ThreeSeriesResult(converges=True, variance=prime_series.variance_sum(sigma))


@dataclass(frozen=True)
class Step2Row:
    ell: int
    sigma: float
    variance_trunc: float
    variance_deficit: float
    threshold: float
    empirical_freq: float
    std_err: float
    hoeffding_bound: float
    asymptotic_surrogate: float


def step2_experiment(
    step: StepParams,
    gamma: float,
    ell_range: Sequence[int],
    trials: int,
    prime_limit: int,
    base_seed: int,
    table: PrimeTable | None = None,
) -> list[Step2Row]:
    """Exceedance table for the normalized truncated prime sums at sigma_ell.

    Per row: the trigger threshold sqrt(2 (1+gamma) E^epsilon) with E the
    truncated variance, the Monte Carlo exceedance frequency of the
    normalized sum, the matching Hoeffding bound exp(-(1+gamma) E^epsilon),
    and the asymptotic surrogate exp(-(1+gamma) ell^((1-delta) epsilon)).
    The deficit of E against the full variance sum is reported per row.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    if table is None:
        table = primes_mod.cached_primes(prime_limit)
    seeds = np.asarray([rmf_mod.derive_seed(base_seed, i) for i in range(trials)], dtype=np.uint64)
    rows = []
    for ell in ell_range:
        sig = step_sigma_ell(ell, step)
        e_trunc = prime_series.truncated_variance(sig.sigma, table, prime_limit)
        e_full = prime_series.variance_sum(sig.sigma).estimate
        tau = sqrt(2.0 * (1.0 + gamma) * e_trunc**step.epsilon)
        lam = tau * sqrt(e_trunc)  # raw threshold realizing the normalized event
        values = rmf_mod.random_prime_sum_batch(seeds, sig.sigma, prime_limit, table=table)
        freq = float(np.mean(values >= lam))
        rows.append(
            Step2Row(
                ell=int(ell),
                sigma=sig.sigma,
                variance_trunc=e_trunc,
                variance_deficit=e_full - e_trunc,
                threshold=tau,
                empirical_freq=freq,
                std_err=sqrt(freq * (1.0 - freq) / trials),
                hoeffding_bound=hoeffding_bound(e_trunc, lam),
                asymptotic_surrogate=exp(
                    -(1.0 + gamma) * float(ell) ** ((1.0 - step.delta) * step.epsilon)
                ),
            )
        )
    return rows
