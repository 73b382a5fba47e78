"""Dyadic decomposition machinery: nested grids D_r, the deterministic
oscillation bound |f(s) - f(t)| <= 2 sum_{r > R} lambda_r, the lambda_r^2 =
2 C1 r / 4^r schedule with its chaining constant, and the empirical
oscillation experiment max |P(sigma) - P(sigma_ell)| over [sigma_ell,
sigma_{ell-1}].
"""

from __future__ import annotations

from dataclasses import dataclass
from math import frexp, ldexp, sqrt
from typing import Callable, Sequence

import numpy as np

from . import primes as primes_mod
from . import prime_series
from . import rmf as rmf_mod
from .primes import PrimeTable
from .sequences import StepParams, step_sigma_ell


@dataclass(frozen=True)
class DyadicGrid:
    """Equidistant points tau_r(n) = a + (n/2^r)(b - a), n = 0..2^r.

    The n/2^r fractions are exact dyadic floats, so the refinement identity
    tau_{r+1}(2n) == tau_r(n) holds exactly in evaluation.
    """

    a: float
    b: float
    r: int
    points: np.ndarray

    def __post_init__(self):
        self.points.flags.writeable = False


def dyadic_grid(a: float, b: float, r: int) -> DyadicGrid:
    if a >= b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if not 0 <= r <= 30:
        raise ValueError(f"r must lie in [0, 30], got {r}")
    frac = np.arange(2**r + 1, dtype=np.float64) / (2.0**r)
    points = a + frac * (b - a)
    points[-1] = b  # endpoint exact; interior points keep the dyadic form
    return DyadicGrid(a=a, b=b, r=r, points=points)


def chaining_R(a: float, b: float, s: float, t: float) -> int:
    """The unique integer R with (b-a)/2^(R+1) < |s-t| <= (b-a)/2^R."""
    if s == t:
        raise ValueError("R is undefined for s == t (zero distance)")
    d = abs(s - t)
    width = b - a
    if width <= 0 or d > width:
        raise ValueError("s, t must be distinct points of [a, b]")
    mantissa, exponent = frexp(width / d)  # width/d = mantissa * 2^exponent
    r = exponent - 1
    # One corrective step absorbs the division rounding.
    while d > ldexp(width, -r):
        r -= 1
    while r + 1 >= 1 and d <= ldexp(width, -(r + 1)):
        r += 1
    return r


@dataclass(frozen=True)
class LambdaSchedule:
    """Per-level oscillation allowance lambda_r with lambda_r^2 = 2 C1 r / 4^r."""

    c1: float = 4.0

    def __post_init__(self):
        if not self.c1 > 0:
            raise ValueError(f"C1 must be positive, got {self.c1}")

    def __call__(self, r: int) -> float:
        return sqrt(2.0 * self.c1 * r) / 2.0**r

    def chaining_constant(self, rel_tol: float = 1e-15) -> float:
        """2 sum_{r>=1} lambda_r = 2 sqrt(2 C1) sum sqrt(r)/2^r."""
        return chaining_tail_sum(self, 0, rel_tol=rel_tol)


def chaining_tail_sum(
    lam: Callable[[int], float], r_from_exclusive: int, rel_tol: float = 1e-15
) -> float:
    """2 * sum_{r > r_from_exclusive} lambda_r, truncated when terms fall
    below rel_tol of the running sum."""
    total = 0.0
    r = r_from_exclusive + 1
    while r < r_from_exclusive + 20000:
        term = lam(r)
        if term < 0:
            raise ValueError(f"schedule must be nonnegative, lambda({r}) = {term}")
        total += term
        if term <= rel_tol * total:
            break
        r += 1
    return 2.0 * total


def chaining_bound(
    lam: Callable[[int], float],
    a: float,
    b: float,
    s: float,
    t: float,
    rel_tol: float = 1e-15,
) -> float:
    """The oscillation bound 2 sum_{r > R} lambda_r for the pair (s, t)."""
    if s == t:
        return 0.0
    return chaining_tail_sum(lam, chaining_R(a, b, s, t), rel_tol=rel_tol)


@dataclass(frozen=True)
class ChainingReport:
    hypothesis_holds: bool
    conclusion_holds: bool
    first_hypothesis_violation_r: int | None
    max_conclusion_excess: float


def verify_chaining(
    values: np.ndarray,
    a: float,
    b: float,
    lambdas: Sequence[float],
    extend_geometric: bool = True,
) -> ChainingReport:
    """Finite instantiation of the dyadic oscillation bound.

    `values` are f on the depth-r_max grid over [a, b] (length 2^r_max + 1);
    `lambdas[r-1]` is the allowance at level r.  The hypothesis is checked at
    every level; the conclusion |f(s)-f(t)| <= 2 sum_{r>R} lambda_r is checked
    for every pair of grid points.  Beyond r_max the schedule is extended
    geometrically (lambda_{r_max} / 2^(r - r_max)), which is exact for
    functions affine on each finest cell.
    """
    values = np.asarray(values, dtype=np.float64)
    r_max = len(lambdas)
    if values.size != 2**r_max + 1:
        raise ValueError(f"need 2^{r_max}+1 values, got {values.size}")
    lambdas = np.asarray(lambdas, dtype=np.float64)

    hypothesis_holds = True
    first_violation = None
    for r in range(1, r_max + 1):
        level = values[:: 2 ** (r_max - r)]
        inc = float(np.max(np.abs(np.diff(level)))) if level.size > 1 else 0.0
        if inc > lambdas[r - 1]:
            hypothesis_holds = False
            if first_violation is None:
                first_violation = r
            break

    # suffix[i] = sum of lambda over levels i+1 .. r_max, so the finite part
    # of bound(R) = 2 * (lambda_{R+1} + .. + lambda_{r_max}) is 2 * suffix[R].
    suffix = np.zeros(r_max + 1)
    suffix[:-1] = np.cumsum(lambdas[::-1])[::-1]
    ext_base = 2.0 * float(lambdas[-1]) if extend_geometric else 0.0

    width = b - a
    n = values.size
    di, dj = np.triu_indices(n, k=1)
    grid = dyadic_grid(a, b, r_max).points
    dist = np.abs(grid[dj] - grid[di])
    q = width / dist
    mant, expo = np.frexp(q)
    big_r = expo - 1
    over = dist > np.ldexp(width, -big_r)
    big_r[over] -= 1
    under = dist <= np.ldexp(width, -(big_r + 1))
    big_r[under] += 1

    diffs = np.abs(values[dj] - values[di])
    inner = 2.0 * suffix[np.minimum(big_r, r_max)]
    ext = ext_base * np.where(big_r >= r_max, 2.0 ** (r_max - big_r.astype(np.float64)), 1.0)
    bounds = inner + ext
    excess = float(np.max(diffs - bounds)) if diffs.size else 0.0
    return ChainingReport(
        hypothesis_holds=hypothesis_holds,
        conclusion_holds=bool(excess <= 0.0),
        first_hypothesis_violation_r=first_violation,
        max_conclusion_excess=excess,
    )


@dataclass(frozen=True)
class OscillationResult:
    seed: int
    ell: int
    sigma_ell: float
    sigma_prev: float
    max_osc: float
    paper_c: float
    first_violation_r: int | None
    truncation_std: float
    limit: int
    r_max: int


def oscillation_experiment(
    signs: rmf_mod.SignAssignment,
    ell: int,
    step: StepParams,
    r_max: int = 12,
    limit: int | None = None,
    schedule: LambdaSchedule = LambdaSchedule(c1=4.0),
) -> OscillationResult:
    """max over the depth-r_max dyadic grid of |P(sigma) - P(sigma_ell)| with
    P truncated at `limit` primes, against the schedule's chaining constant."""
    if limit is None:
        limit = signs.prime_limit
    ps, sg = signs.up_to(limit)
    return _oscillation_core(sg.reshape(1, -1), [signs.seed], ps, ell, step, r_max, limit, schedule)[0]


def oscillation_batch(
    seeds: Sequence[int],
    ell: int,
    step: StepParams,
    r_max: int = 12,
    limit: int = 10**6,
    table: PrimeTable | None = None,
    schedule: LambdaSchedule = LambdaSchedule(c1=4.0),
) -> list[OscillationResult]:
    """Oscillation experiment for many seeds sharing one grid evaluation."""
    if table is None:
        table = primes_mod.cached_primes(limit)
    ps = table.upto(limit)
    rows = rmf_mod.sign_matrix(np.asarray(seeds, dtype=np.uint64), ps)
    return _oscillation_core(rows, list(seeds), ps, ell, step, r_max, limit, schedule)


def _oscillation_core(
    sign_rows: np.ndarray,
    seeds: list[int],
    ps: np.ndarray,
    ell: int,
    step: StepParams,
    r_max: int,
    limit: int,
    schedule: LambdaSchedule,
    chunk: int = 256,
) -> list[OscillationResult]:
    if ell < 2:
        raise ValueError(f"ell must be >= 2, got {ell}")
    if not 1 <= r_max <= 30:
        raise ValueError(f"r_max must lie in [1, 30], got {r_max}")
    s_ell = step_sigma_ell(ell, step).sigma
    s_prev = step_sigma_ell(ell - 1, step).sigma

    p = ps.astype(np.float64)
    logp = np.log(p)
    base = p ** (-s_ell)
    weights = (sign_rows.astype(np.float64) * base).T  # (P, n_seeds)

    n_grid = 2**r_max + 1
    frac = np.arange(n_grid, dtype=np.float64) / (2.0**r_max)
    dsig = frac * (s_prev - s_ell)
    p_vals = np.empty((n_grid, weights.shape[1]))
    for start in range(0, n_grid, chunk):
        block = dsig[start : start + chunk]
        p_vals[start : start + block.size] = np.exp(-np.outer(block, logp)) @ weights

    osc = np.abs(p_vals - p_vals[0])
    max_osc = osc.max(axis=0)

    lambdas = np.array([schedule(r) for r in range(1, r_max + 1)])
    first_violation: list[int | None] = [None] * len(seeds)
    for r in range(1, r_max + 1):
        level = p_vals[:: 2 ** (r_max - r)]
        inc = np.max(np.abs(np.diff(level, axis=0)), axis=0)
        for j in np.flatnonzero(inc > lambdas[r - 1]):
            if first_violation[j] is None:
                first_violation[j] = r

    paper_c = schedule.chaining_constant()
    if s_ell > 0.5:
        tail_var = prime_series.prime_power_tail_bound(2.0 * s_ell, limit, pi_cut=ps.size)
        trunc_std = sqrt(tail_var)
    else:
        trunc_std = float("inf")  # sigma underflowed to the divergence boundary
    return [
        OscillationResult(
            seed=seeds[j],
            ell=ell,
            sigma_ell=s_ell,
            sigma_prev=s_prev,
            max_osc=float(max_osc[j]),
            paper_c=paper_c,
            first_violation_r=first_violation[j],
            truncation_std=trunc_std,
            limit=limit,
            r_max=r_max,
        )
        for j in range(len(seeds))
    ]
