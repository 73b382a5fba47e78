import math

import numpy as np
import pytest

from rmflab import concentration as cc
from rmflab import primes, rmf
from rmflab.prime_series import DivergenceError, truncated_variance
from rmflab.sequences import StepParams

PRIME_ZETA_4 = 0.07699313976425  # frozen 30-digit mpmath value


def test_hoeffding_values():
    assert cc.hoeffding_bound(1.0, 2.0) == pytest.approx(math.exp(-2.0))
    assert cc.hoeffding_bound(1.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        cc.hoeffding_bound(0.0, 1.0)
    with pytest.raises(ValueError):
        cc.hoeffding_bound(1.0, -1.0)


def test_hoeffding_against_random_walk():
    # 100-step +-1 walk, lambda = 20: bound exp(-400/200) = e^-2; the exact
    # event probability is the binomial tail P(at least 60 heads).
    exact = sum(math.comb(100, k) for k in range(60, 101)) / 2**100
    assert exact == pytest.approx(0.028444, abs=1e-6)
    assert exact <= cc.hoeffding_bound(100.0, 20.0)
    rng = np.random.default_rng(0)
    walks = rng.choice([-1.0, 1.0], size=(10**5, 100)).sum(axis=1)
    freq = float(np.mean(walks >= 20))
    assert freq == pytest.approx(exact, abs=3e-3)
    assert freq <= cc.hoeffding_bound(100.0, 20.0)


def test_mc_tail_trivial_threshold():
    r = cc.mc_tail(0.75, 10**4, -1e9, trials=200, base_seed=1)
    assert r.empirical_freq == 1.0
    assert r.bound == 1.0
    assert r.std_err == 0.0


def test_mc_tail_bound_formula():
    table = primes.cached_primes(10**4)
    r = cc.mc_tail(0.75, 10**4, 10.0, trials=200, base_seed=1, table=table)
    e_t = truncated_variance(0.75, table, 10**4)
    assert r.bound == pytest.approx(math.exp(-100.0 / (2.0 * e_t)), rel=1e-12)
    assert r.empirical_freq == 0.0


def test_mc_tail_validation():
    with pytest.raises(DivergenceError):
        cc.mc_tail(0.5, 100, 1.0, trials=200, base_seed=0)
    with pytest.raises(ValueError):
        cc.mc_tail(0.75, 100, 1.0, trials=10, base_seed=0)


def test_mc_tail_moderate_threshold_bound_holds():
    r = cc.mc_tail(0.6, 10**4, 1.0, trials=4000, base_seed=5)
    assert r.empirical_freq <= r.bound + 3.0 * r.std_err
    assert 0.0 < r.empirical_freq < 1.0


def test_sign_flip_symmetry():
    # Frequencies of {P >= lam} and {P <= -lam} agree within 4 joint std errors.
    table = primes.cached_primes(10**4)
    seeds = np.asarray([rmf.derive_seed(9, i) for i in range(6000)], dtype=np.uint64)
    values = rmf.random_prime_sum_batch(seeds, 0.6, 10**4, table=table)
    lam = 1.5
    up = float(np.mean(values >= lam))
    down = float(np.mean(values <= -lam))
    se = math.sqrt(up * (1 - up) / seeds.size) + math.sqrt(down * (1 - down) / seeds.size)
    assert abs(up - down) <= 4.0 * se


def test_borel_cantelli_step2():
    step = StepParams(1.0)
    r400 = cc.borel_cantelli_partial("step2", 400, gamma=1.0, step=step)
    closed_tail = (math.sqrt(400) + 0.5) * math.exp(-2 * math.sqrt(400))
    assert r400.tail_estimate == pytest.approx(closed_tail, rel=1e-10)
    assert r400.tail_estimate < 1e-10
    r800 = cc.borel_cantelli_partial("step2", 800, gamma=1.0, step=step)
    assert abs(r800.partial_sum - r400.partial_sum) <= r400.tail_estimate


def test_borel_cantelli_step2_cauchy_doubling():
    step = StepParams(0.5)  # delta 0.25, beta 0.375
    for terms in (50, 100, 200):
        a = cc.borel_cantelli_partial("step2", terms, gamma=0.5, step=step)
        b = cc.borel_cantelli_partial("step2", 2 * terms, gamma=0.5, step=step)
        assert abs(b.partial_sum - a.partial_sum) <= a.tail_estimate


def test_borel_cantelli_bigterm_first_value():
    r = cc.borel_cantelli_partial("bigterm", 200, step=StepParams(1.0), ell=1)
    assert r.partial_sum == pytest.approx(2.0 / (math.e - 2.0), rel=1e-12)
    assert r.closed_bound == pytest.approx(16.0 / math.e, rel=1e-12)
    assert r.closed_bound_holds
    assert r.ratio == pytest.approx(2.0 / math.e, rel=1e-12)


def test_borel_cantelli_bigterm_ratio_below_three_quarters():
    for delta in (0.25, 0.5, 0.9):
        step = StepParams.from_delta(delta)
        for ell in (1, 2, 5, 10, 100):
            r = cc.borel_cantelli_partial("bigterm", 300, step=step, ell=ell)
            assert r.ratio < 0.75
            assert r.closed_bound_holds
            assert 2.0 * (r.partial_sum + r.tail_estimate) <= r.closed_bound


def test_borel_cantelli_validation():
    step = StepParams(1.0)
    with pytest.raises(ValueError):
        cc.borel_cantelli_partial("step2", 0, gamma=1.0, step=step)
    with pytest.raises(ValueError):
        cc.borel_cantelli_partial("step2", 10, gamma=-1.0, step=step)
    with pytest.raises(ValueError):
        cc.borel_cantelli_partial("bigterm", 10, step=step, ell=0)
    with pytest.raises(ValueError):
        cc.borel_cantelli_partial("nope", 10, step=step)
    with pytest.raises(ValueError):
        cc.borel_cantelli_partial("step2", 10, gamma=1.0, step=None)


def test_three_series_check():
    r = cc.three_series_check(0.6)
    assert r.converges and r.variance is not None
    assert r.variance.estimate == pytest.approx(1.519768313, abs=1e-8)
    r5 = cc.three_series_check(0.5)
    assert not r5.converges and r5.variance is None
    r2 = cc.three_series_check(2.0)
    assert r2.converges and r2.variance.estimate == pytest.approx(PRIME_ZETA_4, abs=1e-9)
    with pytest.raises(ValueError):
        cc.three_series_check(0.0)


def test_step2_experiment_rows():
    step = StepParams(1.0)
    table = primes.cached_primes(10**5)
    rows = cc.step2_experiment(step, 1.0, range(1, 5), trials=2000, prime_limit=10**5,
                               base_seed=0, table=table)
    assert [r.ell for r in rows] == [1, 2, 3, 4]
    for r in rows:
        e_t = truncated_variance(r.sigma, table, 10**5)
        assert r.variance_trunc == pytest.approx(e_t, rel=1e-12)
        assert r.threshold == pytest.approx(math.sqrt(4.0 * e_t), rel=1e-12)
        assert r.hoeffding_bound == pytest.approx(math.exp(-2.0 * e_t), rel=1e-9)
        assert r.empirical_freq <= r.hoeffding_bound + 3.0 * r.std_err
        assert r.variance_deficit > 0
        assert r.asymptotic_surrogate == pytest.approx(
            math.exp(-2.0 * float(r.ell) ** 0.5), rel=1e-12
        )


def test_step2_experiment_validation():
    step = StepParams(1.0)
    with pytest.raises(ValueError):
        cc.step2_experiment(step, 1.0, range(1, 3), trials=0, prime_limit=100, base_seed=0)
    with pytest.raises(ValueError):
        cc.step2_experiment(step, 0.0, range(1, 3), trials=200, prime_limit=100, base_seed=0)
