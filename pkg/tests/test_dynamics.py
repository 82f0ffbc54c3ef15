import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from doublehelix.dynamics import (
    ConvergenceClass,
    DynamicsConfig,
    approx_fraction,
    classify,
    iterate,
    limit_of,
    maturity_epoch,
    min_mutation_rate,
    old_age_epoch,
    recurrence_step,
    simulate_flip_fraction,
)

probs = st.floats(0.0, 1.0, allow_nan=False)


def exact_sequence(p, p0, k):
    """Hand iteration in rational arithmetic, independent of ``iterate``."""
    p, cur = Fraction(p), Fraction(p0)
    out = [cur]
    for _ in range(k):
        cur = cur * (1 - 2 * p) + p
        out.append(cur)
    return out


@pytest.mark.parametrize(
    "p_k, p, expected",
    [(0.3, 1.0, 0.7), (0.2, 0.5, 0.5), (0.0, 0.0, 0.0)],
)
def test_recurrence_step_examples(p_k, p, expected):
    assert recurrence_step(p_k, p) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("args", [(-0.1, 0.2), (0.2, 1.01), (1.5, 0.5)])
def test_recurrence_step_rejects_out_of_range(args):
    with pytest.raises(ValueError):
        recurrence_step(*args)


def test_iterate_matches_hand_iteration():
    traj = iterate(DynamicsConfig(0.1), 3)
    assert traj.values[1:] == pytest.approx([0.1, 0.18, 0.244], abs=1e-15)
    oracle = [float(v) for v in exact_sequence(0.1, 0, 50)]
    assert iterate(DynamicsConfig(0.1), 50).values == pytest.approx(oracle, abs=1e-13)


def test_iterate_limiting_cases():
    assert list(iterate(DynamicsConfig(1.0), 5).values) == [0, 1, 0, 1, 0, 1]
    assert list(iterate(DynamicsConfig(0.0), 5).values) == [0] * 6
    assert list(iterate(DynamicsConfig(0.0, p0=0.7), 3).values) == [0.7] * 4


def test_iterate_rejects_negative_epochs():
    with pytest.raises(ValueError):
        iterate(DynamicsConfig(0.1), -1)


@pytest.mark.parametrize("p, p0", [(-0.1, 0.0), (0.5, 2.0)])
def test_config_bounds(p, p0):
    with pytest.raises(ValueError):
        DynamicsConfig(p, p0)


def test_limit_of_examples():
    assert limit_of(DynamicsConfig(0.03)) == 0.5
    assert limit_of(DynamicsConfig(0.0)) == 0.0
    assert limit_of(DynamicsConfig(1.0)) is None
    assert limit_of(DynamicsConfig(1.0, p0=0.5)) == 0.5


@pytest.mark.parametrize(
    "p, kind",
    [
        (0.0, ConvergenceClass.CONSTANT),
        (0.25, ConvergenceClass.MONOTONE_TO_HALF),
        (0.5, ConvergenceClass.CONSTANT_AT_HALF),
        (0.75, ConvergenceClass.OSCILLATORY_TO_HALF),
        (1.0, ConvergenceClass.PERIOD_TWO),
    ],
)
def test_classify_examples(p, kind):
    assert classify(DynamicsConfig(p)) == kind


@pytest.mark.parametrize("p", [0.0, 0.001, 0.1, 0.25, 0.4999, 0.5, 0.5001, 0.75, 0.999, 1.0])
def test_classify_agrees_with_iteration(p):
    rate = abs(1 - 2 * p)
    steps = 1000 if rate in (0.0, 1.0) else min(10**6, math.ceil(math.log(1e-10) / math.log(rate)))
    values = iterate(DynamicsConfig(p), steps).values
    dev = values - 0.5
    kind = classify(DynamicsConfig(p))
    if kind is ConvergenceClass.CONSTANT:
        assert np.all(values == values[0])
    elif kind is ConvergenceClass.PERIOD_TWO:
        assert np.all(values[::2] == values[0]) and np.all(values[1::2] == 1 - values[0])
    elif kind is ConvergenceClass.CONSTANT_AT_HALF:
        assert np.all(values[1:] == 0.5)
    else:
        assert abs(dev[-1]) < 1e-9
        # float steps stall a few ulps short of 1/2 once 2p|dev| < ulp/2
        live = np.abs(dev) > 1e-12
        if kind is ConvergenceClass.MONOTONE_TO_HALF:
            assert np.all(np.diff(values[live]) > 0)
            assert np.all(np.diff(values) >= 0)
        else:
            signs = np.sign(dev[live])
            assert np.all(signs[1:] == -signs[:-1])


def test_approx_fraction_examples():
    assert approx_fraction(0, 0.03) == 0.0
    assert approx_fraction(1 / (2 * 0.03), 0.03) == pytest.approx(0.5 * (1 - math.exp(-1)))
    assert approx_fraction(1 / (2 * 0.03), 0.03) == pytest.approx(0.3161, abs=5e-5)


# worst gap between the exponential curve and the iterated recurrence for
# k <= 10/p, measured once from the iteration and frozen
FROZEN_APPROX_GAP = {
    0.005: 0.0009235499491067056,
    0.01: 0.0018548805421627068,
    0.02: 0.0037413621567118915,
    0.03: 0.005659297570505484,
    0.05: 0.009600500535721201,
}


@pytest.mark.parametrize("p", sorted(FROZEN_APPROX_GAP))
def test_approx_gap_regression(p):
    k_max = math.ceil(10 / p)
    exact = iterate(DynamicsConfig(p), k_max).values
    approx = np.array([approx_fraction(k, p) for k in range(k_max + 1)])
    gap = np.max(np.abs(exact - approx))
    assert gap <= 0.02
    assert gap == pytest.approx(FROZEN_APPROX_GAP[p], rel=1e-9)


@pytest.mark.parametrize(
    "p, maturity, old_age",
    [(0.03, 17, 100), (0.5, 1, 6), (0.005, 100, 600), (1.0, 1, 3), (0.0017, 295, 1765)],
)
def test_epoch_thresholds(p, maturity, old_age):
    assert maturity_epoch(p) == maturity
    assert old_age_epoch(p) == old_age


@pytest.mark.parametrize("fn", [maturity_epoch, old_age_epoch])
@pytest.mark.parametrize("p", [0.0, 3.0, -0.5])
def test_epoch_thresholds_reject_bad_p(fn, p):
    with pytest.raises(ValueError):
        fn(p)


def test_min_mutation_rate():
    assert min_mutation_rate(600) == pytest.approx(1 / 600)
    assert round(min_mutation_rate(30 * 20), 4) == 0.0017
    assert min_mutation_rate(1) == 1.0
    assert min_mutation_rate(10**6) == 1e-6
    with pytest.raises(ValueError):
        min_mutation_rate(0)


@given(probs, probs, st.integers(0, 300))
def test_trajectory_is_exact_and_bounded(p, p0, k):
    values = iterate(DynamicsConfig(p, p0), k).values
    assert np.all((values >= 0) & (values <= 1))
    assert np.allclose(values[1:], (1 - 2 * p) * values[:-1] + p, rtol=0, atol=1e-12)


@given(st.floats(1e-6, 1 - 1e-6), probs)
def test_contraction_towards_half(p, p0):
    values = iterate(DynamicsConfig(p, p0), 200).values
    k = np.arange(values.size)
    bound = np.abs(1 - 2 * p) ** k * abs(p0 - 0.5)
    assert np.all(np.abs(values - 0.5) <= bound + 1e-12)


@given(st.floats(0.5 + 1e-6, 1 - 1e-6), probs)
def test_oscillation_sign_alternates(p, p0):
    dev = iterate(DynamicsConfig(p, p0), 200).values - 0.5
    for a, b in zip(dev, dev[1:]):
        if abs(a) > 1e-13 and abs(b) > 1e-13:
            assert np.sign(b) == -np.sign(a)


def test_simulation_edge_rates():
    rng = np.random.default_rng(0)
    zero = simulate_flip_fraction(50, 0.0, 20, 5, rng)
    assert np.all(zero.mean_fraction == 0)
    assert np.all(zero.first_passage == -1)
    one = simulate_flip_fraction(50, 1.0, 3, 5, rng)
    assert list(one.mean_fraction) == [0, 1, 0, 1]
    assert np.all(one.first_passage == 1)


@pytest.mark.parametrize(
    "kwargs", [dict(n_bits=0), dict(trials=0), dict(p=1.2), dict(epochs=-1)]
)
def test_simulation_rejects_bad_arguments(kwargs):
    args = dict(n_bits=10, p=0.1, epochs=5, trials=2)
    args.update(kwargs)
    with pytest.raises(ValueError):
        simulate_flip_fraction(rng=np.random.default_rng(0), **args)


def test_simulation_is_independent_of_worker_count():
    serial = simulate_flip_fraction(100, 0.05, 60, 40, np.random.default_rng(5))
    threaded = simulate_flip_fraction(100, 0.05, 60, 40, np.random.default_rng(5), workers=4)
    assert np.array_equal(serial.mean_fraction, threaded.mean_fraction)
    assert np.array_equal(serial.first_passage, threaded.first_passage)


def test_simulation_checkpoints_agree_with_recurrence():
    p, n_bits, trials = 0.05, 200, 500
    result = simulate_flip_fraction(n_bits, p, 100, trials, np.random.default_rng(3))
    exact = iterate(DynamicsConfig(p), 100).values
    band = result.tolerance_band()
    for k in (1, 10, 30, 100):
        assert abs(result.mean_fraction[k] - exact[k]) <= band[k]


def test_simulation_deviations_are_unbiased():
    # standardized deviation at fixed epochs, pooled over independent seeds,
    # should look like N(0, 1)
    p, n_bits, trials, epochs, seeds = 0.03, 100, 100, 150, 200
    checkpoints = [5, 20, 60, 150]
    exact = iterate(DynamicsConfig(p), epochs).values
    z = []
    for seed in range(seeds):
        result = simulate_flip_fraction(n_bits, p, epochs, trials, np.random.default_rng(seed))
        sd = result.tolerance_band(1.0)
        z.append((result.mean_fraction[checkpoints] - exact[checkpoints]) / sd[checkpoints])
    z = np.array(z)
    assert np.all(np.abs(z.mean(axis=0)) < 3 / np.sqrt(seeds))
    assert np.all((z.std(axis=0) > 0.8) & (z.std(axis=0) < 1.2))
