import math
import warnings

import numpy as np
import numpy.testing as npt
import pytest

from qregret.audit import estimator_unbiasedness_test
from qregret.bandit import (WeaklyAdaptiveMAB, estimate_gain, exploration_probability,
                            wamab_init)
from qregret.errors import ContractError, HorizonWarning, ProtocolError
from qregret.simplex import ProbabilityVector, project_to_simplex


@pytest.mark.parametrize("N, T, gamma", [
    (100, 16, 1.0),
    (4, 256, 0.5),
    (5, 10 ** 4, 0.223606797749978969640917366873),
])
def test_exploration_probability(N, T, gamma):
    assert exploration_probability(N, T) == pytest.approx(gamma, rel=1e-14)


def test_init_parameters():
    b = wamab_init(4, 256)
    assert b.gamma == 0.5
    # sqrt(2) * 0.5 / (4 * 16), evaluated at 30 digits
    assert b.ogd.eta == pytest.approx(0.0110485434560398050687631931579, rel=1e-14)
    assert b.ogd.gain_bound == 8.0
    assert b.last_play_distribution == ProbabilityVector.uniform(4)

    b = wamab_init(5, 10 ** 4)
    assert b.gamma == pytest.approx(0.223606797749978969640917366873, rel=1e-14)
    assert b.ogd.eta == pytest.approx(0.000632455532033675866399778708887, rel=1e-14)


def test_short_horizon_warns_but_works():
    with pytest.warns(HorizonWarning):
        b = WeaklyAdaptiveMAB(5, 10)
    arm = b.select((0.1, 0.2))
    b.feed(arm, 0.5)


def test_single_arm_always_plays_it(rng):
    b = WeaklyAdaptiveMAB(1, 100)
    for u in rng.random((100, 2)):
        arm = b.select(u)
        assert arm == 0
        b.feed(arm, float(u[0]))
    assert b.p == ProbabilityVector([1.0])


def test_full_exploration_ignores_p():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HorizonWarning)
        b = WeaklyAdaptiveMAB(4, 16)
    assert b.gamma == 1.0
    b.ogd.p = ProbabilityVector([1, 0, 0, 0])
    arm, dist = b.select_with_distribution(0.3, 0.9)
    assert arm == 3
    assert dist == ProbabilityVector.uniform(4)


def test_exploit_branch_and_mixed_law():
    b = WeaklyAdaptiveMAB(2, 64)
    assert b.gamma == pytest.approx(0.5, rel=1e-15)
    b.ogd.p = ProbabilityVector([1.0, 0.0])
    arm, dist = b.select_with_distribution(0.9, 0.99)
    assert arm == 0
    npt.assert_allclose(dist.weights, [0.75, 0.25], rtol=1e-15)


def test_symmetric_p_gives_uniform_law():
    b = WeaklyAdaptiveMAB(2, 10_000)
    _, dist = b.select_with_distribution(0.5, 0.5)
    npt.assert_allclose(dist.weights, [0.5, 0.5])


def test_protocol_errors():
    b = WeaklyAdaptiveMAB(2, 64)
    with pytest.raises(ProtocolError):
        b.feed(0, 0.5)
    arm = b.select((0.1, 0.1))
    with pytest.raises(ProtocolError):
        b.select((0.1, 0.1))
    with pytest.raises(ProtocolError):
        b.feed(1 - arm, 0.5)
    with pytest.raises(ValueError):
        b.feed(arm, 1.5)


def test_estimate_gain_examples():
    law = ProbabilityVector([0.45, 0.31, 0.24])    # p=(0.5, 0.3, 0.2) mixed at gamma=0.3
    npt.assert_array_equal(estimate_gain(0.0, 1, law), [0, 0, 0])
    g = estimate_gain(0.6, 1, law)
    npt.assert_allclose(g, [0, 1.93548387096774193548387096774, 0], rtol=1e-14)
    g = estimate_gain(0.7, 2, ProbabilityVector.uniform(4))
    npt.assert_allclose(g, [0, 0, 2.8, 0])
    with pytest.raises(ContractError):
        estimate_gain(0.5, 0, ProbabilityVector([0.0, 1.0]))


def test_feed_zero_leaves_p():
    b = WeaklyAdaptiveMAB(3, 100)
    before = b.p
    arm = b.select((0.9, 0.4))
    b.feed(arm, 0.0)
    assert b.p == before


def test_feed_one_step_chain():
    b = WeaklyAdaptiveMAB(2, 64)             # gamma = 0.5
    arm = b.select((0.9, 0.1))
    assert arm == 0
    b.feed(0, 1.0)                           # estimate (2, 0)
    eta = 0.0441941738241592202750527726316  # sqrt(2) * 0.5 / (2 * 8)
    npt.assert_allclose(b.p.weights, [0.5 + eta, 0.5 - eta], rtol=1e-13)
    npt.assert_allclose(b.p.weights, project_to_simplex([0.5 + 2 * eta, 0.5]).weights)


def test_estimates_bounded_and_sparse(rng):
    b = WeaklyAdaptiveMAB(4, 256)
    S = rng.random((256, 4))
    for t in range(256):
        arm, law = b.select_with_distribution(*rng.random(2))
        g = estimate_gain(S[t, arm], arm, law)
        assert np.count_nonzero(g) <= 1
        assert np.linalg.norm(g) <= 4 / b.gamma * (1 + 1e-12)
        assert law.weights.min() >= b.gamma / 4 - 1e-15
        b.feed(arm, S[t, arm])


@pytest.mark.parametrize("gamma", [0.1, 0.5, 1.0])
def test_estimator_unbiased(gamma):
    p = ProbabilityVector([0.6, 0.3, 0.1, 0.0])
    res = estimator_unbiasedness_test(p, gamma, [0.9, 0.2, 0.5, 1.0], 100_000,
                                      np.random.default_rng(1))
    assert res.max_error <= 0.02
    assert res.max_estimate_norm <= 4 / gamma * (1 + 1e-12)


def test_minimum_play_probability(rng):
    b = WeaklyAdaptiveMAB(4, 10_000)
    b.ogd.p = ProbabilityVector([1.0, 0.0, 0.0, 0.0])
    counts = np.zeros(4)
    for u in rng.random((100_000, 2)).tolist():
        arm = b.select(u)
        counts[arm] += 1
        b._pending = None                    # keep p frozen: skip the update
    assert counts.min() / 100_000 >= b.gamma / 4 - 0.01


def test_determinism():
    def arms(seed):
        b = WeaklyAdaptiveMAB(3, 500)
        S = np.random.default_rng(0).random((500, 3))
        out = []
        for t, u in enumerate(np.random.default_rng(seed).random((500, 2))):
            a = b.select(u)
            b.feed(a, S[t, a])
            out.append(a)
        return out
    assert arms(5) == arms(5)
    assert arms(5) != arms(6)
