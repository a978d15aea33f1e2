import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qregret.baselines import (Exp3, FixedArm, RoundRobin, UniformRandom, best_fixed_arm,
                               exp3_step, fixed_uniform_roundrobin_select, make_policy)
from qregret.errors import ProtocolError


def test_exp3_zero_gain_keeps_weights():
    p = Exp3(3, 100)
    arm = p.select((0.0, 0.5))
    exp3_step(p, arm, 0.0)
    npt.assert_array_equal(p.log_weights, 0.0)


def test_exp3_single_update():
    p = Exp3(2, 100, eta=0.1)
    arm = p.select((0.0, 0.2))
    assert arm == 0
    exp3_step(p, arm, 1.0)
    assert p.distribution()[0] == pytest.approx(0.549833997312477908559152541839, rel=1e-14)


def _steer(policy, arm):
    """Uniform draw that makes ``policy`` select ``arm``."""
    cdf = np.concatenate([[0.0], np.cumsum(policy.distribution().weights)])
    return (0.0, (cdf[arm] + cdf[arm + 1]) / 2)


def _replay(history, n=3):
    p = Exp3(n, 100, eta=0.05)
    for arm, gain in history:
        assert p.select(_steer(p, arm)) == arm
        p.feed(arm, gain)
    return p


def test_exp3_symmetric_history_is_uniform():
    p = _replay([(0, 0.5), (1, 0.5), (2, 0.5)] * 4)
    # importance weights differ from round to round, so uniformity is approximate
    npt.assert_allclose(p.distribution().weights, [1 / 3] * 3, atol=0.01)


def test_exp3_permutation_equivariant(rng):
    history = [(int(a), float(g)) for a, g in zip(rng.integers(0, 3, 30), rng.random(30))]
    perm = [2, 0, 1]
    base = _replay(history).log_weights
    moved = _replay([(perm[a], g) for a, g in history]).log_weights
    npt.assert_allclose(moved[perm], base, rtol=1e-12)


def test_exp3_default_tuning():
    assert Exp3(5, 2000).eta == pytest.approx(np.sqrt(2 * np.log(5) / (5 * 2000)))
    assert Exp3(1, 100).eta > 0


def test_exp3_mix_keeps_floor():
    p = Exp3(4, 100, eta=5.0, mix=0.2)
    p.log_weights[:] = [50, 0, 0, 0]
    assert p.distribution().weights.min() >= 0.05 - 1e-15


@pytest.mark.parametrize("observed", [-0.1, 1.1])
def test_feed_rejects_out_of_range(observed):
    for pol in (Exp3(2, 10), UniformRandom(2), RoundRobin(2), FixedArm(2, 1), make_policy("wamab", 2, 10)):
        arm = pol.select((0.5, 0.5))
        with pytest.raises(ValueError):
            pol.feed(arm, observed)


def test_select_feed_alternate():
    pol = RoundRobin(3)
    pol.select((0, 0))
    with pytest.raises(ProtocolError):
        pol.select((0, 0))


def test_fixed_uniform_round_robin():
    assert [fixed_uniform_roundrobin_select("fixed", r, 0.3, 4, arm=2) for r in range(3)] == [2, 2, 2]
    assert [fixed_uniform_roundrobin_select("round_robin", r, 0.3, 3) for r in range(6)] == [0, 1, 2, 0, 1, 2]
    with pytest.raises(ValueError):
        fixed_uniform_roundrobin_select("fixed", 0, 0.3, 3, arm=3)
    rr = RoundRobin(3)
    seen = []
    for _ in range(6):
        seen.append(rr.select((0, 0)))
        rr.feed(seen[-1], 0.5)
    assert seen == [0, 1, 2, 0, 1, 2]


def test_uniform_frequencies(rng):
    counts = np.bincount([fixed_uniform_roundrobin_select("uniform", 0, u, 4) for u in rng.random(100_000)],
                         minlength=4)
    npt.assert_allclose(counts / 100_000, 0.25, atol=0.01)


def test_best_fixed_arm_examples():
    S = np.array([[1.0, 2.0, 1.0], [1.0, 2.0, 2.0], [1.0, 1.0, 1.0]])   # sums 3, 5, 4
    assert best_fixed_arm(S) == 1
    assert best_fixed_arm(np.ones((4, 3))) == 0
    with pytest.raises(ValueError):
        best_fixed_arm(np.zeros((0, 3)))


def test_best_fixed_arm_brute_force(rng):
    S = rng.random((10, 3))
    totals = [sum(S[t, i] for t in range(10)) for i in range(3)]
    assert best_fixed_arm(S) == max(range(3), key=lambda i: (totals[i], -i))


@given(st.tuples(st.integers(1, 20), st.integers(1, 5)).flatmap(
    lambda tn: arrays(float, tn, elements=st.sampled_from([0.0, 0.25, 0.5, 1.0]))), st.randoms())
def test_best_fixed_arm_row_permutation_invariant(S, rnd):
    rows = list(range(S.shape[0]))
    rnd.shuffle(rows)
    assert best_fixed_arm(S[rows]) == best_fixed_arm(S)


@pytest.mark.parametrize("ident, cls", [("wamab", "WeaklyAdaptiveMAB"), ("exp3", "Exp3"),
                                        ("uniform", "UniformRandom"), ("round_robin", "RoundRobin"),
                                        ("fixed:2", "FixedArm")])
def test_make_policy(ident, cls):
    pol = make_policy(ident, 3, 100)
    assert type(pol).__name__ == cls
    assert pol.name == ident


@pytest.mark.parametrize("ident", ["ucb", "fixed:3", "fixed:x", "fixed:-1"])
def test_make_policy_rejects(ident):
    with pytest.raises(ValueError):
        make_policy(ident, 3, 100)
