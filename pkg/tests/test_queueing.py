import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qregret.oracles import lindley_fold, queue_regret_enumeration, suffix_max_queue
from qregret.queueing import (fixed_arm_queues, lindley_step, queue_closed_form,
                              queue_length_regret, queue_regret_curve, queue_trajectory)


@pytest.mark.parametrize("q, a, s, expected", [
    (0, 0, 1, (0, 0)),
    (5, 2, 3, (4, 3)),
    (1, 0, 4, (0, 1)),
])
def test_lindley_step(q, a, s, expected):
    assert lindley_step(q, a, s) == expected


@pytest.mark.parametrize("args", [(-1, 0, 0), (0, -1, 0), (0, 0, -1), (0, float("nan"), 0)])
def test_lindley_step_rejects(args):
    with pytest.raises(ValueError):
        lindley_step(*args)


def test_trajectory_examples():
    npt.assert_array_equal(queue_trajectory([0, 0, 0], [1, 0, 1]).lengths, [0, 0, 0, 0])
    npt.assert_array_equal(queue_trajectory([1, 2, 3], [0, 0, 0]).lengths, [0, 1, 3, 6])
    tr = queue_trajectory([1, 0, 3], [0, 2, 0])
    npt.assert_array_equal(tr.lengths, [0, 1, 0, 3])
    npt.assert_array_equal(tr.departures, [0, 1, 0])
    with pytest.raises(ValueError):
        queue_trajectory([1, 2], [1])


def test_closed_form_examples():
    npt.assert_array_equal(queue_closed_form([-1, -1, -1]), [0, 0, 0])
    npt.assert_array_equal(queue_closed_form([1, 2, 0.5]), [1, 3, 3.5])
    npt.assert_array_equal(queue_closed_form([1, -2, 3]), [1, 0, 3])
    assert suffix_max_queue([1, -2, 3]) == [1, 0, 3]


increments = arrays(float, st.integers(1, 60), elements=st.floats(-5, 5))


@given(increments)
def test_closed_form_matches_suffix_oracle(b):
    npt.assert_allclose(queue_closed_form(b), suffix_max_queue(b), atol=1e-9, rtol=0)


@given(st.integers(1, 60).flatmap(lambda T: st.tuples(
    arrays(float, T, elements=st.floats(0, 5)), arrays(float, T, elements=st.floats(0, 5)))))
def test_fold_and_closed_form_agree_exactly(pair):
    a, s = pair
    npt.assert_array_equal(queue_trajectory(a, s).lengths[1:], queue_closed_form(a - s))
    npt.assert_array_equal(queue_trajectory(a, s).lengths, lindley_fold(a, s))


@given(st.integers(1, 40).flatmap(lambda T: st.tuples(
    arrays(float, T, elements=st.floats(0, 3)), arrays(float, T, elements=st.floats(0, 3)),
    arrays(float, T, elements=st.floats(0, 3)))))
def test_monotone_in_arrivals(triple):
    a, extra, s = triple
    assert np.all(queue_trajectory(a + extra, s).lengths >= queue_trajectory(a, s).lengths)


@given(st.integers(1, 40).flatmap(lambda T: st.tuples(
    arrays(float, T, elements=st.floats(0, 3)), arrays(float, T, elements=st.floats(0, 3)))))
def test_work_conservation(pair):
    a, s = pair
    tr = queue_trajectory(a, s)
    assert tr.departures.sum() + tr.lengths[-1] == pytest.approx(a.sum(), abs=1e-9)
    assert np.all(tr.departures >= 0)


def test_regret_self_comparison_is_zero(rng):
    S = rng.random((30, 1))
    A = rng.random(30)
    fixed = fixed_arm_queues(A, S)
    assert queue_length_regret(queue_trajectory(A, S[:, 0]), fixed)[0] == 0.0


def test_regret_identical_channels_is_zero(rng):
    col = rng.random(30)
    S = np.column_stack([col] * 3)
    A = rng.random(30)
    arms = rng.integers(0, 3, 30)
    q = queue_trajectory(A, S[np.arange(30), arms])
    assert queue_length_regret(q, fixed_arm_queues(A, S)) == (0.0, 1, 0)
    npt.assert_array_equal(queue_regret_curve(q, fixed_arm_queues(A, S)), 0.0)


@pytest.mark.parametrize("seed", range(20))
def test_regret_matches_double_loop(seed):
    r = np.random.default_rng(seed)
    T, N = 3, 2
    S, A, arms = r.random((T, N)), r.random(T) * 1.5, r.integers(0, N, T)
    q = queue_trajectory(A, S[np.arange(T), arms])
    assert queue_length_regret(q, fixed_arm_queues(A, S)) == queue_regret_enumeration(A, S, arms)


def test_regret_is_signed_for_foreign_traces():
    S = np.array([[0.5, 0.0], [0.0, 0.5]])
    A = np.array([1.0, 1.0])
    q = queue_trajectory(A, [1.0, 1.0])       # more service than any arm offers
    value, t, i = queue_length_regret(q, fixed_arm_queues(A, S))
    assert value == -0.5 and (t, i) == (1, 0)


@given(st.integers(1, 30).flatmap(lambda T: st.tuples(
    arrays(float, (T, 3), elements=st.floats(0, 1)), arrays(float, T, elements=st.floats(0, 2)),
    arrays(int, T, elements=st.integers(0, 2)))))
def test_regret_of_a_real_schedule_is_nonnegative(case):
    # Q^pi(1) equals the queue of the arm chosen in slot 1
    S, A, arms = case
    q = queue_trajectory(A, S[np.arange(S.shape[0]), arms])
    assert queue_length_regret(q, fixed_arm_queues(A, S))[0] >= 0.0


def test_curve_is_running_max(rng):
    T, N = 80, 3
    S, A, arms = rng.random((T, N)), rng.random(T), rng.integers(0, N, T)
    q = queue_trajectory(A, S[np.arange(T), arms])
    curve = queue_regret_curve(q, fixed_arm_queues(A, S))
    assert np.all(np.diff(curve) >= 0)
    assert curve[-1] == queue_length_regret(q, fixed_arm_queues(A, S))[0]
