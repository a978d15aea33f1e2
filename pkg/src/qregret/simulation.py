"""Run a policy against a materialized environment."""
from __future__ import annotations

import numpy as np

from qregret.audit import ScheduleTrace
from qregret.environments import RngStream
from qregret.policy import DRAWS_PER_ROUND, Policy
from qregret.queueing import QueueTrace, queue_trajectory


def policy_draws(rng: RngStream, T: int) -> np.ndarray:
    """The T x 2 uniforms a policy consumes, ``(u_explore, u_arm)`` per slot."""
    return rng.generator().random((T, DRAWS_PER_ROUND))


def play(policy: Policy, services, draws: np.ndarray, record_distributions: bool = False) -> ScheduleTrace:
    """Schedule T slots with bandit feedback: only the chosen channel's rate
    is revealed. The rate is observable even when the queue is empty, so the
    schedule does not depend on arrivals."""
    s = np.asarray(services, dtype=float)
    T, n = s.shape
    if n != policy.n_arms:
        raise ValueError(f"policy has {policy.n_arms} arms, services have {n}")
    if draws.shape[0] < T:
        raise ValueError(f"need {T} draws, got {draws.shape[0]}")
    rows = s.tolist()
    arms = np.empty(T, dtype=int)
    gains = np.empty(T)
    dists = np.empty((T, n)) if record_distributions else None
    for t, (u0, u1) in enumerate(draws[:T].tolist()):
        arm = policy.select((u0, u1))
        if record_distributions:
            dists[t] = np.asarray(policy.last_play_distribution)
        g = rows[t][arm]
        policy.feed(arm, g)
        arms[t] = arm
        gains[t] = g
    return ScheduleTrace(arms, gains, dists)


def served_queue(arrivals, trace: ScheduleTrace) -> QueueTrace:
    return queue_trajectory(arrivals, trace.observed_gains)
