"""Single-queue dynamics and the worst-case queue-length regret.

Queues are fluid: contents, arrivals and service are non-negative reals.
The per-slot update is ``Q(t) = max(0, Q(t-1) + (A(t) - s(t)))``, with the
net increment formed first so that the recursion on ``(A, s)`` and the
recursion on precomputed increments ``b = A - s`` agree bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QueueTrace:
    lengths: np.ndarray      # T + 1 values, lengths[0] == Q(0) == 0
    departures: np.ndarray   # T values

    @property
    def horizon(self) -> int:
        return self.departures.size


def lindley_step(q: float, arrival: float, service: float) -> tuple[float, float]:
    """Advance the queue one slot; returns ``(q_next, departed)``."""
    for name, x in (("q", q), ("arrival", arrival), ("service", service)):
        if not math.isfinite(x) or x < 0:
            raise ValueError(f"{name} must be finite and non-negative, got {x!r}")
    return _step(q, arrival, service)


def _step(q: float, arrival: float, service: float) -> tuple[float, float]:
    nxt = q + (arrival - service)
    return (nxt if nxt > 0.0 else 0.0), min(q + arrival, service)


def queue_trajectory(arrivals, served_rates) -> QueueTrace:
    """Fold the Lindley recursion from Q(0) = 0.

    ``served_rates[t]`` is the offered service in slot t, i.e. the rate of
    whichever channel was used.
    """
    a = np.asarray(arrivals, dtype=float)
    s = np.asarray(served_rates, dtype=float)
    if a.ndim != 1 or a.shape != s.shape:
        raise ValueError(f"arrivals and services must be equal-length vectors, got {a.shape} and {s.shape}")
    if a.size < 1:
        raise ValueError("need at least one slot")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(s))):
        raise ValueError("non-finite arrivals or services")
    if np.any(a < 0) or np.any(s < 0):
        raise ValueError("arrivals and services must be non-negative")
    T = a.size
    lengths = np.zeros(T + 1)
    departures = np.empty(T)
    q = 0.0
    for t, (at, st) in enumerate(zip(a.tolist(), s.tolist())):
        q, departures[t] = _step(q, at, st)
        lengths[t + 1] = q
    return QueueTrace(lengths, departures)


def queue_closed_form(increments) -> np.ndarray:
    """Q(1..T) for net increments b, i.e. the largest suffix sum ending at t
    (the empty suffix counts as 0).

    Computed incrementally as ``max(0, Q(t-1) + b_t)``; see
    ``qregret.oracles.suffix_max_queue`` for the direct quadratic form.
    """
    b = np.asarray(increments, dtype=float)
    if b.ndim != 1 or b.size < 1:
        raise ValueError("need a non-empty vector of increments")
    out = np.empty(b.size)
    q = 0.0
    for t, bt in enumerate(b.tolist()):
        q = q + bt
        if q < 0.0:
            q = 0.0
        out[t] = q
    return out


def fixed_arm_queues(arrivals, services) -> list[QueueTrace]:
    """One trace per arm, each always transmitting on that arm."""
    s = np.asarray(services, dtype=float)
    return [queue_trajectory(arrivals, s[:, i]) for i in range(s.shape[1])]


def regret_gaps(policy_queue: QueueTrace, per_arm_queues: list[QueueTrace]) -> np.ndarray:
    """T x N matrix of Q^pi(t) - Q^i(t) for t = 1..T."""
    if not per_arm_queues:
        raise ValueError("need at least one benchmark trace")
    T = policy_queue.horizon
    if any(tr.horizon != T for tr in per_arm_queues):
        raise ValueError("all traces must share the same horizon")
    bench = np.column_stack([tr.lengths[1:] for tr in per_arm_queues])
    return policy_queue.lengths[1:, None] - bench


def queue_length_regret(policy_queue: QueueTrace,
                        per_arm_queues: list[QueueTrace]) -> tuple[float, int, int]:
    """max over slots t and arms i of Q^pi(t) - Q^i(t).

    Returns ``(regret, t, i)`` with t a 1-based slot and i a 0-based arm;
    ties go to the smallest t, then the smallest i. The value is signed: a
    policy that beats every fixed arm at every slot has negative regret.
    """
    gaps = regret_gaps(policy_queue, per_arm_queues)
    flat = int(np.argmax(gaps))
    t, i = divmod(flat, gaps.shape[1])
    return float(gaps[t, i]), t + 1, i


def queue_regret_curve(policy_queue: QueueTrace, per_arm_queues: list[QueueTrace]) -> np.ndarray:
    """Running maximum R_Q(t) for t = 1..T."""
    return np.maximum.accumulate(regret_gaps(policy_queue, per_arm_queues).max(axis=1))
