"""Interval regret of a schedule and the checkable guarantees built on it.

Slots in reports are 1-based (``start``/``end`` of an interval) and arms are
0-based, matching the rest of the package.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from qregret.bandit import estimate_gain
from qregret.errors import HorizonWarning
from qregret.policy import uniform_arm
from qregret.environments import RngStream
from qregret.simplex import ProbabilityVector, mix_with_uniform, sample_arm

REALIZED = "realized"
EXPECTED = "expected"
DOMINATION_TOL = 1e-9


@dataclass
class ScheduleTrace:
    """What a policy did: arm pulled each slot, the gain it saw, and optionally
    the distribution the arm was drawn from."""
    arms: np.ndarray
    observed_gains: np.ndarray
    play_distributions: np.ndarray | None = None

    @property
    def horizon(self) -> int:
        return self.arms.size

    @classmethod
    def from_arms(cls, services, arms) -> "ScheduleTrace":
        s = np.asarray(services, dtype=float)
        arms = np.asarray(arms, dtype=int)
        return cls(arms, s[np.arange(arms.size), arms])

    @classmethod
    def from_distributions(cls, services, distributions) -> "ScheduleTrace":
        """Expected-play trace, e.g. for a full-information learner; ``arms``
        holds the modal arm and is informational only."""
        d = np.asarray(distributions, dtype=float)
        s = np.asarray(services, dtype=float)
        return cls(np.argmax(d, axis=1), np.einsum("tn,tn->t", s, d), d)


@dataclass
class IntervalRegretReport:
    max_regret: float
    interval: tuple[int, int]
    best_arm: int
    accounting: str = REALIZED
    per_prefix: np.ndarray | None = None


def policy_gains(services, trace: ScheduleTrace, accounting: str = REALIZED) -> np.ndarray:
    """Per-slot gain credited to the policy: S_{J_t}(t) or <S(t), p_t>."""
    s = np.asarray(services, dtype=float)
    if s.shape[0] != trace.horizon:
        raise ValueError(f"services cover {s.shape[0]} slots, trace covers {trace.horizon}")
    if accounting == REALIZED:
        return s[np.arange(trace.horizon), trace.arms]
    if accounting == EXPECTED:
        if trace.play_distributions is None:
            raise ValueError("expected-play accounting needs play_distributions")
        return np.einsum("tn,tn->t", s, trace.play_distributions)
    raise ValueError(f"unknown accounting {accounting!r}")


def interval_regret(services, trace: ScheduleTrace, start: int, end: int,
                    accounting: str = REALIZED) -> float:
    """max_i sum_{t=start..end} (S_i(t) - policy gain at t), slots 1-based inclusive."""
    s = np.asarray(services, dtype=float)
    T = s.shape[0]
    if not 1 <= start <= end <= T:
        raise ValueError(f"need 1 <= start <= end <= {T}, got [{start}, {end}]")
    d = s[start - 1:end] - policy_gains(s, trace, accounting)[start - 1:end, None]
    best = -math.inf
    for col in d.T.tolist():
        acc = 0.0
        for x in col:
            acc += x
        best = max(best, acc)
    return best


def max_interval_regret(services, trace: ScheduleTrace, accounting: str = REALIZED,
                        keep_prefix: bool = False) -> IntervalRegretReport:
    """Exact maximum of the interval regret over all sub-intervals and arms.

    A maximum-subarray scan per arm over d_t = S_i(t) - gain_t, vectorized
    across arms. The running sum for a fixed start is accumulated left to
    right, the same order a direct enumeration uses, so the scan reproduces
    the enumeration's maximum exactly. Ties go to the interval ending first,
    then starting first, then to the lowest arm.
    """
    s = np.asarray(services, dtype=float)
    T, n = s.shape
    d = s - policy_gains(s, trace, accounting)[:, None]

    run = d[0].copy()                    # best sum of an interval ending at t, per arm
    run_start = np.zeros(n, dtype=int)
    best = run.copy()
    best_start = np.zeros(n, dtype=int)
    best_end = np.zeros(n, dtype=int)
    prefix = np.empty(T) if keep_prefix else None
    if keep_prefix:
        prefix[0] = best.max()
    for t in range(1, T):
        ext = run + d[t]
        restart = ext < d[t]             # extend on ties: earlier start
        run = np.where(restart, d[t], ext)
        run_start = np.where(restart, t, run_start)
        better = run > best              # strict: keep the earlier end
        best = np.where(better, run, best)
        best_start = np.where(better, run_start, best_start)
        best_end = np.where(better, t, best_end)
        if keep_prefix:
            prefix[t] = best.max()

    top = best.max()
    cands = np.flatnonzero(best == top)
    i = min(cands, key=lambda a: (best_end[a], best_start[a], a))
    return IntervalRegretReport(
        max_regret=float(top),
        interval=(int(best_start[i]) + 1, int(best_end[i]) + 1),
        best_arm=int(i),
        accounting=accounting,
        per_prefix=prefix,
    )


def check_pathwise_domination(queue_regret: float, report: IntervalRegretReport,
                              tol: float = DOMINATION_TOL) -> bool:
    """Queue-length regret never exceeds the worst interval regret of the same run."""
    return queue_regret <= report.max_regret + tol


def prefix_regret_max(services, trace: ScheduleTrace) -> float:
    """max over t and arms of the cumulative regret on [1, t]."""
    s = np.asarray(services, dtype=float)
    d = s - policy_gains(s, trace)[:, None]
    return float(np.cumsum(d, axis=0).max())


def theorem1_bound(gain_bound: float, horizon: int) -> float:
    """G sqrt(2T): deterministic interval-regret bound for full-information OGD."""
    if gain_bound <= 0 or horizon < 1:
        raise ValueError(f"need gain_bound > 0 and horizon >= 1, got {gain_bound}, {horizon}")
    return gain_bound * math.sqrt(2.0 * horizon)


def theorem2_bound(n_arms: int, horizon: int, delta: float) -> float:
    """3 sqrt(N) T^(3/4) (1 + sqrt(ln(3 N T^2 / delta))), valid w.p. 1 - delta for T >= N^2."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if n_arms < 1 or horizon < 1:
        raise ValueError(f"need n_arms >= 1 and horizon >= 1, got {n_arms}, {horizon}")
    if horizon < n_arms ** 2:
        warnings.warn(f"horizon {horizon} < n_arms^2: the bound is not guaranteed",
                      HorizonWarning, stacklevel=2)
    log_term = math.log(3.0 * n_arms * horizon ** 2 / delta)
    return 3.0 * math.sqrt(n_arms) * horizon ** 0.75 * (1.0 + math.sqrt(log_term))


class UnbiasednessResult(NamedTuple):
    max_error: float
    max_estimate_norm: float


def estimator_unbiasedness_test(p: ProbabilityVector, gamma: float, true_gains,
                                samples: int, rng) -> UnbiasednessResult:
    """Monte Carlo check of the importance-weighted estimator with p held fixed.

    Each sample draws an arm exactly as the bandit does (explore with
    probability gamma, else sample p) and forms the estimate against the
    mixed law. Returns the largest per-arm deviation of the sample mean from
    the true gain, and the largest estimate norm seen. ``rng`` may be an
    RngStream or a numpy Generator.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if isinstance(rng, RngStream):
        rng = rng.generator()
    g = np.asarray(true_gains, dtype=float)
    n = len(p)
    law = mix_with_uniform(p, gamma)
    draws = rng.random((samples, 2)).tolist()
    total = np.zeros(n)
    max_norm = 0.0
    for u_explore, u_arm in draws:
        arm = uniform_arm(u_arm, n) if u_explore < gamma else sample_arm(p, u_arm)
        est = estimate_gain(g[arm], arm, law)
        total += est
        max_norm = max(max_norm, float(np.linalg.norm(est)))
    return UnbiasednessResult(float(np.max(np.abs(total / samples - g))), max_norm)


AUDIT_HEADER = ("run", "metric", "value", "interval_start", "interval_end", "arm")


def write_audit_csv(path, rows: Iterable[dict]) -> None:
    """Rows follow ``AUDIT_HEADER``; missing interval/arm fields are left blank."""
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(AUDIT_HEADER)
            for row in rows:
                w.writerow([_fmt(row.get(k, "")) for k in AUDIT_HEADER])
    except OSError as exc:
        raise OSError(f"cannot write audit report {path}: {exc}") from exc


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.9g}"
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    return str(x)
