"""Comparison policies (EXP3, fixed arm, uniform, round robin) and the
offline best-fixed-arm oracle."""
from __future__ import annotations

import math

import numpy as np

from qregret.bandit import WeaklyAdaptiveMAB
from qregret.policy import Policy, uniform_arm
from qregret.simplex import ProbabilityVector, sample_arm


def exp3_default_eta(n_arms: int, horizon: int) -> float:
    if n_arms == 1:
        return 1.0 / math.sqrt(horizon)
    return math.sqrt(2.0 * math.log(n_arms) / (n_arms * horizon))


class Exp3(Policy):
    """Exponential weights over importance-weighted cumulative gains."""

    name = "exp3"

    def __init__(self, n_arms: int, horizon: int, eta: float | None = None, mix: float = 0.0):
        super().__init__(n_arms)
        if eta is None:
            eta = exp3_default_eta(n_arms, horizon)
        if not eta > 0:
            raise ValueError(f"eta must be positive, got {eta}")
        if not 0.0 <= mix < 1.0:
            raise ValueError(f"mix must lie in [0, 1), got {mix}")
        self.eta = eta
        self.mix = mix
        self.log_weights = np.zeros(n_arms)
        self.last_play_distribution = self.distribution()

    def distribution(self) -> ProbabilityVector:
        z = self.log_weights - self.log_weights.max()
        w = np.exp(z)
        w /= w.sum()
        return ProbabilityVector._trusted((1.0 - self.mix) * w + self.mix / self.n_arms)

    def _choose(self, u_explore: float, u_arm: float) -> int:
        self.last_play_distribution = self.distribution()
        return sample_arm(self.last_play_distribution, u_arm)

    def _update(self, arm: int, observed: float) -> None:
        self.log_weights[arm] += self.eta * observed / self.last_play_distribution[arm]


def exp3_step(state: Exp3, arm: int, observed: float) -> Exp3:
    """Feed ``observed`` for the arm ``state`` just selected."""
    state.feed(arm, observed)
    return state


class FixedArm(Policy):
    def __init__(self, n_arms: int, arm: int):
        super().__init__(n_arms)
        if not 0 <= arm < n_arms:
            raise ValueError(f"fixed arm {arm} out of range for {n_arms} arms")
        self.arm = arm
        self.name = f"fixed:{arm}"

    def _choose(self, u_explore, u_arm):
        return self.arm


class UniformRandom(Policy):
    name = "uniform"

    def _choose(self, u_explore, u_arm):
        return uniform_arm(u_arm, self.n_arms)


class RoundRobin(Policy):
    name = "round_robin"

    def _choose(self, u_explore, u_arm):
        return self.round % self.n_arms


def fixed_uniform_roundrobin_select(kind: str, round: int, u: float, n_arms: int,
                                    arm: int | None = None) -> int:
    """Stateless form of the three non-learning policies (0-based arms)."""
    if kind == "fixed":
        if arm is None or not 0 <= arm < n_arms:
            raise ValueError(f"fixed arm {arm} out of range for {n_arms} arms")
        return arm
    if kind == "uniform":
        return uniform_arm(u, n_arms)
    if kind == "round_robin":
        return round % n_arms
    raise ValueError(f"unknown policy kind {kind!r}")


def best_fixed_arm(services) -> int:
    """argmax_i sum_t S_i(t); the lowest index wins ties."""
    s = np.asarray(services, dtype=float)
    if s.ndim != 2 or s.size == 0:
        raise ValueError(f"need a non-empty T x N matrix, got shape {s.shape}")
    totals = [math.fsum(col) for col in s.T]
    return int(np.argmax(totals))


POLICY_NAMES = ("wamab", "exp3", "uniform", "round_robin", "fixed:<i>")


def validate_policy_id(identifier: str, n_arms: int) -> None:
    if identifier in ("wamab", "exp3", "uniform", "round_robin"):
        return
    if identifier.startswith("fixed:"):
        try:
            arm = int(identifier.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad fixed-arm identifier {identifier!r}") from None
        if not 0 <= arm < n_arms:
            raise ValueError(f"{identifier!r}: arm out of range for {n_arms} arms")
        return
    raise ValueError(f"unknown policy {identifier!r}; expected one of {POLICY_NAMES}")


def make_policy(identifier: str, n_arms: int, horizon: int) -> Policy:
    validate_policy_id(identifier, n_arms)
    if identifier == "wamab":
        return WeaklyAdaptiveMAB(n_arms, horizon)
    if identifier == "exp3":
        return Exp3(n_arms, horizon)
    if identifier == "uniform":
        return UniformRandom(n_arms)
    if identifier == "round_robin":
        return RoundRobin(n_arms)
    return FixedArm(n_arms, int(identifier.split(":", 1)[1]))
