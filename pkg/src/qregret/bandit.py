"""Weakly adaptive adversarial bandit: uniform exploration mixed with OGD
driven by importance-weighted gain estimates."""
from __future__ import annotations

import math
import warnings

import numpy as np

from qregret.errors import ContractError, HorizonWarning
from qregret.ogd import OgdState, ogd_init
from qregret.policy import Policy, uniform_arm
from qregret.simplex import ProbabilityVector, mix_with_uniform, sample_arm


def exploration_probability(n_arms: int, horizon: int) -> float:
    """gamma = min(1, sqrt(N) * T^(-1/4))."""
    if n_arms < 1 or horizon < 1:
        raise ValueError(f"need n_arms >= 1 and horizon >= 1, got {n_arms}, {horizon}")
    return min(1.0, math.sqrt(n_arms) * horizon ** -0.25)


def internal_step_size(n_arms: int, horizon: int, gamma: float) -> float:
    return math.sqrt(2.0) * gamma / (n_arms * math.sqrt(horizon))


def estimate_gain(observed: float, arm: int, play_distribution: ProbabilityVector) -> np.ndarray:
    """Inverse-propensity estimate: ``observed / P(arm)`` at ``arm``, zero elsewhere.

    ``play_distribution`` must be the law the arm was actually drawn from,
    i.e. the mixture with uniform exploration, not the OGD iterate.
    """
    prob = play_distribution[arm]
    if not prob > 0:
        raise ContractError(f"arm {arm} was chosen with zero probability")
    g = np.zeros(len(play_distribution))
    g[arm] = observed / prob
    return g


class WeaklyAdaptiveMAB(Policy):
    """Bandit policy with uniformly bounded regret over every sub-interval of [T].

    With probability ``gamma`` the arm is uniform over all N arms, otherwise it
    is drawn from the OGD iterate ``p_t``. The OGD subroutine is fed the
    importance-weighted estimate of the gain vector, whose norm is at most
    N / gamma, with step size sqrt(2) gamma / (N sqrt(T)).
    """

    name = "wamab"

    def __init__(self, n_arms: int, horizon: int):
        super().__init__(n_arms)
        if horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {horizon}")
        if horizon < n_arms ** 2:
            warnings.warn(
                f"horizon {horizon} < n_arms^2 = {n_arms ** 2}: the high-probability "
                "regret bound does not apply", HorizonWarning, stacklevel=2)
        self.horizon = horizon
        self.gamma = exploration_probability(n_arms, horizon)
        self.ogd: OgdState = ogd_init(
            n_arms,
            eta=internal_step_size(n_arms, horizon, self.gamma),
            gain_bound=n_arms / self.gamma,
        )
        self.last_play_distribution = mix_with_uniform(self.ogd.p, self.gamma)

    @property
    def p(self) -> ProbabilityVector:
        return self.ogd.p

    def select_with_distribution(self, u_explore: float, u_arm: float) -> tuple[int, ProbabilityVector]:
        """Draw J_t and return it with the sampling law (1 - gamma) p_t + gamma / N."""
        self._begin_round()
        arm = self._choose(u_explore, u_arm)
        self._pending = arm
        return arm, self.last_play_distribution

    def _choose(self, u_explore: float, u_arm: float) -> int:
        self.last_play_distribution = mix_with_uniform(self.ogd.p, self.gamma)
        if u_explore < self.gamma:
            return uniform_arm(u_arm, self.n_arms)
        return sample_arm(self.ogd.p, u_arm)

    def _update(self, arm: int, observed: float) -> None:
        self.ogd.update(estimate_gain(observed, arm, self.last_play_distribution))


def wamab_init(n_arms: int, horizon: int) -> WeaklyAdaptiveMAB:
    return WeaklyAdaptiveMAB(n_arms, horizon)
