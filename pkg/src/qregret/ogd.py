"""Projected online gradient ascent over the simplex (full-information experts)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qregret.errors import ContractError
from qregret.simplex import ProbabilityVector, _project

# slack on the gain-norm check; estimated gains hit the bound exactly up to rounding
NORM_RTOL = 1e-12


def recommended_step_size(gain_bound: float, horizon: int) -> float:
    """sqrt(2) / (G sqrt(T)), the step that balances the two terms of the
    interval-regret bound."""
    if gain_bound <= 0:
        raise ValueError(f"gain_bound must be positive, got {gain_bound}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    return math.sqrt(2.0) / (gain_bound * math.sqrt(horizon))


@dataclass
class OgdState:
    p: ProbabilityVector
    eta: float
    gain_bound: float
    round: int = 0

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not self.gain_bound > 0:
            raise ValueError(f"gain_bound must be positive, got {self.gain_bound}")

    @property
    def n_arms(self) -> int:
        return len(self.p)

    def update(self, gains) -> "OgdState":
        """One step ``p <- Proj(p + eta * gains)``; mutates and returns self.

        Raises ContractError when ``||gains||_2`` exceeds the declared bound,
        since the regret guarantee is void past that point.
        """
        g = np.asarray(gains, dtype=float)
        if g.shape != (self.n_arms,):
            raise ValueError(f"expected {self.n_arms} gains, got shape {g.shape}")
        norm = math.sqrt(float(g @ g))
        if not norm <= self.gain_bound * (1.0 + NORM_RTOL):
            raise ContractError(
                f"round {self.round + 1}: gain norm {norm!r} exceeds bound {self.gain_bound!r}"
            )
        self.p = ProbabilityVector._trusted(_project(self.p.weights + self.eta * g))
        self.round += 1
        return self


def ogd_init(n_arms: int, eta: float, gain_bound: float,
             p0: ProbabilityVector | None = None) -> OgdState:
    if n_arms < 1:
        raise ValueError(f"n_arms must be >= 1, got {n_arms}")
    if p0 is None:
        p0 = ProbabilityVector.uniform(n_arms)
    elif len(p0) != n_arms:
        raise ValueError(f"p0 has {len(p0)} components, expected {n_arms}")
    return OgdState(p=p0, eta=eta, gain_bound=gain_bound)


def ogd_update(state: OgdState, gains) -> OgdState:
    return state.update(gains)


def run_expert_ogd(gains: np.ndarray, gain_bound: float | None = None,
                   eta: float | None = None) -> np.ndarray:
    """Run OGD on a full gain matrix (T x N) and return the T distributions played.

    Row t of the result is p_t, the distribution in force *before* g_t is
    revealed. ``gain_bound`` defaults to the largest row norm of ``gains``.
    """
    gains = np.asarray(gains, dtype=float)
    T, n = gains.shape
    if gain_bound is None:
        gain_bound = float(np.max(np.linalg.norm(gains, axis=1))) or 1.0
    if eta is None:
        eta = recommended_step_size(gain_bound, T)
    state = ogd_init(n, eta, gain_bound)
    played = np.empty((T, n))
    for t in range(T):
        played[t] = state.p.weights
        state.update(gains[t])
    return played
