"""The select/feed protocol shared by every scheduling policy.

Each round the simulator hands the policy a pair of independent uniform
draws, ``(u_explore, u_arm)``; the policy returns an arm index and is then
fed the gain of that arm only (bandit feedback).
"""
from __future__ import annotations

from typing import Sequence

from qregret.errors import ProtocolError

DRAWS_PER_ROUND = 2


class Policy:
    name = "policy"

    def __init__(self, n_arms: int):
        if n_arms < 1:
            raise ValueError(f"n_arms must be >= 1, got {n_arms}")
        self.n_arms = n_arms
        self.round = 0
        self._pending: int | None = None

    def select(self, draws: Sequence[float]) -> int:
        self._begin_round()
        arm = self._choose(draws[0], draws[1])
        self._pending = arm
        return arm

    def feed(self, arm: int, observed: float) -> None:
        if self._pending is None:
            raise ProtocolError(f"{self.name}: feed() without a preceding select()")
        if arm != self._pending:
            raise ProtocolError(f"{self.name}: fed arm {arm} but selected {self._pending}")
        if not 0.0 <= observed <= 1.0:
            raise ValueError(f"{self.name}: observed gain {observed!r} outside [0, 1]")
        self._update(arm, float(observed))
        self._pending = None
        self.round += 1

    def _begin_round(self) -> None:
        if self._pending is not None:
            raise ProtocolError(f"{self.name}: select() called twice in round {self.round + 1}")

    def _choose(self, u_explore: float, u_arm: float) -> int:
        raise NotImplementedError

    def _update(self, arm: int, observed: float) -> None:
        pass

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name} n_arms={self.n_arms} round={self.round}>"


def uniform_arm(u: float, n_arms: int) -> int:
    return min(int(u * n_arms), n_arms - 1)
