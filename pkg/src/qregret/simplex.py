"""Euclidean geometry of the probability simplex.

The learner's play distribution lives here: projection onto the simplex,
inverse-CDF sampling and mixing with the uniform distribution.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

SUM_TOL = 1e-9


class ProbabilityVector:
    """An immutable point on the probability simplex.

    Construction accepts any non-negative finite vector whose sum is within
    ``SUM_TOL`` of one and renormalizes it; anything further off is rejected.
    """

    __slots__ = ("_w",)

    def __init__(self, weights: Sequence[float] | np.ndarray):
        w = np.array(weights, dtype=float).ravel()
        if w.size < 1:
            raise ValueError("a probability vector needs at least one component")
        if not np.all(np.isfinite(w)):
            raise ValueError(f"non-finite probability weights: {w}")
        if np.any(w < 0):
            raise ValueError(f"negative probability weights: {w}")
        total = w.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        if total != 1.0:
            w = w / total
        w.flags.writeable = False
        self._w = w

    @classmethod
    def _trusted(cls, w: np.ndarray) -> "ProbabilityVector":
        """Wrap a vector already known to be non-negative and finite, skipping
        validation; used on the per-round hot path."""
        total = w.sum()
        if total != 1.0:
            w = w / total
        w.flags.writeable = False
        obj = cls.__new__(cls)
        obj._w = w
        return obj

    @classmethod
    def uniform(cls, n: int) -> "ProbabilityVector":
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def vertex(cls, n: int, i: int) -> "ProbabilityVector":
        if not 0 <= i < n:
            raise ValueError(f"vertex {i} out of range for n={n}")
        w = np.zeros(n)
        w[i] = 1.0
        return cls(w)

    @property
    def weights(self) -> np.ndarray:
        return self._w

    def __len__(self) -> int:
        return self._w.size

    def __getitem__(self, i):
        return self._w[i]

    def __iter__(self):
        return iter(self._w.tolist())

    def __array__(self, dtype=None, copy=None):
        return self._w if dtype is None else self._w.astype(dtype)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProbabilityVector):
            return NotImplemented
        return self._w.shape == other._w.shape and bool(np.array_equal(self._w, other._w))

    def __hash__(self) -> int:
        return hash(self._w.tobytes())

    def __repr__(self) -> str:
        return f"ProbabilityVector({self._w.tolist()})"


def project_to_simplex(v: Sequence[float] | np.ndarray) -> ProbabilityVector:
    """Euclidean projection of ``v`` onto the probability simplex.

    Sort-based threshold method: the projection is ``max(v - theta, 0)`` where
    ``theta`` is chosen so that the result sums to one.
    """
    v = np.asarray(v, dtype=float).ravel()
    if v.size < 1:
        raise ValueError("cannot project an empty vector")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite entries in {v}")
    return ProbabilityVector._trusted(_project(v))


def simplex_threshold(v: np.ndarray) -> float:
    """The KKT threshold ``theta`` with ``sum(max(v - theta, 0)) == 1``."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / ks > 0)[0][-1]
    return float(css[rho] / (rho + 1))


def _project(v: np.ndarray) -> np.ndarray:
    w = np.maximum(v - simplex_threshold(v), 0.0)
    # exact sum-to-one lets ProbabilityVector skip the division in the common case
    s = w.sum()
    return w / s if s != 1.0 else w


def sample_arm(p: ProbabilityVector, u: float) -> int:
    """Inverse-CDF sample: the first index whose cumulative weight exceeds ``u``.

    Intervals are half-open, ``[c_{i-1}, c_i)``, so on a boundary the lower
    index wins only if it actually owns the point. Zero-weight arms are never
    returned.
    """
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u}")
    cdf = np.cumsum(p.weights)
    i = int(np.searchsorted(cdf, u, side="right"))
    # float drift can leave cdf[-1] a hair below 1
    if i >= cdf.size:
        i = int(np.flatnonzero(p.weights > 0)[-1])
    return i


def mix_with_uniform(p: ProbabilityVector, gamma: float) -> ProbabilityVector:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    n = len(p)
    return ProbabilityVector._trusted((1.0 - gamma) * p.weights + gamma / n)
