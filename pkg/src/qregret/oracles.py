"""Brute-force reference computations.

Each function here recomputes a quantity straight from its definition with
plain loops, sharing no code with the fast paths it is used to check.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def suffix_max_queue(increments) -> list[float]:
    """Q(t) = max(0, max_{1<=t'<=t} sum_{tau=t'}^{t} b_tau), by direct O(T^2) enumeration."""
    b = [float(x) for x in increments]
    out = []
    for t in range(len(b)):
        best = acc = 0.0
        for start in range(t, -1, -1):
            acc += b[start]
            if acc > best:
                best = acc
        out.append(best)
    return out


def lindley_fold(arrivals, services) -> list[float]:
    """Straight-line Lindley recursion, Q(0) = 0; returns Q(0..T)."""
    q = [0.0]
    for a, s in zip(arrivals, services):
        q.append(max(0.0, q[-1] + (float(a) - float(s))))
    return q


def interval_regret_enumeration(services, policy_gains) -> tuple[float, tuple[int, int], int]:
    """max over arms i and 1-based intervals [start, end] of sum (S_i(t) - gain_t).

    The sum for each start is accumulated left to right. Ties: earliest end,
    then earliest start, then lowest arm.
    """
    s = [list(map(float, row)) for row in np.asarray(services)]
    g = [float(x) for x in policy_gains]
    T, n = len(s), len(s[0])
    best = (-math.inf, None, None)
    for end in range(T):
        for start in range(end + 1):
            for i in range(n):
                acc = 0.0
                for t in range(start, end + 1):
                    acc += s[t][i] - g[t]
                if acc > best[0]:
                    best = (acc, (start + 1, end + 1), i)
    return best


def queue_regret_enumeration(arrivals, services, arms) -> tuple[float, int, int]:
    """Queue-length regret of an arm sequence by a double loop over (t, i)."""
    s = np.asarray(services, dtype=float)
    T, n = s.shape
    pol = lindley_fold(arrivals, [s[t, arms[t]] for t in range(T)])
    fixed = [lindley_fold(arrivals, s[:, i]) for i in range(n)]
    best = (-math.inf, 0, 0)
    for t in range(1, T + 1):
        for i in range(n):
            gap = pol[t] - fixed[i][t]
            if gap > best[0]:
                best = (gap, t, i)
    return best


def projection_grid_search(v, step: float = 1e-3) -> np.ndarray:
    """Closest grid point of the simplex (N <= 3) to v, by exhaustive search."""
    v = np.asarray(v, dtype=float)
    n = v.size
    if n == 1:
        return np.ones(1)
    ticks = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    if n == 2:
        pts = np.column_stack([ticks, 1.0 - ticks])
    elif n == 3:
        x, y = np.meshgrid(ticks, ticks, indexing="ij")
        keep = x + y <= 1.0 + 1e-12
        x, y = x[keep], y[keep]
        pts = np.column_stack([x, y, np.clip(1.0 - x - y, 0.0, None)])
    else:
        raise ValueError("grid search is only tractable for N <= 3")
    return pts[np.argmin(((pts - v) ** 2).sum(axis=1))]


def network_queues_fixed_arms(order, next_hop, exogenous, services, arms_per_node) -> dict:
    """Per-node Q(0..T) for given per-node arm sequences, one-slot forwarding delay.

    ``arms_per_node[v]`` is a length-T sequence of arm indices.
    """
    T = len(next(iter(exogenous.values())))
    q = {v: [0.0] for v in order}
    dep_prev = {v: 0.0 for v in order}
    for t in range(T):
        inflow = {v: float(exogenous[v][t]) for v in order}
        for u in order:
            if next_hop[u] is not None:
                inflow[next_hop[u]] += dep_prev[u]
        dep_now = {}
        for v in order:
            rate = float(services[v][t][arms_per_node[v][t]])
            content = q[v][-1] + inflow[v]
            dep_now[v] = min(content, rate)
            q[v].append(max(0.0, q[v][-1] + (inflow[v] - rate)))
        dep_prev = dep_now
    return q


def network_regret_enumeration(order, next_hop, exogenous, services, policy_arms, n_arms):
    """R_G by re-simulating every joint fixed assignment from scratch.

    Returns ``(R_G, argmax node, per-node regrets)``. Valid for any policy
    whose choices do not depend on queue contents.
    """
    T = len(next(iter(exogenous.values())))
    pol = network_queues_fixed_arms(order, next_hop, exogenous, services, policy_arms)
    per_node = {v: -math.inf for v in order}
    for combo in itertools.product(range(n_arms), repeat=len(order)):
        arms = {v: [combo[k]] * T for k, v in enumerate(order)}
        bench = network_queues_fixed_arms(order, next_hop, exogenous, services, arms)
        for v in order:
            for t in range(1, T + 1):
                per_node[v] = max(per_node[v], pol[v][t] - bench[v][t])
    best_v = max(order, key=lambda v: (per_node[v], -order.index(v)))
    return per_node[best_v], best_v, per_node


def best_joint_assignment_enumeration(order, next_hop, exogenous, services, n_arms):
    """Assignment minimizing the largest queue anywhere in the network, first in
    lexicographic order among ties."""
    T = len(next(iter(exogenous.values())))
    best = (math.inf, None)
    for combo in itertools.product(range(n_arms), repeat=len(order)):
        arms = {v: [combo[k]] * T for k, v in enumerate(order)}
        q = network_queues_fixed_arms(order, next_hop, exogenous, services, arms)
        peak = max(max(q[v]) for v in order)
        if peak < best[0]:
            best = (peak, dict(zip(order, combo)))
    return best[1], best[0]
