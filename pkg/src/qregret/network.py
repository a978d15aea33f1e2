"""Per-node channel scheduling in a network with fixed routing.

Every node runs its own policy on its own channels. Departures from a node
join its next hop's queue one slot later; packets leaving a node with no next
hop are delivered to a sink. The network regret is the worst per-node
queue-length regret, benchmarked against joint fixed channel assignments.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from qregret.audit import ScheduleTrace
from qregret.errors import EnumerationLimitError, TraceFormatError
from qregret.policy import Policy
from qregret.queueing import QueueTrace

MAX_JOINT_ASSIGNMENTS = 10 ** 6
SINK_TOKENS = ("", "sink", "-")


@dataclass(frozen=True)
class NetworkTopology:
    nodes: tuple[str, ...]
    next_hop: Mapping[str, str | None]
    exogenous: frozenset[str]
    channels_per_node: int

    def __post_init__(self):
        if not self.nodes:
            raise ValueError("a network needs at least one node")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError(f"duplicate node ids in {self.nodes}")
        if self.channels_per_node < 1:
            raise ValueError("channels_per_node must be >= 1")
        known = set(self.nodes)
        for v in self.nodes:
            if v not in self.next_hop:
                raise ValueError(f"node {v!r} has no routing entry")
            nh = self.next_hop[v]
            if nh is not None and nh not in known:
                raise ValueError(f"node {v!r} routes to unknown node {nh!r}")
        unknown = set(self.exogenous) - known
        if unknown:
            raise ValueError(f"exogenous arrivals at unknown nodes {sorted(unknown)}")
        for v in self.nodes:
            seen = {v}
            u = self.next_hop[v]
            while u is not None:
                if u in seen:
                    raise ValueError(f"routing cycle through {u!r}")
                seen.add(u)
                u = self.next_hop[u]

    @classmethod
    def line(cls, n_nodes: int, channels_per_node: int) -> "NetworkTopology":
        """Tandem 0 -> 1 -> ... -> sink with external traffic entering node 0."""
        nodes = tuple(str(k) for k in range(n_nodes))
        hops = {v: (nodes[k + 1] if k + 1 < n_nodes else None) for k, v in enumerate(nodes)}
        return cls(nodes, hops, frozenset(nodes[:1]), channels_per_node)

    @classmethod
    def single(cls, channels_per_node: int) -> "NetworkTopology":
        return cls.line(1, channels_per_node)

    def upstream(self) -> dict[str, list[str]]:
        up = {v: [] for v in self.nodes}
        for u in self.nodes:
            if self.next_hop[u] is not None:
                up[self.next_hop[u]].append(u)
        return up


def read_topology(path, channels_per_node: int) -> NetworkTopology:
    """CSV with header ``node,next_hop,exogenous``; an empty next_hop (or
    ``sink``) means packets leave the network."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise TraceFormatError(f"{path}: {exc}") from exc
    if not rows or [h.strip() for h in rows[0]] != ["node", "next_hop", "exogenous"]:
        raise TraceFormatError(f"{path}: header must be node,next_hop,exogenous")
    nodes, hops, exo = [], {}, set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise TraceFormatError(f"{path}:{lineno}: expected 3 fields")
        v, nh, flag = (x.strip() for x in row)
        if flag not in ("0", "1"):
            raise TraceFormatError(f"{path}:{lineno}: exogenous must be 0 or 1")
        nodes.append(v)
        hops[v] = None if nh in SINK_TOKENS else nh
        if flag == "1":
            exo.add(v)
    try:
        return NetworkTopology(tuple(nodes), hops, frozenset(exo), channels_per_node)
    except ValueError as exc:
        raise TraceFormatError(f"{path}: {exc}") from exc


@dataclass
class NetworkTrace:
    queues: dict[str, QueueTrace]
    schedules: dict[str, ScheduleTrace]
    arrivals: dict[str, np.ndarray] = field(default_factory=dict)


def _simulate(topology: NetworkTopology, services, exogenous, choose, feed, T: int) -> NetworkTrace:
    order = topology.nodes
    up = topology.upstream()
    rows = {v: np.asarray(services[v], dtype=float).tolist() for v in order}
    exo = {v: (np.asarray(exogenous[v], dtype=float).tolist() if v in exogenous else [0.0] * T)
           for v in order}
    lengths = {v: np.zeros(T + 1) for v in order}
    deps = {v: np.empty(T) for v in order}
    arrs = {v: np.empty(T) for v in order}
    arms = {v: np.empty(T, dtype=int) for v in order}
    gains = {v: np.empty(T) for v in order}
    q = {v: 0.0 for v in order}
    prev = {v: 0.0 for v in order}
    for t in range(T):
        now = {}
        for v in order:
            a = exo[v][t]
            for u in up[v]:
                a += prev[u]
            arm = choose(v, t)
            rate = rows[v][t][arm]
            feed(v, arm, rate)
            nxt = q[v] + (a - rate)
            now[v] = min(q[v] + a, rate)
            q[v] = nxt if nxt > 0.0 else 0.0
            lengths[v][t + 1] = q[v]
            deps[v][t] = now[v]
            arrs[v][t] = a
            arms[v][t] = arm
            gains[v][t] = rate
        prev = now
    return NetworkTrace(
        queues={v: QueueTrace(lengths[v], deps[v]) for v in order},
        schedules={v: ScheduleTrace(arms[v], gains[v]) for v in order},
        arrivals=arrs,
    )


def _check_inputs(topology, services, T):
    N = topology.channels_per_node
    for v in topology.nodes:
        if v not in services:
            raise ValueError(f"no service matrix for node {v!r}")
        shape = np.shape(services[v])
        if shape != (T, N):
            raise ValueError(f"node {v!r}: services have shape {shape}, expected {(T, N)}")


def simulate_network(topology: NetworkTopology, services: Mapping[str, np.ndarray],
                     exogenous: Mapping[str, np.ndarray], policies: Mapping[str, Policy],
                     T: int, draws: Mapping[str, np.ndarray]) -> NetworkTrace:
    """Slot-synchronous run of independent per-node policies.

    ``draws[v]`` holds the T x 2 uniforms of node v's policy. Each policy sees
    only the rate of the channel it picked at its own node.
    """
    _check_inputs(topology, services, T)

    def choose(v, t):
        return policies[v].select(draws[v][t])

    def feed(v, arm, rate):
        policies[v].feed(arm, rate)

    return _simulate(topology, services, exogenous, choose, feed, T)


def simulate_assignment(topology: NetworkTopology, services, exogenous,
                        assignment: Mapping[str, int], T: int) -> NetworkTrace:
    """Every node transmits on its assigned channel for the whole horizon."""
    _check_inputs(topology, services, T)
    return _simulate(topology, services, exogenous,
                     lambda v, t: assignment[v], lambda v, arm, rate: None, T)


def joint_assignments(topology: NetworkTopology):
    """All N^|V| assignments in lexicographic order (node order, then arm)."""
    n = len(topology.nodes)
    count = topology.channels_per_node ** n
    if count > MAX_JOINT_ASSIGNMENTS:
        raise EnumerationLimitError(
            f"{count} joint assignments exceed the limit of {MAX_JOINT_ASSIGNMENTS}; "
            "pass an explicit subset of assignments instead")
    for combo in itertools.product(range(topology.channels_per_node), repeat=n):
        yield tuple(combo)


def benchmark_traces(topology: NetworkTopology, services, exogenous, T: int,
                     assignments=None) -> dict[tuple[int, ...], NetworkTrace]:
    """Traces keyed by assignment tuple (arm per node, in node order)."""
    if assignments is None:
        assignments = joint_assignments(topology)
    return {a: simulate_assignment(topology, services, exogenous,
                                   dict(zip(topology.nodes, a)), T)
            for a in assignments}


def per_node_regret(policy_trace: NetworkTrace, benchmarks: Mapping) -> dict[str, float]:
    """R_{Q,v} = max_t max_a (Q^pi_v(t) - Q^a_v(t))."""
    if not benchmarks:
        raise ValueError("need at least one benchmark assignment")
    out = {}
    for v, qt in policy_trace.queues.items():
        pol = qt.lengths[1:]
        out[v] = max(float(np.max(pol - b.queues[v].lengths[1:])) for b in benchmarks.values())
    return out


def network_regret(policy_trace: NetworkTrace, benchmarks: Mapping) -> tuple[float, str]:
    """``(R_G, argmax node)``; the earliest node wins ties."""
    per = per_node_regret(policy_trace, benchmarks)
    best = max(per, key=lambda v: per[v])
    return per[best], best


def best_joint_assignment(topology: NetworkTopology, services, exogenous,
                          T: int) -> tuple[dict[str, int], float]:
    """The assignment with the smallest peak queue over all nodes and slots;
    ties resolved lexicographically."""
    return best_of_benchmarks(topology, benchmark_traces(topology, services, exogenous, T))


def best_of_benchmarks(topology: NetworkTopology, benchmarks: Mapping) -> tuple[dict[str, int], float]:
    best_peak, best = math.inf, None
    for a in sorted(benchmarks):
        peak = max(float(q.lengths.max()) for q in benchmarks[a].queues.values())
        if peak < best_peak:
            best_peak, best = peak, a
    return dict(zip(topology.nodes, best)), best_peak
