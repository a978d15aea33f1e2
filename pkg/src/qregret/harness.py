"""Declarative experiments: config parsing, per-run pipeline, aggregation, CSV.

A run is fully determined by ``(config, master_seed, run_index)``: every
random input is drawn from a substream keyed by those values, so runs can be
executed in any order and in any number of worker processes.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from qregret import environments as env
from qregret.audit import (IntervalRegretReport, check_pathwise_domination,
                           max_interval_regret)
from qregret.baselines import make_policy, validate_policy_id
from qregret.errors import RunError
from qregret.queueing import (fixed_arm_queues, queue_length_regret,
                              queue_regret_curve)
from qregret.simulation import play, policy_draws, served_queue

SCHEMA_VERSION = 1
SEED_ENV_VAR = "QREGRET_MASTER_SEED"
CSV_HEADER = ("policy", "t", "mean_queue_regret", "stderr", "n_runs")


@dataclass(frozen=True)
class AuditFlags:
    interval_regret: bool = True
    domination: bool = True
    bounds: bool = False
    delta: float = 0.1


@dataclass(frozen=True)
class ExperimentConfig:
    n_arms: int
    horizon: int
    channel: env.ChannelModel
    arrivals: env.ArrivalModel
    policies: tuple[str, ...]
    num_runs: int = 1
    master_seed: int = 0
    audit: AuditFlags = field(default_factory=AuditFlags)
    topology: Path | None = None
    workers: int = 1

    def __post_init__(self):
        if self.n_arms < 1:
            raise ValueError(f"n_arms must be >= 1, got {self.n_arms}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.num_runs < 1:
            raise ValueError(f"num_runs must be >= 1, got {self.num_runs}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if len(set(self.policies)) != len(self.policies):
            raise ValueError(f"duplicate policies in {self.policies}")
        for pid in self.policies:
            validate_policy_id(pid, self.n_arms)

    def scaled(self, k: float) -> "ExperimentConfig":
        """Shrink the horizon and the number of runs by a factor ``k``."""
        if k < 1:
            raise ValueError(f"scale factor must be >= 1, got {k}")
        T = max(1, math.ceil(self.horizon / k))
        channel = self.channel
        if isinstance(channel, env.BlockMarkov) and channel.num_blocks > T:
            channel = replace(channel, num_blocks=T)
        return replace(self, horizon=T, channel=channel,
                       num_runs=max(1, math.ceil(self.num_runs / k)))

    # -- JSON ------------------------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict, base_dir: Path | None = None) -> "ExperimentConfig":
        version = d.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION}")
        unknown = set(d) - _CONFIG_FIELDS
        if unknown:
            raise ValueError(f"unknown config fields {sorted(unknown)}")
        base_dir = Path(base_dir or ".")
        try:
            topo = d.get("topology")
            return cls(
                n_arms=int(d["n_arms"]),
                horizon=int(d["horizon"]),
                channel=_channel_from_dict(d["channel"], base_dir),
                arrivals=_arrivals_from_dict(d["arrivals"], base_dir),
                policies=tuple(d["policies"]),
                num_runs=int(d.get("num_runs", 1)),
                master_seed=int(d.get("master_seed", 0)),
                audit=AuditFlags(**d.get("audit", {})),
                topology=(base_dir / topo) if topo else None,
                workers=int(d.get("workers", 1)),
            )
        except KeyError as exc:
            raise ValueError(f"missing config field {exc}") from None

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "n_arms": self.n_arms,
            "horizon": self.horizon,
            "channel": _channel_to_dict(self.channel),
            "arrivals": _arrivals_to_dict(self.arrivals),
            "policies": list(self.policies),
            "num_runs": self.num_runs,
            "master_seed": self.master_seed,
            "audit": vars(self.audit).copy(),
            "topology": str(self.topology) if self.topology else None,
            "workers": self.workers,
        }


_CONFIG_FIELDS = {"schema_version", "n_arms", "horizon", "channel", "arrivals", "policies",
                  "num_runs", "master_seed", "audit", "topology", "workers"}


def _channel_from_dict(d: dict, base: Path) -> env.ChannelModel:
    kind = d.get("kind")
    if kind == "block_markov":
        return env.BlockMarkov(int(d["num_blocks"]), d.get("initial_rate"))
    if kind == "iid_uniform":
        return env.IidUniform()
    if kind == "trace":
        return env.ServiceTrace(base / d["path"])
    raise ValueError(f"unknown channel kind {kind!r}")


def _channel_to_dict(m: env.ChannelModel) -> dict:
    if isinstance(m, env.BlockMarkov):
        return {"kind": "block_markov", "num_blocks": m.num_blocks, "initial_rate": m.initial_rate}
    if isinstance(m, env.IidUniform):
        return {"kind": "iid_uniform"}
    return {"kind": "trace", "path": str(m.path)}


def _arrivals_from_dict(d: dict, base: Path) -> env.ArrivalModel:
    kind = d.get("kind")
    if kind == "uniform_rate":
        rate = d.get("rate", env.AUTO)
        return env.UniformRate(rate if rate == env.AUTO else float(rate),
                               float(d.get("epsilon", env.DEFAULT_EPSILON)))
    if kind == "constant":
        return env.ConstantAtLeastOne(float(d.get("value", 1.0)))
    if kind == "trace":
        return env.ArrivalTrace(base / d["path"])
    raise ValueError(f"unknown arrival kind {kind!r}")


def _arrivals_to_dict(m: env.ArrivalModel) -> dict:
    if isinstance(m, env.UniformRate):
        return {"kind": "uniform_rate", "rate": m.rate, "epsilon": m.epsilon}
    if isinstance(m, env.ConstantAtLeastOne):
        return {"kind": "constant", "value": m.value}
    return {"kind": "trace", "path": str(m.path)}


def load_config(path, seed_override: int | None = None) -> ExperimentConfig:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        cfg = ExperimentConfig.from_dict(json.load(fh), base_dir=path.parent)
    if seed_override is not None:
        cfg = replace(cfg, master_seed=seed_override)
    return cfg


# -- single run ----------------------------------------------------------------

@dataclass
class Environment:
    services: np.ndarray
    arrivals: np.ndarray


def make_environment(config: ExperimentConfig, run_index: int, node: int = 0) -> Environment:
    seed = config.master_seed
    services = env.generate_service_matrix(
        config.channel, config.horizon, config.n_arms,
        env.RngStream(seed, "channel", node=node, run=run_index))
    arrivals = env.generate_arrivals(
        config.arrivals, config.horizon,
        env.RngStream(seed, "arrivals", node=node, run=run_index), services)
    return Environment(services, arrivals)


def policy_stream(config: ExperimentConfig, policy_id: str, run_index: int, node: int = 0) -> env.RngStream:
    return env.RngStream(config.master_seed, f"policy:{policy_id}", node=node, run=run_index)


@dataclass
class PolicyRun:
    curve: np.ndarray                     # R_Q(t), t = 1..T, running maximum
    final_regret: float
    argmax_slot: int
    argmax_arm: int
    interval: IntervalRegretReport | None = None
    dominated: bool | None = None


@dataclass(eq=False)
class RunResult:
    """Equality compares every deterministic field; wall-clock time is ignored."""

    run_index: int
    policies: dict[str, PolicyRun]
    wall_clock: float = 0.0

    def __eq__(self, other):
        if not isinstance(other, RunResult):
            return NotImplemented
        return self.fingerprint() == other.fingerprint()

    __hash__ = None

    def fingerprint(self) -> str:
        """Digest of every deterministic field (wall-clock excluded)."""
        h = hashlib.sha256(str(self.run_index).encode())
        for pid, pr in self.policies.items():
            h.update(pid.encode())
            h.update(pr.curve.tobytes())
            h.update(repr((pr.final_regret, pr.argmax_slot, pr.argmax_arm, pr.dominated)).encode())
            if pr.interval is not None:
                rep = pr.interval
                h.update(repr((rep.max_regret, rep.interval, rep.best_arm, rep.accounting)).encode())
        return h.hexdigest()


def run_single(config: ExperimentConfig, run_index: int) -> RunResult:
    """Simulate every listed policy and the N fixed-arm benchmarks on one
    shared environment, then compute the regret curve and requested audits."""
    start = time.perf_counter()
    try:
        e = make_environment(config, run_index)
        fixed = fixed_arm_queues(e.arrivals, e.services)
        out = {}
        for pid in config.policies:
            policy = make_policy(pid, config.n_arms, config.horizon)
            trace = play(policy, e.services, policy_draws(policy_stream(config, pid, run_index), config.horizon))
            q = served_queue(e.arrivals, trace)
            curve = queue_regret_curve(q, fixed)
            value, slot, arm = queue_length_regret(q, fixed)
            pr = PolicyRun(curve, value, slot, arm)
            if config.audit.interval_regret or config.audit.domination:
                pr.interval = max_interval_regret(e.services, trace)
            if config.audit.domination:
                pr.dominated = check_pathwise_domination(value, pr.interval)
            out[pid] = pr
    except Exception as exc:
        raise RunError(run_index, exc) from exc
    return RunResult(run_index, out, time.perf_counter() - start)


# -- many runs -----------------------------------------------------------------

@dataclass
class AggregateResult:
    policies: tuple[str, ...]
    mean: dict[str, np.ndarray]
    stderr: dict[str, np.ndarray]
    n_runs: int
    runs: list[RunResult] = field(default_factory=list, repr=False)


def aggregate(results: Sequence[RunResult], policies: Sequence[str]) -> AggregateResult:
    """Per-slot mean and standard error of the regret curves, accumulated in
    run-index order whatever order ``results`` arrive in."""
    ordered = sorted(results, key=lambda r: r.run_index)
    n = len(ordered)
    if n == 0:
        raise ValueError("nothing to aggregate")
    mean, se = {}, {}
    for pid in policies:
        stack = np.stack([r.policies[pid].curve for r in ordered])
        mean[pid] = stack.mean(axis=0)
        se[pid] = stack.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(stack.shape[1])
    return AggregateResult(tuple(policies), mean, se, n, list(ordered))


def _run_one(args):
    config, run_index = args
    return run_single(config, run_index)


def run_many(config: ExperimentConfig, workers: int | None = None) -> AggregateResult:
    """Runs 1..num_runs, in parallel when ``workers`` > 1. The first failing
    run aborts the batch with a RunError naming it."""
    workers = config.workers if workers is None else workers
    jobs = [(config, r) for r in range(1, config.num_runs + 1)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_run_one(j) for j in jobs]
    return aggregate(results, config.policies)


def fmt_real(x: float) -> str:
    return f"{float(x):.9g}"


def emit_csv(result: AggregateResult, path) -> Path:
    """Write ``policy,t,mean_queue_regret,stderr,n_runs`` rows, slot-major:
    all policies for t = 1, then t = 2, and so on."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            if result.policies:
                T = result.mean[result.policies[0]].size
                for t in range(T):
                    for pid in result.policies:
                        w.writerow([pid, t + 1, fmt_real(result.mean[pid][t]),
                                    fmt_real(result.stderr[pid][t]), result.n_runs])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


# -- network runs ----------------------------------------------------------------

@dataclass
class NetworkRunResult:
    run_index: int
    network_regret: dict[str, float]          # policy -> R_G
    worst_node: dict[str, str]
    node_regret: dict[str, dict[str, float]]  # policy -> node -> R_{Q,v}
    best_assignment: dict[str, int]
    best_peak: float


def network_environment(config: ExperimentConfig, topology, run_index: int):
    """Per-node services and exogenous arrivals; node k uses substream node=k,
    so a one-node network sees exactly the single-queue environment."""
    services, exogenous = {}, {}
    for k, v in enumerate(topology.nodes):
        e = make_environment(config, run_index, node=k)
        services[v] = e.services
        exogenous[v] = e.arrivals if v in topology.exogenous else np.zeros(config.horizon)
    return services, exogenous


def run_network_single(config: ExperimentConfig, run_index: int, topology=None) -> NetworkRunResult:
    """Every node runs its own instance of each listed policy; regret is
    benchmarked against all joint fixed channel assignments."""
    from qregret import network as net

    try:
        if topology is None:
            if config.topology is None:
                raise ValueError("network runs need a topology")
            topology = net.read_topology(config.topology, config.n_arms)
        T = config.horizon
        services, exogenous = network_environment(config, topology, run_index)
        benches = net.benchmark_traces(topology, services, exogenous, T)
        regret, worst, per_node = {}, {}, {}
        for pid in config.policies:
            policies = {v: make_policy(pid, config.n_arms, T) for v in topology.nodes}
            draws = {v: policy_draws(policy_stream(config, pid, run_index, node=k), T)
                     for k, v in enumerate(topology.nodes)}
            trace = net.simulate_network(topology, services, exogenous, policies, T, draws)
            per_node[pid] = net.per_node_regret(trace, benches)
            regret[pid], worst[pid] = net.network_regret(trace, benches)
        best, peak = net.best_of_benchmarks(topology, benches)
    except Exception as exc:
        raise RunError(run_index, exc) from exc
    return NetworkRunResult(run_index, regret, worst, per_node, best, peak)
