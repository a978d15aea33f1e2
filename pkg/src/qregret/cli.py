"""Command-line entry point.

    qregret simulate --config presets/nonstationary_n5.json [--scale 10] [--out results/]
    qregret audit    --config presets/micro.json [--out results/]
    qregret network  --config presets/network_line.json [--out results/]
    qregret oracle   --check lindley|interval|projection [--cases 200]

The master seed in the config can be overridden through the
``QREGRET_MASTER_SEED`` environment variable. On failure a single JSON line
``{"error": ..., "message": ...}`` is written to stderr and the exit code is 1.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from qregret import harness, oracles
from qregret.audit import theorem1_bound, theorem2_bound, write_audit_csv
from qregret.bandit import exploration_probability

log = logging.getLogger("qregret")


def _load(args) -> harness.ExperimentConfig:
    seed = os.environ.get(harness.SEED_ENV_VAR)
    cfg = harness.load_config(args.config, int(seed) if seed else None)
    if getattr(args, "scale", None):
        cfg = cfg.scaled(args.scale)
    if getattr(args, "workers", None):
        cfg = replace(cfg, workers=args.workers)
    return cfg


def cmd_simulate(args) -> int:
    cfg = _load(args)
    log.info("simulate: N=%d T=%d runs=%d seed=%d", cfg.n_arms, cfg.horizon, cfg.num_runs, cfg.master_seed)
    result = harness.run_many(cfg)
    out = harness.emit_csv(result, Path(args.out) / "queue_regret.csv")
    for pid in result.policies:
        print(f"{pid}: mean final queue regret {result.mean[pid][-1]:.4f} "
              f"(stderr {result.stderr[pid][-1]:.4f}, {result.n_runs} runs)")
    print(f"wrote {out}")
    return 0


def _bound_rows(cfg: harness.ExperimentConfig) -> list[dict]:
    N, T, delta = cfg.n_arms, cfg.horizon, cfg.audit.delta
    gamma = exploration_probability(N, T)
    return [
        {"run": "all", "metric": "theorem2_bound", "value": theorem2_bound(N, T, delta)},
        {"run": "all", "metric": "ogd_internal_theorem1_bound", "value": theorem1_bound(N / gamma, T)},
    ]


def cmd_audit(args) -> int:
    cfg = _load(args)
    cfg = replace(cfg, audit=replace(cfg.audit, interval_regret=True, domination=True))
    result = harness.run_many(cfg)
    rows = _bound_rows(cfg) if cfg.audit.bounds else []
    violations = 0
    for run in result.runs:
        for pid, pr in run.policies.items():
            rep = pr.interval
            rows.append({"run": run.run_index, "metric": f"{pid}/queue_regret", "value": pr.final_regret,
                         "interval_end": pr.argmax_slot, "arm": pr.argmax_arm})
            rows.append({"run": run.run_index, "metric": f"{pid}/max_interval_regret", "value": rep.max_regret,
                         "interval_start": rep.interval[0], "interval_end": rep.interval[1], "arm": rep.best_arm})
            rows.append({"run": run.run_index, "metric": f"{pid}/domination_holds", "value": bool(pr.dominated)})
            violations += not pr.dominated
    out = Path(args.out) / "audit.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_audit_csv(out, rows)
    print(f"domination violations: {violations} of {len(result.runs) * len(cfg.policies)}")
    print(f"wrote {out}")
    return 0 if violations == 0 else 3


def cmd_network(args) -> int:
    cfg = _load(args)
    out = Path(args.out) / "network_regret.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["run", "policy", "node", "queue_regret"])
        for r in range(1, cfg.num_runs + 1):
            res = harness.run_network_single(cfg, r)
            for pid in cfg.policies:
                for node, val in res.node_regret[pid].items():
                    w.writerow([r, pid, node, harness.fmt_real(val)])
                w.writerow([r, pid, "*", harness.fmt_real(res.network_regret[pid])])
            assignment = ";".join(f"{v}={a}" for v, a in res.best_assignment.items())
            w.writerow([r, "best_joint_assignment", assignment, harness.fmt_real(res.best_peak)])
            print(f"run {r}: " + ", ".join(f"{pid} R_G={res.network_regret[pid]:.4f} (node {res.worst_node[pid]})"
                                           for pid in cfg.policies))
    print(f"wrote {out}")
    return 0


def _check_lindley(rng: np.random.Generator, cases: int) -> int:
    from qregret.queueing import queue_closed_form, queue_trajectory
    bad = 0
    for _ in range(cases):
        T = int(rng.integers(1, 201))
        a = rng.uniform(0, 5, T)
        s = rng.uniform(0, 5, T)
        fold = queue_trajectory(a, s).lengths[1:]
        closed = queue_closed_form(a - s)
        brute = np.array(oracles.suffix_max_queue(a - s))
        bad += not (np.array_equal(fold, closed) and np.allclose(closed, brute, rtol=0, atol=1e-9))
    return bad


def _check_interval(rng: np.random.Generator, cases: int) -> int:
    from qregret.audit import ScheduleTrace, max_interval_regret
    bad = 0
    for _ in range(cases):
        T, N = int(rng.integers(1, 65)), int(rng.integers(1, 5))
        s = rng.random((T, N))
        trace = ScheduleTrace.from_arms(s, rng.integers(0, N, T))
        rep = max_interval_regret(s, trace)
        brute, _, _ = oracles.interval_regret_enumeration(s, trace.observed_gains)
        bad += rep.max_regret != brute
    return bad


def _check_projection(rng: np.random.Generator, cases: int) -> int:
    from qregret.simplex import project_to_simplex
    bad = 0
    for _ in range(cases):
        n = int(rng.integers(1, 4))
        v = rng.normal(0, 1, n)
        p = project_to_simplex(v).weights
        bad += not np.allclose(p, oracles.projection_grid_search(v), atol=2e-3, rtol=0)
    return bad


CHECKS = {"lindley": _check_lindley, "interval": _check_interval, "projection": _check_projection}


def cmd_oracle(args) -> int:
    rng = np.random.default_rng(args.seed)
    bad = CHECKS[args.check](rng, args.cases)
    status = "PASS" if bad == 0 else "FAIL"
    print(f"{status} {args.check}: {args.cases - bad}/{args.cases} cases agree with the brute-force oracle")
    return 0 if bad == 0 else 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qregret", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--out", default="results", type=Path)
        sp.add_argument("--scale", type=float, default=None, help="shrink horizon and runs by this factor")
        sp.add_argument("--workers", type=int, default=None)
        sp.set_defaults(func=fn)
        return sp

    with_config("simulate", cmd_simulate, "run an experiment and write mean regret curves")
    with_config("audit", cmd_audit, "interval-regret, domination and bound report")
    with_config("network", cmd_network, "network runs with the brute-force joint benchmark")
    sp = sub.add_parser("oracle", help="cross-check fast paths against brute force")
    sp.add_argument("--check", required=True, choices=sorted(CHECKS))
    sp.add_argument("--cases", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - report every failure as one machine-readable line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
