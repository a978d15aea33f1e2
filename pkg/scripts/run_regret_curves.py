#!/usr/bin/env python3
"""Mean queue-length regret curves for the bandit policy against EXP3 and
uniform random scheduling under block-Markov channels.

    python scripts/run_regret_curves.py                      # full preset (slow)
    python scripts/run_regret_curves.py --horizon 2000 --runs 100 --blocks 4
    python scripts/run_regret_curves.py --scale 20 --plot
"""
import argparse
import logging
import time
from dataclasses import replace
from pathlib import Path

from qregret import harness
from qregret.environments import BlockMarkov

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--config", type=Path, default=ROOT / "presets" / "nonstationary_n5.json")
    ap.add_argument("--horizon", type=int)
    ap.add_argument("--runs", type=int)
    ap.add_argument("--blocks", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--scale", type=float)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=ROOT / "results" / "regret_curves.csv")
    ap.add_argument("--plot", action="store_true", help="also write a PNG next to the CSV")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = harness.load_config(args.config, args.seed)
    if args.scale:
        cfg = cfg.scaled(args.scale)
    if args.horizon:
        cfg = replace(cfg, horizon=args.horizon)
    if args.runs:
        cfg = replace(cfg, num_runs=args.runs)
    if args.blocks:
        cfg = replace(cfg, channel=BlockMarkov(args.blocks, getattr(cfg.channel, "initial_rate", None)))
    cfg = replace(cfg, audit=harness.AuditFlags(interval_regret=False, domination=False))

    t0 = time.perf_counter()
    agg = harness.run_many(cfg, workers=args.workers)
    logging.info("N=%d T=%d runs=%d in %.1fs", cfg.n_arms, cfg.horizon, cfg.num_runs, time.perf_counter() - t0)
    for pid in agg.policies:
        logging.info("%-12s final mean %.3f  stderr %.3f", pid, agg.mean[pid][-1], agg.stderr[pid][-1])
    harness.emit_csv(agg, args.out)
    logging.info("wrote %s", args.out)
    if args.plot:
        from plot_curves import plot
        plot(args.out, args.out.with_suffix(".png"))


if __name__ == "__main__":
    main()
