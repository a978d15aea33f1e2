#!/usr/bin/env python3
"""Plot mean queue-regret curves (with one-stderr bands) from a results CSV.

Needs matplotlib (``pip install .[plot]``).
"""
import argparse
import csv
from collections import defaultdict
from pathlib import Path

import numpy as np


def load(path):
    cols = defaultdict(lambda: ([], [], []))
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            t, m, s = cols[row["policy"]]
            t.append(int(row["t"]))
            m.append(float(row["mean_queue_regret"]))
            s.append(float(row["stderr"]))
    return {pid: tuple(map(np.asarray, v)) for pid, v in cols.items()}


def plot(csv_path, out_path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for pid, (t, m, s) in load(csv_path).items():
        ax.plot(t, m, label=pid)
        ax.fill_between(t, m - s, m + s, alpha=0.2)
    ax.set_xlabel("t")
    ax.set_ylabel("queue length regret")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    return out_path


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("csv", type=Path)
    ap.add_argument("--out", type=Path)
    a = ap.parse_args()
    print(plot(a.csv, a.out or a.csv.with_suffix(".png")))
