"""Seeded channel-rate and arrival generators.

Every random quantity is drawn from its own substream, keyed by
``(master_seed, purpose, node, run, channel)`` through numpy's
``SeedSequence`` spawn keys and the PCG64 bit generator. The purpose label
is hashed with CRC-32 so that keys are stable across processes and Python
versions. Changing how many runs execute, in which order or in how many
worker processes never perturbs any individual stream.
"""
from __future__ import annotations

import csv
import math
import warnings
import zlib
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Union

import numpy as np

from qregret.errors import TraceFormatError

DEFAULT_EPSILON = 0.05


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    purpose: str
    node: int = 0
    run: int = 0
    channel: int = 0

    def key(self) -> tuple[int, ...]:
        return (zlib.crc32(self.purpose.encode()), self.node, self.run, self.channel)

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.key())
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, **changes) -> "RngStream":
        return replace(self, **changes)


# -- channel models ----------------------------------------------------------

@dataclass(frozen=True)
class BlockMarkov:
    """Clamped AR(1) rates whose coefficient is redrawn at each block start.

    ``initial_rate=None`` draws S_i(1) ~ Unif(0, 1) independently per channel.
    """
    num_blocks: int
    initial_rate: float | None = None

    def __post_init__(self):
        if self.num_blocks < 1:
            raise ValueError(f"num_blocks must be >= 1, got {self.num_blocks}")
        if self.initial_rate is not None and not 0.0 <= self.initial_rate <= 1.0:
            raise ValueError(f"initial_rate must lie in [0, 1], got {self.initial_rate}")


@dataclass(frozen=True)
class IidUniform:
    pass


@dataclass(frozen=True)
class ServiceTrace:
    path: Path


ChannelModel = Union[BlockMarkov, IidUniform, ServiceTrace]


def block_markov_step(s: float, alpha: float, zeta: float) -> float:
    """``max(0, min(1, alpha * s + zeta))``."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"rate must lie in [0, 1], got {s}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if not -1.0 <= zeta <= 1.0:
        raise ValueError(f"zeta must lie in [-1, 1], got {zeta}")
    return max(0.0, min(1.0, alpha * s + zeta))


def block_boundaries(T: int, num_blocks: int) -> list[int]:
    """0-based slot indices where blocks start, plus T: ``ceil(k T / m)``."""
    return [-(-k * T // num_blocks) for k in range(num_blocks + 1)]


def block_index(T: int, num_blocks: int) -> np.ndarray:
    """Block of each 0-based slot."""
    bounds = np.array(block_boundaries(T, num_blocks))
    return np.searchsorted(bounds, np.arange(T), side="right") - 1


def _block_markov_channel(T: int, model: BlockMarkov, gen: np.random.Generator) -> np.ndarray:
    # fixed draw order per channel: initial rate, block alphas, noise
    s = model.initial_rate if model.initial_rate is not None else float(gen.random())
    alphas = gen.random(model.num_blocks).tolist()
    zetas = gen.uniform(-1.0, 1.0, size=max(T - 1, 0)).tolist()
    blocks = block_index(T, model.num_blocks).tolist()
    out = np.empty(T)
    out[0] = s
    for t in range(T - 1):
        # the coefficient in force is the one of the block containing slot t
        s = alphas[blocks[t]] * s + zetas[t]
        s = 0.0 if s < 0.0 else (1.0 if s > 1.0 else s)
        out[t + 1] = s
    return out


def generate_service_matrix(model: ChannelModel, T: int, N: int, rng: RngStream) -> np.ndarray:
    """Materialize the full T x N rate matrix before any policy acts."""
    if T < 1 or N < 1:
        raise ValueError(f"need T >= 1 and N >= 1, got T={T}, N={N}")
    if isinstance(model, BlockMarkov):
        cols = [_block_markov_channel(T, model, rng.child(channel=i).generator()) for i in range(N)]
        out = np.column_stack(cols)
    elif isinstance(model, IidUniform):
        out = np.column_stack([rng.child(channel=i).generator().random(T) for i in range(N)])
    elif isinstance(model, ServiceTrace):
        out = read_service_trace(model.path)
        if out.shape != (T, N):
            raise TraceFormatError(f"{model.path}: expected {T} x {N} rates, found {out.shape}")
    else:
        raise TypeError(f"unknown channel model {model!r}")
    out.flags.writeable = False
    return out


# -- arrivals ------------------------------------------------------------------

AUTO = "auto"


@dataclass(frozen=True)
class UniformRate:
    """i.i.d. Unif(0, 2 * rate) arrivals, so the mean is ``rate``.

    ``rate="auto"`` sets it to the best channel's empirical mean rate minus
    ``epsilon``.
    """
    rate: float | str = AUTO
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.rate != AUTO and not (isinstance(self.rate, (int, float)) and self.rate >= 0):
            raise ValueError(f"rate must be 'auto' or a non-negative number, got {self.rate!r}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")


@dataclass(frozen=True)
class ConstantAtLeastOne:
    """A(t) = value >= 1 every slot; with rates in [0, 1] the queue never empties."""
    value: float = 1.0

    def __post_init__(self):
        if self.value < 1.0:
            raise ValueError(f"value must be >= 1, got {self.value}")


@dataclass(frozen=True)
class ArrivalTrace:
    path: Path


ArrivalModel = Union[UniformRate, ConstantAtLeastOne, ArrivalTrace]


def auto_rate(services, epsilon: float = DEFAULT_EPSILON) -> float:
    s = np.asarray(services, dtype=float)
    lam = float(np.max(s.mean(axis=0))) - epsilon
    if lam < 0:
        warnings.warn(f"auto arrival rate {lam:.4g} < 0 clamped to 0", RuntimeWarning, stacklevel=2)
        lam = 0.0
    return lam


def resolve_rate(model: UniformRate, services=None) -> float:
    if model.rate != AUTO:
        return float(model.rate)
    if services is None:
        raise ValueError("rate='auto' needs the service matrix")
    return auto_rate(services, model.epsilon)


def generate_arrivals(model: ArrivalModel, T: int, rng: RngStream, services=None) -> np.ndarray:
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if isinstance(model, UniformRate):
        lam = resolve_rate(model, services)
        out = rng.generator().uniform(0.0, 2.0 * lam, size=T)
    elif isinstance(model, ConstantAtLeastOne):
        out = np.full(T, float(model.value))
    elif isinstance(model, ArrivalTrace):
        out = read_arrival_trace(model.path)
        if out.shape != (T,):
            raise TraceFormatError(f"{model.path}: expected {T} arrivals, found {out.size}")
    else:
        raise TypeError(f"unknown arrival model {model!r}")
    out.flags.writeable = False
    return out


# -- trace files ---------------------------------------------------------------

def _read_rows(path: Path, expect_prefix: str) -> tuple[list[str], list[list[float]]]:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise TraceFormatError(f"{path}: {exc}") from exc
    if not rows:
        raise TraceFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "t" or len(header) < 2 or not all(h.startswith(expect_prefix) for h in header[1:]):
        raise TraceFormatError(f"{path}: bad header {header}")
    body = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise TraceFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(x) for x in row]
        except ValueError as exc:
            raise TraceFormatError(f"{path}:{lineno}: {exc}") from exc
        if not all(math.isfinite(v) for v in vals):
            raise TraceFormatError(f"{path}:{lineno}: non-finite value")
        body.append(vals)
    if not body:
        raise TraceFormatError(f"{path}: no data rows")
    return header, body


def read_service_trace(path) -> np.ndarray:
    """CSV with header ``t,s1,...,sN``; rates must lie in [0, 1]."""
    header, body = _read_rows(path, "s")
    rates = np.array([row[1:] for row in body], dtype=float)
    if np.any(rates < 0) or np.any(rates > 1):
        raise TraceFormatError(f"{path}: rates outside [0, 1]")
    return rates


def read_arrival_trace(path) -> np.ndarray:
    """CSV with header ``t,a``; arrivals must be non-negative."""
    header, body = _read_rows(path, "a")
    if len(header) != 2:
        raise TraceFormatError(f"{path}: expected header t,a")
    arrivals = np.array([row[1] for row in body], dtype=float)
    if np.any(arrivals < 0):
        raise TraceFormatError(f"{path}: negative arrivals")
    return arrivals


def write_service_trace(path, services) -> None:
    s = np.asarray(services, dtype=float)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"s{i + 1}" for i in range(s.shape[1])])
        for t, row in enumerate(s, start=1):
            w.writerow([t] + [repr(float(x)) for x in row])


def write_arrival_trace(path, arrivals) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "a"])
        for t, a in enumerate(np.asarray(arrivals, dtype=float), start=1):
            w.writerow([t, repr(float(a))])
