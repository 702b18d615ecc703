"""Seeded Bernoulli source and Monte Carlo redundancy benchmark.

The source is splitmix64: the state advances by the golden-ratio increment
and each output goes through two xor-shift-multiply rounds.  A bit is 1 when
the top 53 bits of an output, read as a fraction of 2**53, fall below ``p``.
Iteration ``i`` of a benchmark draws its bits from the stream seeded with
``mix64(seed ^ i)``, so iterations are independent of each other and of the
order they run in.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bitio import BitStream
from .codebook import ContextSet, build_context_set
from .codec import AdaptiveCoderState, decode_adaptive, encode_adaptive
from .densities import entropy
from .errors import BladeError, ContractViolation

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1

CSV_HEADER = ("n", "p", "m", "total_bits_avg", "rate")


class RoundTripError(BladeError):
    """Decoded blocks differ from the encoded ones."""


def mix64(z: int) -> int:
    """splitmix64 output function on a single 64-bit value."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def splitmix64(seed: int, count: int):
    """The first ``count`` outputs of splitmix64 started at ``seed``."""
    steps = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = np.uint64(seed & MASK64) + steps * np.uint64(GOLDEN_GAMMA)
        return _mix64_array(state)


def _bits_from_outputs(z, p: float):
    return ((z >> np.uint64(11)).astype(np.float64) * 2.0 ** -53 < p).astype(np.uint8)


def bernoulli_bits(p: float, count: int, seed: int):
    """``count`` deterministic Bernoulli(p) bits as a uint8 array."""
    if not 0 < p < 1:
        raise ContractViolation(f"p={p} outside (0, 1)")
    if count < 0:
        raise ContractViolation(f"count={count} is negative")
    return _bits_from_outputs(splitmix64(seed, count), p)


def iteration_seed(seed: int, i: int) -> int:
    return mix64(seed ^ i)


def _iteration_bits(p: float, per_iter: int, seed: int, first: int, count: int):
    """Bits of iterations ``first .. first+count-1`` as a (count, per_iter) array."""
    seeds = np.array([iteration_seed(seed, i) for i in range(first, first + count)],
                     dtype=np.uint64)
    steps = np.arange(1, per_iter + 1, dtype=np.uint64) * np.uint64(GOLDEN_GAMMA)
    with np.errstate(over="ignore"):
        z = _mix64_array(seeds[:, None] + steps[None, :])
    return _bits_from_outputs(z, p)


def pack_blocks(bits, n: int):
    """Rows of bits -> rows of n-bit block values, first bit most significant."""
    bits = np.asarray(bits)
    weights = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)
    return bits.reshape(*bits.shape[:-1], -1, n).astype(np.int64) @ weights


@lru_cache(maxsize=None)
def context_set_for(n: int) -> ContextSet:
    return build_context_set(n)


@dataclass(frozen=True)
class BenchConfig:
    n: int = 16
    p: float = 0.5
    m: tuple = (1, 2, 4, 10, 64)
    Q: int = 10_000
    seed: int = 1
    output: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if not 0 < self.p < 1:
            raise ContractViolation(f"p={self.p} outside (0, 1)")
        if self.Q < 1:
            raise ContractViolation(f"Q={self.Q} must be at least 1")
        if not self.m or min(self.m) < 1:
            raise ContractViolation(f"every m must be at least 1 (got {self.m})")


@dataclass(frozen=True)
class BenchRecord:
    n: int
    p: float
    m: int
    total_bits_avg: float
    rate: float
    rate_stderr: float

    def row(self) -> list:
        return [self.n, repr(self.p), self.m, repr(self.total_bits_avg), repr(self.rate)]


def run_benchmark(cfg: BenchConfig, context_set: ContextSet | None = None,
                  chunk: int = 1000) -> list:
    """Encode, decode and measure ``Q`` random sequences for every ``m``."""
    cs = context_set or context_set_for(cfg.n)
    if cs.n != cfg.n:
        raise ContractViolation(f"context set is for n={cs.n}, config for n={cfg.n}")
    n, h = cfg.n, entropy(cfg.p)
    records = []
    for m in cfg.m:
        lengths = np.empty(cfg.Q, dtype=np.float64)
        state = AdaptiveCoderState(cs)
        for first in range(0, cfg.Q, chunk):
            count = min(chunk, cfg.Q - first)
            blocks = pack_blocks(_iteration_bits(cfg.p, m * n, cfg.seed, first, count), n)
            for r in range(count):
                seq = blocks[r].tolist()
                out = BitStream()
                state.reset()
                encode_adaptive(seq, state, out)
                state.reset()
                back = decode_adaptive(BitStream(out.getvalue(), out.bit_length), state, m)
                if back != seq:
                    bad = next(j for j, (a, b) in enumerate(zip(seq, back)) if a != b)
                    raise RoundTripError(
                        f"mismatch at iteration {first + r}, block {bad}: "
                        f"{seq[bad]:#x} decoded as {back[bad]:#x}"
                    )
                lengths[first + r] = out.bit_length
        avg = float(lengths.mean())
        std = float(lengths.std(ddof=1)) if cfg.Q > 1 else 0.0
        rate = (avg / (m * n) - h) / h
        stderr = std / math.sqrt(cfg.Q) / (m * n * h)
        records.append(BenchRecord(n, cfg.p, m, avg, rate, stderr))
    if cfg.output:
        write_csv(cfg.output, records)
    return records


def write_csv(path: str, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(rec.row())


def monte_carlo_redundancy(n: int, t: int, p: float, tables, Q: int = 100_000,
                           seed: int = 1) -> tuple:
    """Sampled redundancy rate of coding one block after a t-bit sample.

    ``tables`` covers sample weights ``0..t//2`` as for the exact oracle.
    Returns ``(rate, stderr)`` in bits per symbol.
    """
    if len(tables) != t // 2 + 1:
        raise ContractViolation(f"need {t // 2 + 1} tables for t={t}, got {len(tables)}")
    mask = (1 << n) - 1
    lengths = np.empty(Q, dtype=np.float64)
    for first in range(0, Q, 10_000):
        count = min(10_000, Q - first)
        bits = _iteration_bits(p, t + n, seed, first, count)
        ss = bits[:, :t].sum(axis=1).tolist()
        ws = pack_blocks(bits[:, t:], n)[:, 0].tolist()
        for r in range(count):
            s, w = ss[r], ws[r]
            if s > t // 2:
                lengths[first + r] = tables[t - s].codeword(w ^ mask)[1]
            else:
                lengths[first + r] = tables[s].codeword(w)[1]
    rate = float(lengths.mean()) / n - entropy(p)
    return rate, float(lengths.std(ddof=1)) / math.sqrt(Q) / n
