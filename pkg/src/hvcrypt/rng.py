"""Deterministic, platform-independent random streams.

The generator is SplitMix64 (Steele, Lea & Flood 2014). Its output for a
given seed is fixed by this module and golden tests depend on it; do not
change the constants or the key-derivation scheme without bumping
``GENERATOR``.

Each 2x2 block draws from its own stream, keyed by ``derive_key(seed, row,
col)``. That makes an encoding independent of the order in which blocks
are visited, so the vectorised and threaded paths agree bit for bit with
a plain sequential loop.
"""
from __future__ import annotations

import numpy as np

GENERATOR = "splitmix64/v1"

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_key(seed: int, *words: int) -> int:
    """Fold ``words`` into ``seed`` to get an independent stream key."""
    h = seed & MASK64
    for w in words:
        h = mix64(h ^ mix64((w + GOLDEN) & MASK64))
    return h


def bounded(draw: int, n: int) -> int:
    """Map a 64-bit draw to ``range(n)`` by multiply-high."""
    if n < 1:
        raise ValueError("n must be positive")
    return (draw * n) >> 64


class RngStream:
    """A single-owner SplitMix64 stream.

    ``position`` counts the draws taken so far. Two streams built from the
    same seed yield the same sequence; a stream must not be shared between
    threads.
    """

    __slots__ = ("seed", "position")

    def __init__(self, seed: int, position: int = 0):
        self.seed = seed & MASK64
        self.position = position

    def next_u64(self) -> int:
        self.position += 1
        return mix64(self.seed + self.position * GOLDEN)

    def below(self, n: int) -> int:
        return bounded(self.next_u64(), n)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed:#x}, position={self.position})"


# Vectorised counterparts. numpy uint64 arithmetic wraps modulo 2**64,
# which is exactly the SplitMix64 semantics.

def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_keys(seed: int, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Array version of ``derive_key(seed, row, col)``."""
    rows = np.asarray(rows, dtype=np.uint64)
    cols = np.asarray(cols, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = np.full(np.broadcast(rows, cols).shape, seed & MASK64, dtype=np.uint64)
        for w in (rows, cols):
            h = _mix64_array(h ^ _mix64_array(w + np.uint64(GOLDEN)))
    return h


def first_draws(keys: np.ndarray) -> np.ndarray:
    """First ``next_u64`` of a fresh stream for every key."""
    with np.errstate(over="ignore"):
        return _mix64_array(np.asarray(keys, dtype=np.uint64) + np.uint64(GOLDEN))


def bounded_array(draws: np.ndarray, n: np.ndarray | int) -> np.ndarray:
    """Exact ``(draw * n) >> 64`` for ``n`` below 2**32."""
    draws = np.asarray(draws, dtype=np.uint64)
    n = np.asarray(n, dtype=np.uint64)
    hi = draws >> np.uint64(32)
    lo = draws & np.uint64(0xFFFFFFFF)
    return ((hi * n + ((lo * n) >> np.uint64(32))) >> np.uint64(32)).astype(np.int64)
