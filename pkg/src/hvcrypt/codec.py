"""2x2 share patterns, block classification, pattern choice and stacking.

Blocks are 4-tuples in (top-left, top-right, bottom-left, bottom-right)
order, so the matrix ``[a b; c d]`` is the block ``(a, b, c, d)``.
"""
from __future__ import annotations

from enum import Enum
from typing import Literal, NamedTuple

import numpy as np

from .rng import RngStream, bounded, bounded_array

Block = tuple[int, int, int, int]
MixedPolicy = Literal["paper-random", "best-match"]
MIXED_POLICIES = ("paper-random", "best-match")


class BlockClass(Enum):
    BLACK = "black"
    WHITE = "white"
    MIXED = "mixed"


class PatternPair(NamedTuple):
    share1: Block
    share2: Block


def _pairs(share1, share2):
    return tuple(PatternPair(a, b) for a, b in zip(share1, share2, strict=True))


# Index order follows the published equation numbering; share2 entries pair
# with share1 entries position by position.
_BLACK_S1 = ((1, 0, 0, 1), (0, 0, 1, 1), (1, 1, 0, 0), (0, 1, 1, 0))
_BLACK_S2 = ((0, 1, 1, 0), (1, 1, 0, 0), (0, 0, 1, 1), (1, 0, 0, 1))
_WHITE_S1 = ((1, 0, 0, 1), (0, 0, 1, 1), (1, 1, 0, 0), (0, 1, 1, 0))
_MIXED_S1 = ((0, 1, 1, 0), (1, 0, 1, 0), (0, 1, 1, 1), (1, 0, 1, 1))
# first and last entries are the same matrix; kept as published
_MIXED_S2 = ((0, 1, 0, 1), (1, 1, 0, 1), (1, 0, 1, 0), (0, 1, 0, 1))

PATTERN_TABLES: dict[BlockClass, tuple[PatternPair, ...]] = {
    BlockClass.BLACK: _pairs(_BLACK_S1, _BLACK_S2),
    BlockClass.WHITE: _pairs(_WHITE_S1, _WHITE_S1),
    BlockClass.MIXED: _pairs(_MIXED_S1, _MIXED_S2),
}

# Array form for the vectorised encoder: [class, index, share, bit].
CLASS_ORDER = (BlockClass.BLACK, BlockClass.WHITE, BlockClass.MIXED)
TABLE_ARRAY = np.array(
    [[[p.share1, p.share2] for p in PATTERN_TABLES[c]] for c in CLASS_ORDER],
    dtype=np.uint8,
)
TABLE_ARRAY.setflags(write=False)


def _check_block(b) -> Block:
    t = tuple(int(x) for x in b)
    if len(t) != 4 or any(x not in (0, 1) for x in t):
        raise ValueError(f"a block is four 0/1 bits, got {b!r}")
    return t  # type: ignore[return-value]


def classify_block(b: Block) -> BlockClass:
    s = sum(_check_block(b))
    if s == 4:
        return BlockClass.BLACK
    if s == 0:
        return BlockClass.WHITE
    return BlockClass.MIXED


def pattern_pair(cls: BlockClass, index: int) -> PatternPair:
    if not 0 <= index <= 3:
        raise IndexError(f"pattern index must be in 0..3, got {index}")
    return PATTERN_TABLES[cls][index]


def stack(a: Block, b: Block) -> Block:
    """Superimpose two blocks (pixelwise XOR)."""
    a, b = _check_block(a), _check_block(b)
    return tuple(x ^ y for x, y in zip(a, b))  # type: ignore[return-value]


def _hamming(a: Block, b: Block) -> int:
    return sum(x != y for x, y in zip(a, b))


def best_match_candidates(input_block: Block) -> tuple[int, ...]:
    """Mixed-table indices whose stacked pair is closest to ``input_block``."""
    d = [_hamming(stack(p.share1, p.share2), input_block)
         for p in PATTERN_TABLES[BlockClass.MIXED]]
    m = min(d)
    return tuple(i for i, x in enumerate(d) if x == m)


def choose_index(cls: BlockClass, input_block: Block, policy: MixedPolicy,
                 rng: RngStream) -> int:
    """Pick a table row for one block, consuming exactly one draw."""
    input_block = _check_block(input_block)
    if classify_block(input_block) is not cls:
        raise ValueError(f"block {input_block} is not {cls.value}")
    if policy not in MIXED_POLICIES:
        raise ValueError(f"unknown mixed policy {policy!r}")
    draw = rng.next_u64()
    if policy == "best-match" and cls is BlockClass.MIXED:
        tied = best_match_candidates(input_block)
        return tied[bounded(draw, len(tied))]
    return bounded(draw, 4)


# ------------------------------------------------------------- vectorised

# Per 4-bit code (bit order tl, tr, bl, br -> weights 8, 4, 2, 1): the class
# id into CLASS_ORDER, the best-match tie set and its size.
def _code_block(code: int) -> Block:
    return ((code >> 3) & 1, (code >> 2) & 1, (code >> 1) & 1, code & 1)


CODE_CLASS = np.array(
    [CLASS_ORDER.index(classify_block(_code_block(c))) for c in range(16)], dtype=np.int64)
_TIES = np.zeros((16, 4), dtype=np.int64)
_NTIES = np.ones(16, dtype=np.int64)
for _c in range(16):
    if CODE_CLASS[_c] == 2:
        _t = best_match_candidates(_code_block(_c))
        _TIES[_c, :len(_t)] = _t
        _NTIES[_c] = len(_t)
del _c


def block_codes(tiles: np.ndarray) -> np.ndarray:
    """(..., 4) tiles -> (...,) integer codes 0..15."""
    t = tiles.astype(np.int64)
    return (t[..., 0] << 3) | (t[..., 1] << 2) | (t[..., 2] << 1) | t[..., 3]


def choose_indices(codes: np.ndarray, draws: np.ndarray, policy: MixedPolicy) -> np.ndarray:
    """Array version of :func:`choose_index` given each block's first draw."""
    if policy not in MIXED_POLICIES:
        raise ValueError(f"unknown mixed policy {policy!r}")
    idx = bounded_array(draws, 4)
    if policy == "best-match":
        mixed = CODE_CLASS[codes] == 2
        n = _NTIES[codes]
        pick = bounded_array(draws, n)
        tied = _TIES[codes, pick]
        idx = np.where(mixed, tied, idx)
    return idx
