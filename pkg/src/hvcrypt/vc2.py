"""Expansionless 2-out-of-2 encoding and XOR reveal."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bitmap import (BinaryImage, Dimensions, NormalizeMode, from_blocks,
                     iter_blocks, normalize_size, to_blocks)
from .codec import (TABLE_ARRAY, CODE_CLASS, MIXED_POLICIES, MixedPolicy,
                    block_codes, choose_index, choose_indices, classify_block,
                    pattern_pair)
from .rng import MASK64, RngStream, derive_key, derive_keys, first_draws

__all__ = ["EncodeConfig", "SharePair", "encode", "encode_aligned",
           "encode_sequential", "reveal", "is_pure_block_image"]


@dataclass(frozen=True)
class EncodeConfig:
    seed: int = 0
    mixed_policy: MixedPolicy = "paper-random"
    normalize_mode: NormalizeMode = "scale"

    def __post_init__(self):
        if not 0 <= self.seed <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.mixed_policy not in MIXED_POLICIES:
            raise ValueError(f"unknown mixed policy {self.mixed_policy!r}")
        if self.normalize_mode not in ("scale", "pad"):
            raise ValueError(f"unknown normalize mode {self.normalize_mode!r}")


@dataclass(frozen=True)
class SharePair:
    share1: BinaryImage
    share2: BinaryImage
    source_dims: Dimensions

    def __post_init__(self):
        if not (self.share1.dims == self.share2.dims == self.source_dims):
            raise ValueError("shares must match each other and the source dimensions")


def _encode_rows(tiles: np.ndarray, row0: int, seed: int, policy: MixedPolicy):
    bh, bw, _ = tiles.shape
    rows, cols = np.meshgrid(np.arange(row0, row0 + bh), np.arange(bw), indexing="ij")
    draws = first_draws(derive_keys(seed, rows, cols))
    codes = block_codes(tiles)
    idx = choose_indices(codes, draws, policy)
    picked = TABLE_ARRAY[CODE_CLASS[codes], idx]  # (bh, bw, 2, 4)
    return picked[:, :, 0, :], picked[:, :, 1, :]


def encode_aligned(img: BinaryImage, seed: int, policy: MixedPolicy = "paper-random",
                   workers: int = 1) -> SharePair:
    """Encode an image whose dimensions are already even, without resizing.

    Block ``(r, c)`` draws from the stream keyed ``derive_key(seed, r, c)``,
    so splitting the rows across ``workers`` threads cannot change the
    output.
    """
    if img.width % 2 or img.height % 2:
        raise ValueError(f"image dimensions must be even, got {img.dims}")
    tiles = to_blocks(img.pixels)
    bh = tiles.shape[0]
    if workers <= 1 or bh < 2:
        s1, s2 = _encode_rows(tiles, 0, seed, policy)
    else:
        step = -(-bh // workers)
        starts = range(0, bh, step)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda r0: _encode_rows(tiles[r0:r0 + step], r0, seed, policy), starts))
        s1 = np.concatenate([p[0] for p in parts])
        s2 = np.concatenate([p[1] for p in parts])
    return SharePair(BinaryImage(from_blocks(s1)), BinaryImage(from_blocks(s2)), img.dims)


def encode(secret: BinaryImage, cfg: EncodeConfig = EncodeConfig(), workers: int = 1) -> SharePair:
    """Normalise ``secret`` and split it into two same-sized shares."""
    img = normalize_size(secret, cfg.normalize_mode)
    return encode_aligned(img, cfg.seed, cfg.mixed_policy, workers)


def encode_sequential(secret: BinaryImage, cfg: EncodeConfig = EncodeConfig()) -> SharePair:
    """Block-by-block reference encoder.

    Walks the blocks top to bottom, left to right, one ``RngStream`` per
    block. Slow; kept as the readable baseline the fast path is tested
    against.
    """
    img = normalize_size(secret, cfg.normalize_mode)
    s1 = np.zeros((img.height, img.width), dtype=np.uint8)
    s2 = np.zeros_like(s1)
    for r, c, block in iter_blocks(img):
        cls = classify_block(block)
        rng = RngStream(derive_key(cfg.seed, r, c))
        pair = pattern_pair(cls, choose_index(cls, block, cfg.mixed_policy, rng))
        s1[2 * r:2 * r + 2, 2 * c:2 * c + 2] = np.reshape(pair.share1, (2, 2))
        s2[2 * r:2 * r + 2, 2 * c:2 * c + 2] = np.reshape(pair.share2, (2, 2))
    return SharePair(BinaryImage(s1), BinaryImage(s2), img.dims)


def xor_images(a: BinaryImage, b: BinaryImage) -> BinaryImage:
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    return BinaryImage(a.pixels ^ b.pixels)


def reveal(pair: SharePair) -> BinaryImage:
    """Stack the two shares. No cleanup is applied."""
    return xor_images(pair.share1, pair.share2)


def is_pure_block_image(img: BinaryImage) -> bool:
    if img.width % 2 or img.height % 2:
        raise ValueError(f"image dimensions must be even, got {img.dims}")
    s = to_blocks(img.pixels).sum(axis=2)
    return bool(np.all((s == 0) | (s == 4)))
