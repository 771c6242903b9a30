"""Two-level hierarchical encryption, key share and final reveal."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .bitmap import BinaryImage, normalize_size, to_blocks, from_blocks
from .rng import derive_key
from .vc2 import EncodeConfig, encode_aligned, xor_images

__all__ = [
    "LEAVES", "KEY_TABLE", "KEY_RULES", "KeyMapping", "HierarchyBundle",
    "encode_hierarchical", "generate_key_share", "reveal_final", "reveal_chain",
    "denoise_blocks", "blacker_tendency", "STRATEGIES",
]

LEAVES = ("s11", "s12", "s21", "s22")
MappingTag = Literal["table", "rules"]
Strategy = Literal["xor", "xor-denoise", "chain"]
STRATEGIES = ("xor", "xor-denoise", "chain")

# Indexed by a*4 + b*2 + c for the input bit triple (a, b, c).
KEY_TABLE = np.array([1, 1, 0, 0, 0, 1, 0, 0], dtype=np.uint8)
# Black everywhere except (white, black, white).
KEY_RULES = np.array([1, 1, 0, 1, 1, 1, 1, 1], dtype=np.uint8)
KEY_TABLE.setflags(write=False)
KEY_RULES.setflags(write=False)

# Stage tags mixed into the seed for the two level-2 encodes.
_STAGE_S1 = 0x5331  # "S1"
_STAGE_S2 = 0x5332  # "S2"


@dataclass(frozen=True)
class KeyMapping:
    tag: MappingTag = "table"
    inputs: tuple[str, str, str] = ("s12", "s21", "s22")

    def __post_init__(self):
        if self.tag not in ("table", "rules"):
            raise ValueError(f"unknown key mapping {self.tag!r}")
        inputs = tuple(self.inputs)
        if len(inputs) != 3 or len(set(inputs)) != 3 or not set(inputs) <= set(LEAVES):
            raise ValueError(f"key-share inputs must be three distinct leaves from {LEAVES}, "
                             f"got {self.inputs!r}")
        object.__setattr__(self, "inputs", inputs)

    @property
    def carrier(self) -> str:
        return next(leaf for leaf in LEAVES if leaf not in self.inputs)

    @property
    def lut(self) -> np.ndarray:
        return KEY_TABLE if self.tag == "table" else KEY_RULES


@dataclass(frozen=True)
class HierarchyBundle:
    s1: BinaryImage
    s2: BinaryImage
    s11: BinaryImage
    s12: BinaryImage
    s21: BinaryImage
    s22: BinaryImage
    key_share: BinaryImage
    carrier: BinaryImage
    mapping: KeyMapping

    def __post_init__(self):
        dims = {im.dims for im in (self.s1, self.s2, self.s11, self.s12, self.s21,
                                   self.s22, self.key_share, self.carrier)}
        if len(dims) != 1:
            raise ValueError(f"bundle images differ in size: {sorted(map(str, dims))}")

    def leaf(self, name: str) -> BinaryImage:
        if name not in LEAVES:
            raise KeyError(name)
        return getattr(self, name)


def level2_seed(seed: int, which: int) -> int:
    return derive_key(seed, _STAGE_S1 if which == 1 else _STAGE_S2)


def encode_hierarchical(secret: BinaryImage, cfg: EncodeConfig = EncodeConfig(),
                        mapping: KeyMapping = KeyMapping(), workers: int = 1) -> HierarchyBundle:
    """Encrypt ``secret`` into two shares, then each share again.

    The first level uses ``cfg.seed`` directly, so ``s1``/``s2`` equal
    ``vc2.encode(secret, cfg)``. With ``workers > 1`` the two second-level
    encodes run concurrently; results do not depend on it.
    """
    img = normalize_size(secret, cfg.normalize_mode)
    first = encode_aligned(img, cfg.seed, cfg.mixed_policy, workers)
    jobs = [(first.share1, level2_seed(cfg.seed, 1)), (first.share2, level2_seed(cfg.seed, 2))]
    if workers > 1:
        inner = max(1, workers // 2)
        with ThreadPoolExecutor(max_workers=2) as pool:
            p1, p2 = pool.map(lambda j: encode_aligned(j[0], j[1], cfg.mixed_policy, inner), jobs)
    else:
        p1, p2 = (encode_aligned(im, s, cfg.mixed_policy) for im, s in jobs)
    leaves = {"s11": p1.share1, "s12": p1.share2, "s21": p2.share1, "s22": p2.share2}
    key = generate_key_share(*(leaves[n] for n in mapping.inputs), mapping=mapping)
    return HierarchyBundle(first.share1, first.share2, leaves["s11"], leaves["s12"],
                           leaves["s21"], leaves["s22"], key, leaves[mapping.carrier], mapping)


def generate_key_share(a: BinaryImage, b: BinaryImage, c: BinaryImage,
                       mapping: KeyMapping | MappingTag = "table") -> BinaryImage:
    """Pixelwise lookup of the bit triple ``(a, b, c)``."""
    if isinstance(mapping, str):
        mapping = KeyMapping(mapping)
    if not a.dims == b.dims == c.dims:
        raise ValueError(f"dimension mismatch: {a.dims}, {b.dims}, {c.dims}")
    idx = (a.pixels.astype(np.intp) << 2) | (b.pixels.astype(np.intp) << 1) | c.pixels
    return BinaryImage(mapping.lut[idx])


def denoise_blocks(img: BinaryImage) -> BinaryImage:
    """Per 2x2 block: 3 or 4 blacks -> all black, 0 or 1 -> all white,
    exactly 2 -> untouched."""
    if img.width % 2 or img.height % 2:
        raise ValueError(f"image dimensions must be even, got {img.dims}")
    tiles = to_blocks(img.pixels)
    count = tiles.sum(axis=2, keepdims=True)
    out = np.where(count >= 3, 1, np.where(count <= 1, 0, tiles)).astype(np.uint8)
    return BinaryImage(from_blocks(out))


def reveal_final(carrier: BinaryImage, key: BinaryImage, strategy: Strategy = "xor") -> BinaryImage:
    if strategy == "xor":
        return xor_images(carrier, key)
    if strategy == "xor-denoise":
        return denoise_blocks(xor_images(carrier, key))
    if strategy == "chain":
        raise ValueError("the chain strategy needs all four leaves; use reveal_chain(bundle)")
    raise ValueError(f"unknown reveal strategy {strategy!r}")


def reveal_chain(bundle_or_leaves) -> BinaryImage:
    """Rebuild both first-level shares from their leaves and stack them.

    Accepts a :class:`HierarchyBundle` or a ``(s11, s12, s21, s22)``
    sequence. The key share is not used.
    """
    if isinstance(bundle_or_leaves, HierarchyBundle):
        b = bundle_or_leaves
        s11, s12, s21, s22 = b.s11, b.s12, b.s21, b.s22
    else:
        s11, s12, s21, s22 = bundle_or_leaves
    return xor_images(xor_images(s11, s12), xor_images(s21, s22))


def blacker_tendency(img: BinaryImage) -> float:
    return img.black / (img.width * img.height)
