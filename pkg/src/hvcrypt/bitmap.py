"""Binary images, PBM (P1/P4) I/O and size normalisation.

Pixels are 1 = black, 0 = white everywhere in this package, which is also
the native PBM convention.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Literal

import numpy as np

__all__ = [
    "BinaryImage", "Dimensions", "PbmError", "NonBitmapFormat",
    "MalformedHeader", "PayloadMismatch", "OutOfRange",
    "load_pbm", "save_pbm", "parse_pbm", "encode_pbm",
    "normalize_size", "round_up4", "block_at", "iter_blocks",
]

NormalizeMode = Literal["scale", "pad"]
PbmVariant = Literal["P1", "P4"]


class PbmError(ValueError):
    """Base class for PBM parse failures; ``offset`` is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class NonBitmapFormat(PbmError):
    pass


class MalformedHeader(PbmError):
    pass


class PayloadMismatch(PbmError):
    """Pixel payload does not agree with the header dimensions."""


class OutOfRange(IndexError):
    pass


@dataclass(frozen=True)
class Dimensions:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"dimensions must be positive, got {self.width}x{self.height}")

    def __str__(self) -> str:
        return f"{self.width}x{self.height}"


class BinaryImage:
    """Immutable grid of 0/1 pixels, stored as a read-only uint8 array of
    shape ``(height, width)``."""

    __slots__ = ("_px",)

    def __init__(self, pixels):
        arr = np.array(pixels, dtype=np.uint8, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D pixel array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"image must be at least 1x1, got shape {arr.shape}")
        if arr.size and arr.max() > 1:
            raise ValueError("pixels must be 0 or 1")
        arr.setflags(write=False)
        self._px = arr

    @classmethod
    def from_bits(cls, width: int, height: int, bits: Iterable[int]) -> "BinaryImage":
        flat = np.fromiter((int(b) for b in bits), dtype=np.int64)
        if flat.size != width * height:
            raise ValueError(f"expected {width * height} bits, got {flat.size}")
        if flat.size and (flat.min() < 0 or flat.max() > 1):
            raise ValueError("pixels must be 0 or 1")
        return cls(flat.reshape(height, width))

    @classmethod
    def blank(cls, width: int, height: int, value: int = 0) -> "BinaryImage":
        return cls(np.full((height, width), value, dtype=np.uint8))

    @property
    def pixels(self) -> np.ndarray:
        return self._px

    @property
    def width(self) -> int:
        return self._px.shape[1]

    @property
    def height(self) -> int:
        return self._px.shape[0]

    @property
    def dims(self) -> Dimensions:
        return Dimensions(self.width, self.height)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(int(b) for b in self._px.ravel())

    @property
    def black(self) -> int:
        return int(np.count_nonzero(self._px))

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return self._px.shape == other._px.shape and bool(np.array_equal(self._px, other._px))

    def __hash__(self):
        return hash((self._px.shape, self._px.tobytes()))

    def __repr__(self):
        return f"BinaryImage({self.width}x{self.height}, black={self.black})"


# ---------------------------------------------------------------- PBM parsing

_WS = b" \t\r\n\v\f"


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_space_and_comments(self):
        d = self.data
        while self.pos < len(d):
            c = d[self.pos:self.pos + 1]
            if c in (b"#",):
                nl = d.find(b"\n", self.pos)
                self.pos = len(d) if nl < 0 else nl + 1
            elif c and c in _WS:
                self.pos += 1
            else:
                break

    def header_int(self, what: str) -> int:
        self.skip_space_and_comments()
        start = self.pos
        m = re.compile(rb"\d+").match(self.data, self.pos)
        if not m:
            raise MalformedHeader(f"expected {what}", start)
        self.pos = m.end()
        if self.pos < len(self.data) and self.data[self.pos:self.pos + 1] not in _WS \
                and self.data[self.pos:self.pos + 1] != b"#":
            raise MalformedHeader(f"bad character after {what}", self.pos)
        value = int(m.group())
        if value < 1:
            raise MalformedHeader(f"{what} must be positive", start)
        return value


def parse_pbm(data: bytes) -> BinaryImage:
    """Decode P1 or P4 bytes."""
    if len(data) < 2:
        raise MalformedHeader("file too short for a magic number", 0)
    magic = data[:2]
    if magic not in (b"P1", b"P4"):
        raise NonBitmapFormat(f"not a PBM file, magic {magic!r}", 0)
    r = _Reader(data)
    r.pos = 2
    if r.pos < len(data) and data[r.pos:r.pos + 1] not in _WS and data[r.pos:r.pos + 1] != b"#":
        raise MalformedHeader("magic number must be followed by whitespace", 2)
    width = r.header_int("width")
    height = r.header_int("height")

    if magic == b"P1":
        return _parse_p1_payload(data, r, width, height)

    # P4: exactly one whitespace byte separates header and raster
    if r.pos >= len(data) or data[r.pos:r.pos + 1] not in _WS:
        raise MalformedHeader("missing whitespace before raster", r.pos)
    start = r.pos + 1
    row_bytes = (width + 7) // 8
    need = row_bytes * height
    payload = data[start:start + need]
    if len(payload) < need:
        raise PayloadMismatch(f"raster needs {need} bytes, found {len(payload)}",
                              start + len(payload))
    packed = np.frombuffer(payload, dtype=np.uint8).reshape(height, row_bytes)
    px = np.unpackbits(packed, axis=1)[:, :width]
    return BinaryImage(px)


def _parse_p1_payload(data: bytes, r: _Reader, width: int, height: int) -> BinaryImage:
    need = width * height
    out = np.empty(need, dtype=np.uint8)
    n = 0
    pos = r.pos
    d = data
    while pos < len(d):
        c = d[pos]
        if c == 0x30 or c == 0x31:
            if n == need:
                raise PayloadMismatch(f"more than {need} pixels", pos)
            out[n] = c - 0x30
            n += 1
            pos += 1
        elif c == 0x23:
            nl = d.find(b"\n", pos)
            pos = len(d) if nl < 0 else nl + 1
        elif d[pos:pos + 1] in _WS:
            pos += 1
        else:
            raise PayloadMismatch(f"invalid pixel character {chr(c)!r}", pos)
    if n != need:
        raise PayloadMismatch(f"expected {need} pixels, found {n}", pos)
    return BinaryImage(out.reshape(height, width))


def encode_pbm(img: BinaryImage, variant: PbmVariant = "P4") -> bytes:
    variant = variant.upper()
    if variant == "P1":
        lines = [f"P1\n{img.width} {img.height}"]
        # keep lines under the 70-character PBM recommendation
        for row in img.pixels:
            text = " ".join("1" if b else "0" for b in row)
            while len(text) > 70:
                cut = text.rfind(" ", 0, 71)
                lines.append(text[:cut])
                text = text[cut + 1:]
            lines.append(text)
        return ("\n".join(lines) + "\n").encode("ascii")
    if variant == "P4":
        header = f"P4\n{img.width} {img.height}\n".encode("ascii")
        return header + np.packbits(img.pixels, axis=1).tobytes()
    raise ValueError(f"unknown PBM variant {variant!r}")


def load_pbm(path: str | os.PathLike) -> BinaryImage:
    with open(path, "rb") as fh:
        return parse_pbm(fh.read())


def save_pbm(img: BinaryImage, path: str | os.PathLike, variant: PbmVariant = "P4") -> None:
    data = encode_pbm(img, variant)
    with open(path, "wb") as fh:
        fh.write(data)


# ---------------------------------------------------------- size and blocks

def round_up4(n: int) -> int:
    return -(-n // 4) * 4


def normalize_size(img: BinaryImage, mode: NormalizeMode = "scale") -> BinaryImage:
    """Bring both dimensions up to the next multiple of 4.

    ``scale`` resamples nearest-neighbour; ``pad`` adds white columns on the
    right and white rows at the bottom. Aligned images come back as is.
    """
    w, h = round_up4(img.width), round_up4(img.height)
    if (w, h) == (img.width, img.height):
        return img
    if mode == "pad":
        out = np.zeros((h, w), dtype=np.uint8)
        out[:img.height, :img.width] = img.pixels
        return BinaryImage(out)
    if mode == "scale":
        rows = (np.arange(h) * img.height) // h
        cols = (np.arange(w) * img.width) // w
        return BinaryImage(img.pixels[np.ix_(rows, cols)])
    raise ValueError(f"unknown normalize mode {mode!r}")


def block_at(img: BinaryImage, row: int, col: int) -> tuple[int, int, int, int]:
    """2x2 tile whose top-left pixel is ``(2*row, 2*col)``, as
    (top-left, top-right, bottom-left, bottom-right)."""
    if img.width % 2 or img.height % 2:
        raise ValueError(f"image dimensions must be even, got {img.dims}")
    if not (0 <= 2 * row < img.height and 0 <= 2 * col < img.width):
        raise OutOfRange(f"block ({row}, {col}) outside a {img.dims} image")
    t = img.pixels[2 * row:2 * row + 2, 2 * col:2 * col + 2]
    return (int(t[0, 0]), int(t[0, 1]), int(t[1, 0]), int(t[1, 1]))


def iter_blocks(img: BinaryImage) -> Iterator[tuple[int, int, tuple[int, int, int, int]]]:
    for r in range(img.height // 2):
        for c in range(img.width // 2):
            yield r, c, block_at(img, r, c)


def to_blocks(px: np.ndarray) -> np.ndarray:
    """(H, W) pixels -> (H/2, W/2, 4) tiles in block bit order."""
    h, w = px.shape
    return px.reshape(h // 2, 2, w // 2, 2).transpose(0, 2, 1, 3).reshape(h // 2, w // 2, 4)


def from_blocks(tiles: np.ndarray) -> np.ndarray:
    bh, bw, _ = tiles.shape
    return tiles.reshape(bh, bw, 2, 2).transpose(0, 2, 1, 3).reshape(bh * 2, bw * 2)
