import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hvcrypt.bitmap import (BinaryImage, Dimensions, MalformedHeader, NonBitmapFormat,
                            OutOfRange, PayloadMismatch, block_at, encode_pbm,
                            iter_blocks, load_pbm, normalize_size, parse_pbm, save_pbm)

from conftest import images


def test_binary_image_rejects_bad_pixels():
    with pytest.raises(ValueError):
        BinaryImage([[0, 2]])
    with pytest.raises(ValueError):
        BinaryImage.from_bits(2, 2, [1, 0, 1])
    with pytest.raises(ValueError):
        Dimensions(0, 3)


def test_image_is_immutable():
    img = BinaryImage([[0, 1]])
    with pytest.raises(ValueError):
        img.pixels[0, 0] = 1


def test_load_p1(tmp_path):
    p = tmp_path / "a.pbm"
    p.write_bytes(b"P1\n2 2\n1 0 0 1")
    img = load_pbm(p)
    assert (img.width, img.height, img.bits) == (2, 2, (1, 0, 0, 1))


def test_load_p4_packed_bits(tmp_path):
    p = tmp_path / "a.pbm"
    p.write_bytes(b"P4\n8 1\n" + bytes([0b10000001]))
    assert load_pbm(p).bits == (1, 0, 0, 0, 0, 0, 0, 1)


def test_non_pbm_magic(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P5\n2 2\n255\n\x00\x00\x00\x00")
    with pytest.raises(NonBitmapFormat) as e:
        load_pbm(p)
    assert e.value.offset == 0


def test_comments_and_compact_p1():
    img = parse_pbm(b"P1 # comment\n# another\n3 # w\n2\n101\n0 1 0\n")
    assert img.bits == (1, 0, 1, 0, 1, 0)


@pytest.mark.parametrize("data, exc, offset", [
    (b"P1\nx 2\n", MalformedHeader, 3),
    (b"P1\n2", MalformedHeader, 4),
    (b"P1\n0 2\n", MalformedHeader, 3),
    (b"P1\n2 2\n1 0 1", PayloadMismatch, 12),
    (b"P1\n2 2\n1 0 1 1 1", PayloadMismatch, 15),
    (b"P1\n2 1\n1 2", PayloadMismatch, 9),
    (b"P4\n8 2\n\x00", PayloadMismatch, 8),
    (b"P", MalformedHeader, 0),
])
def test_parse_errors_name_offset(data, exc, offset):
    with pytest.raises(exc) as e:
        parse_pbm(data)
    assert e.value.offset == offset
    assert f"byte offset {offset}" in str(e.value)


def test_save_p1_text(tmp_path):
    p = tmp_path / "a.pbm"
    save_pbm(BinaryImage.from_bits(2, 2, [1, 0, 0, 1]), p, "P1")
    assert p.read_text().split() == "P1\n2 2\n1 0\n0 1\n".split()


def test_p1_long_rows_wrap_and_reload():
    img = BinaryImage(np.ones((1, 100), dtype=np.uint8))
    text = encode_pbm(img, "P1").decode()
    assert max(len(line) for line in text.splitlines()) <= 70
    assert parse_pbm(text.encode()) == img


def test_p4_roundtrip_13x7(tmp_path, nprng):
    img = BinaryImage(nprng.integers(0, 2, (7, 13)))
    p = tmp_path / "a.pbm"
    save_pbm(img, p, "P4")
    assert load_pbm(p) == img


def test_p4_row_padding():
    img = BinaryImage([[1, 1, 1], [1, 0, 1]])
    data = encode_pbm(img, "P4")
    assert data.endswith(bytes([0b11100000, 0b10100000]))
    assert parse_pbm(data) == img


@settings(max_examples=60)
@given(images(), st.sampled_from(["P1", "P4"]))
def test_pbm_roundtrip_property(img, variant):
    assert parse_pbm(encode_pbm(img, variant)) == img


def test_normalize_examples():
    img = BinaryImage(np.zeros((99, 92), dtype=np.uint8))
    for mode in ("scale", "pad"):
        out = normalize_size(img, mode)
        assert (out.width, out.height) == (92, 100)
    sq = BinaryImage(np.eye(8, dtype=np.uint8))
    assert normalize_size(sq, "scale") is sq
    padded = normalize_size(BinaryImage(np.ones((3, 3), dtype=np.uint8)), "pad")
    assert (padded.width, padded.height, padded.black) == (4, 4, 9)


@settings(max_examples=80)
@given(images(), st.sampled_from(["scale", "pad"]))
def test_normalize_properties(img, mode):
    out = normalize_size(img, mode)
    assert out.width % 4 == 0 and out.height % 4 == 0
    assert out.width - img.width in range(4) and out.height - img.height in range(4)
    assert normalize_size(out, mode) == out
    if mode == "pad":
        assert out.black == img.black
        assert np.array_equal(out.pixels[:img.height, :img.width], img.pixels)
    else:
        assert set(np.unique(out.pixels)) == set(np.unique(img.pixels))


def test_block_at_examples():
    img = BinaryImage(np.eye(4, dtype=np.uint8))
    assert block_at(img, 0, 0) == (1, 0, 0, 1)
    assert block_at(img, 1, 1) == (1, 0, 0, 1)
    assert block_at(img, 0, 1) == (0, 0, 0, 0)
    with pytest.raises(OutOfRange):
        block_at(img, 2, 0)
    with pytest.raises(ValueError):
        block_at(BinaryImage(np.zeros((3, 4), dtype=np.uint8)), 0, 0)


@given(images(max_side=12))
def test_blocks_reassemble(img):
    img = normalize_size(img, "pad")
    out = np.full((img.height, img.width), 9, dtype=np.uint8)
    for r, c, b in iter_blocks(img):
        out[2 * r:2 * r + 2, 2 * c:2 * c + 2] = np.reshape(b, (2, 2))
    assert np.array_equal(out, img.pixels)
