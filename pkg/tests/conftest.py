import numpy as np
import pytest
from hypothesis import strategies as st

from hvcrypt.bitmap import BinaryImage


def random_image(rng: np.random.Generator, width: int, height: int, p: float = 0.5) -> BinaryImage:
    return BinaryImage((rng.random((height, width)) < p).astype(np.uint8))


def random_tile_image(rng: np.random.Generator, width: int, height: int) -> BinaryImage:
    """Image made of solid 2x2 tiles; width and height must be even."""
    tiles = rng.integers(0, 2, size=(height // 2, width // 2), dtype=np.uint8)
    return BinaryImage(np.kron(tiles, np.ones((2, 2), dtype=np.uint8)))


@st.composite
def tile_images(draw, max_blocks=16):
    bw = draw(st.integers(1, max_blocks)) * 2
    bh = draw(st.integers(1, max_blocks)) * 2
    bits = draw(st.lists(st.integers(0, 1), min_size=bw * bh, max_size=bw * bh))
    tiles = np.array(bits, dtype=np.uint8).reshape(bh, bw)
    return BinaryImage(np.kron(tiles, np.ones((2, 2), dtype=np.uint8)))


@st.composite
def images(draw, max_side=24):
    w = draw(st.integers(1, max_side))
    h = draw(st.integers(1, max_side))
    bits = draw(st.lists(st.integers(0, 1), min_size=w * h, max_size=w * h))
    return BinaryImage.from_bits(w, h, bits)


@pytest.fixture
def nprng():
    return np.random.default_rng(20240601)


# ------------------------------------------------ acceptance summary lines

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark and call.when == "call":
        _criteria.append((mark.args[0], mark.args[1], item.name,
                          "PASS" if call.excinfo is None else "FAIL", call.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, name, outcome, dur in sorted(_criteria):
        terminalreporter.write_line(f"{outcome}  criterion {num}: {title} [{name}, {dur:.2f}s]")
