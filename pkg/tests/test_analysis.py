import csv

import numpy as np
import pytest
from scipy import stats

from hvcrypt.analysis import (ALPHAS, CHI2_CRITICAL, ENTITY_NAMES, PixelStats, StatsReport,
                              UnderpopulatedBins, chi_square_independence,
                              chi_square_uniformity, format_csv, pixel_stats, read_csv,
                              report, write_csv)
from hvcrypt.bitmap import BinaryImage
from hvcrypt.hvc import encode_hierarchical, reveal_final
from hvcrypt.rng import RngStream, derive_key
from hvcrypt.vc2 import EncodeConfig, encode

from conftest import random_tile_image


def test_pixel_stats_examples():
    assert pixel_stats(BinaryImage.from_bits(2, 2, [1, 0, 0, 0]), "x") == PixelStats("x", 1, 3, 4)
    assert pixel_stats(BinaryImage.blank(10, 10), "w") == PixelStats("w", 0, 100, 100)
    with pytest.raises(ValueError):
        PixelStats("bad", 1, 1, 3)


def test_pure_block_share_is_half_black(nprng):
    img = random_tile_image(nprng, 40, 24)
    s = pixel_stats(encode(img, EncodeConfig(4)).share1, "Share1")
    assert s.black * 2 == s.total


def test_report_rows_and_white_secret():
    secret = BinaryImage.blank(8, 8)
    b = encode_hierarchical(secret)
    rep = report(b, secret, reveal_final(b.carrier, b.key_share))
    assert tuple(r.entity for r in rep.rows) == ENTITY_NAMES
    assert all(r.black + r.white == r.total for r in rep.rows)
    assert (rep["Share1"].black, rep["Share1"].white, rep["Share1"].total) == (32, 32, 64)
    assert rep["Share1"] == PixelStats("Share1", 32, 32, 64)
    assert (rep["Share2"].black, rep["Share2"].white) == (32, 32)
    with pytest.raises(KeyError):
        rep["Share3"]


def test_critical_table_matches_scipy():
    for df, row in CHI2_CRITICAL.items():
        for alpha, c in zip(ALPHAS, row):
            assert c == pytest.approx(stats.chi2.isf(alpha, df), abs=6e-4)


def test_chi_square_examples():
    assert chi_square_uniformity([25, 25, 25, 25]).statistic == 0
    r = chi_square_uniformity([100, 0, 0, 0])
    assert r.statistic == 300 and r.df == 3
    assert r.rejects(0.001) and r.p_indicator == "p <= 0.001"
    assert chi_square_uniformity([25, 25, 25, 25]).p_indicator == "p > 0.1"
    with pytest.raises(UnderpopulatedBins):
        chi_square_uniformity([3, 4, 5, 2])
    with pytest.raises(ValueError):
        chi_square_uniformity([10])


@pytest.mark.parametrize("counts", [[30, 20, 25, 25], [40, 18, 22, 20], [55, 15, 15, 15, 20]])
def test_chi_square_bracket_contains_scipy_p(counts):
    ours = chi_square_uniformity(counts)
    ref = stats.chisquare(counts)
    assert ours.statistic == pytest.approx(ref.statistic)
    assert ours.p_low < ref.pvalue <= ours.p_high


def test_independence_matches_scipy(nprng):
    table = nprng.integers(20, 80, size=(2, 4))
    ours = chi_square_independence(table)
    stat, p, dof, _ = stats.chi2_contingency(table, correction=False)
    assert ours.statistic == pytest.approx(stat) and ours.df == dof == 3
    assert ours.p_low < p <= ours.p_high


def test_uniform_draws_pass_in_most_seeds():
    below = 0
    for seed in range(200):
        rng = RngStream(derive_key(seed, 0xC415))
        counts = np.bincount([rng.below(4) for _ in range(10_000)], minlength=4)
        below += chi_square_uniformity(counts).statistic < 16.27
    assert below >= 198


def test_csv_roundtrip_and_format(tmp_path):
    rep = StatsReport((PixelStats("Secret", 3, 1, 4),))
    p = tmp_path / "s.csv"
    write_csv(rep, p)
    assert p.read_bytes() == b"entity,black,white,total\nSecret,3,1,4\n"
    assert read_csv(p) == rep


def test_csv_quotes_commas(tmp_path):
    rep = StatsReport((PixelStats("a,b", 1, 1, 2), PixelStats('say "hi"', 0, 2, 2)))
    p = tmp_path / "s.csv"
    write_csv(rep, p)
    text = p.read_text()
    assert '"a,b",1,1,2' in text
    assert read_csv(p) == rep
    with open(p, newline="") as fh:
        assert len(list(csv.reader(fh))) == 3


def test_large_counts_not_locale_formatted():
    rep = StatsReport((PixelStats("big", 1_234_567, 1, 1_234_568),))
    assert format_csv(rep).splitlines()[1] == "big,1234567,1,1234568"
