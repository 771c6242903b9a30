"""Pixel concentration reports and chi-square diagnostics."""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .bitmap import BinaryImage, NormalizeMode, normalize_size
from .hvc import HierarchyBundle

CSV_HEADER = ("entity", "black", "white", "total")

ENTITY_NAMES = (
    "Secret", "Resized secret", "Share1", "Share2", "Share11", "Share12",
    "Share21", "Share22", "Key share", "Revealed secret",
)

# Upper-tail critical values of the chi-square distribution, df 1..8.
ALPHAS = (0.10, 0.05, 0.01, 0.001)
CHI2_CRITICAL = {
    1: (2.706, 3.841, 6.635, 10.828),
    2: (4.605, 5.991, 9.210, 13.816),
    3: (6.251, 7.815, 11.345, 16.266),
    4: (7.779, 9.488, 13.277, 18.467),
    5: (9.236, 11.070, 15.086, 20.515),
    6: (10.645, 12.592, 16.812, 22.458),
    7: (12.017, 14.067, 18.475, 24.322),
    8: (13.362, 15.507, 20.090, 26.124),
}


class UnderpopulatedBins(ValueError):
    pass


@dataclass(frozen=True)
class PixelStats:
    entity: str
    black: int
    white: int
    total: int

    def __post_init__(self):
        if self.black + self.white != self.total:
            raise ValueError(f"{self.entity}: black + white != total")

    @property
    def black_fraction(self) -> float:
        return self.black / self.total

    @property
    def white_fraction(self) -> float:
        return self.white / self.total


@dataclass(frozen=True)
class StatsReport:
    rows: tuple[PixelStats, ...]

    def __getitem__(self, entity: str) -> PixelStats:
        for r in self.rows:
            if r.entity == entity:
                return r
        raise KeyError(entity)


def pixel_stats(img: BinaryImage, name: str) -> PixelStats:
    total = img.width * img.height
    black = img.black
    return PixelStats(name, black, total - black, total)


def report(bundle: HierarchyBundle, secret: BinaryImage, revealed: BinaryImage,
           normalize_mode: NormalizeMode = "scale") -> StatsReport:
    """One row per entity, in the fixed order of ``ENTITY_NAMES``."""
    resized = normalize_size(secret, normalize_mode)
    images = (secret, resized, bundle.s1, bundle.s2, bundle.s11, bundle.s12,
              bundle.s21, bundle.s22, bundle.key_share, revealed)
    return StatsReport(tuple(pixel_stats(im, n) for im, n in zip(images, ENTITY_NAMES)))


class ChiSquare(NamedTuple):
    statistic: float
    df: int
    # p lies in (p_low, p_high]
    p_low: float
    p_high: float

    def rejects(self, alpha: float) -> bool:
        """True when p is known to be at most ``alpha``."""
        return self.p_high <= alpha

    @property
    def p_indicator(self) -> str:
        if self.p_low == 0.0:
            return f"p <= {self.p_high:g}"
        if self.p_high == 1.0:
            return f"p > {self.p_low:g}"
        return f"{self.p_low:g} < p <= {self.p_high:g}"


def _bracket(stat: float, df: int) -> tuple[float, float]:
    if df not in CHI2_CRITICAL:
        raise ValueError(f"p-indicator table covers df 1..8, got df={df}")
    crit = CHI2_CRITICAL[df]
    hi = 1.0
    for alpha, c in zip(ALPHAS, crit):
        if stat < c:
            return alpha, hi
        hi = alpha
    return 0.0, ALPHAS[-1]


def chi_square_uniformity(counts: Sequence[int]) -> ChiSquare:
    """Pearson goodness of fit against equal expected counts."""
    obs = np.asarray(counts, dtype=float)
    if obs.ndim != 1 or obs.size < 2:
        raise ValueError("need at least two bins")
    expected = obs.sum() / obs.size
    if expected < 5:
        raise UnderpopulatedBins(f"expected count per bin is {expected:g}, need at least 5")
    stat = float(((obs - expected) ** 2 / expected).sum())
    df = obs.size - 1
    return ChiSquare(stat, df, *_bracket(stat, df))


def chi_square_independence(table) -> ChiSquare:
    """Pearson test of independence on an r x c contingency table."""
    obs = np.asarray(table, dtype=float)
    if obs.ndim != 2 or min(obs.shape) < 2:
        raise ValueError("need at least a 2x2 table")
    expected = np.outer(obs.sum(axis=1), obs.sum(axis=0)) / obs.sum()
    if expected.min() < 5:
        raise UnderpopulatedBins(f"smallest expected count is {expected.min():g}, need 5")
    stat = float(((obs - expected) ** 2 / expected).sum())
    df = (obs.shape[0] - 1) * (obs.shape[1] - 1)
    return ChiSquare(stat, df, *_bracket(stat, df))


def format_csv(rep: StatsReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rep.rows:
        w.writerow((r.entity, r.black, r.white, r.total))
    return buf.getvalue()


def write_csv(rep: StatsReport, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(rep))


def read_csv(path: str | os.PathLike) -> StatsReport:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"{path}: missing header {','.join(CSV_HEADER)}")
    return StatsReport(tuple(PixelStats(e, int(b), int(w), int(t)) for e, b, w, t in rows[1:]))
