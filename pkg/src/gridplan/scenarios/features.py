"""Daily feature vectors, seasonal stratification, normalization, PCA.

Each day becomes one feature row: the hourly load of every bus followed by
the shared hourly PV factor, giving dimension N*24 + 24. Days are split by
calendar month into four austral seasons before any normalization or
clustering, so each season is reduced and clustered on its own statistics.
"""

from __future__ import annotations

import datetime
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from gridplan.core.types import DAYS, HOURS, AnnualProfiles
from gridplan.errors import DataError

log = logging.getLogger(__name__)


class Season(Enum):
    SUMMER = "summer"
    AUTUMN = "autumn"
    WINTER = "winter"
    SPRING = "spring"


# austral seasons by calendar month
SEASON_MONTHS: dict[Season, tuple[int, ...]] = {
    Season.SUMMER: (12, 1, 2),
    Season.AUTUMN: (3, 4, 5),
    Season.WINTER: (6, 7, 8),
    Season.SPRING: (9, 10, 11),
}

SEASON_ORDER: tuple[Season, ...] = (Season.SUMMER, Season.AUTUMN, Season.WINTER, Season.SPRING)


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray  # (365, D)
    row_day: np.ndarray  # day index per row, 0..364
    n_buses: int

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SeasonPartition:
    day_indices: dict[Season, np.ndarray]

    def validate(self) -> None:
        all_days = np.concatenate([self.day_indices[s] for s in SEASON_ORDER])
        if len(all_days) != DAYS or len(np.unique(all_days)) != DAYS:
            raise DataError("season partition must cover all 365 days exactly once")


def build_feature_matrix(profiles: AnnualProfiles) -> FeatureMatrix:
    n = profiles.n_buses
    load_flat = profiles.load_kw.reshape(DAYS, n * HOURS)
    values = np.hstack([load_flat, profiles.pv_factor])
    return FeatureMatrix(values=values, row_day=np.arange(DAYS), n_buses=n)


def season_of(date: datetime.date) -> Season:
    for season, months in SEASON_MONTHS.items():
        if date.month in months:
            return season
    raise AssertionError("unreachable")


def stratify_seasons(fm: FeatureMatrix, dates) -> SeasonPartition:
    if len(dates) != len(fm.row_day):
        raise DataError("one date required per feature row")
    buckets: dict[Season, list[int]] = {s: [] for s in SEASON_ORDER}
    for row, date in zip(fm.row_day, dates):
        buckets[season_of(date)].append(int(row))
    part = SeasonPartition({s: np.array(v, dtype=int) for s, v in buckets.items()})
    part.validate()
    return part


def normalize_minmax(x: np.ndarray) -> np.ndarray:
    """Column-wise min-max scaling to [0, 1]; constant columns map to 0."""
    if x.shape[0] < 2:
        raise DataError("min-max normalization needs at least 2 rows")
    lo = x.min(axis=0)
    hi = x.max(axis=0)
    span = hi - lo
    out = np.zeros_like(x, dtype=float)
    nz = span > 0
    out[:, nz] = (x[:, nz] - lo[nz]) / span[nz]
    return out


def reduce_pca(x_norm: np.ndarray, variance_target: float = 0.95) -> tuple[np.ndarray, np.ndarray]:
    """Project rows onto the leading principal components.

    Returns (scores, loadings) where scores = centered @ loadings.T and the
    component count is the smallest m whose cumulative explained variance
    reaches the target. Reconstruction: scores @ loadings + column means.
    """
    if x_norm.shape[0] < 2:
        raise DataError("PCA needs at least 2 rows")
    if not (0 < variance_target <= 1):
        raise DataError("variance target must lie in (0, 1]")
    centered = x_norm - x_norm.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    total = float(np.sum(s**2))
    if total <= 0:
        log.warning("degenerate all-constant matrix: returning a single zero component")
        return np.zeros((x_norm.shape[0], 1)), np.zeros((1, x_norm.shape[1]))
    ratios = s**2 / total
    cum = np.cumsum(ratios)
    m = int(np.searchsorted(cum, variance_target - 1e-12) + 1)
    m = min(m, len(s))
    scores = u[:, :m] * s[:m]
    return scores, vt[:m]
