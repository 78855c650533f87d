"""Load and PV time-series ingestion.

Two plain CSV schemas, one row per value:

* ``load.csv``: ``day,hour,bus,kw`` with day 1..365, hour 0..23, bus ids
  matching the network file.
* ``pv.csv``: ``day,hour,factor`` — one shared PV capacity-factor series.

Dates are assigned from January 1 of a fixed non-leap base year; only the
month matters downstream (seasonal stratification).
"""

from __future__ import annotations

import csv
import datetime
import logging
from pathlib import Path

import numpy as np

from gridplan.core.types import DAYS, HOURS, AnnualProfiles, NetworkModel
from gridplan.errors import DataError

log = logging.getLogger(__name__)

BASE_YEAR = 2023  # non-leap


def year_dates(base_year: int = BASE_YEAR) -> tuple[datetime.date, ...]:
    start = datetime.date(base_year, 1, 1)
    return tuple(start + datetime.timedelta(days=d) for d in range(DAYS))


def _resolve(path, pv_path):
    path = Path(path)
    if path.is_dir():
        return path / "load.csv", Path(pv_path) if pv_path else path / "pv.csv"
    return path, Path(pv_path) if pv_path else path.parent / "pv.csv"


def load_profiles(path, network: NetworkModel, pv_path=None) -> AnnualProfiles:
    load_path, pv_path = _resolve(path, pv_path)
    for p in (load_path, pv_path):
        if not p.exists():
            raise DataError(f"profile file not found: {p}")

    n = network.n_buses
    pos = {b: i for i, b in enumerate(network.buses)}
    load = np.full((DAYS, n, HOURS), np.nan)

    with open(load_path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if header is None or [c.strip().lower() for c in header] != ["day", "hour", "bus", "kw"]:
            raise DataError(f"{load_path}:1: header must be day,hour,bus,kw")
        for lineno, row in enumerate(rd, start=2):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                day, hour, bus, kw = int(row[0]), int(row[1]), int(row[2]), float(row[3])
            except (ValueError, IndexError):
                raise DataError(f"{load_path}:{lineno}: cannot parse row") from None
            if not (1 <= day <= DAYS):
                raise DataError(f"{load_path}:{lineno}: day {day} outside 1..365")
            if not (0 <= hour < HOURS):
                raise DataError(f"{load_path}:{lineno}: hour {hour} outside 0..23")
            if bus not in pos:
                raise DataError(
                    f"{load_path}:{lineno}: bus {bus} not in network "
                    f"(node-count mismatch or bad id)"
                )
            load[day - 1, pos[bus], hour] = kw

    if np.isnan(load).any():
        total = int(np.isnan(load).sum())
        first = np.argwhere(np.isnan(load))[0]
        raise DataError(
            f"{load_path}: incomplete year: {total} missing hours "
            f"(first gap: day {first[0] + 1}, bus {network.buses[first[1]]}, hour {first[2]})"
        )

    pv = np.full((DAYS, HOURS), np.nan)
    with open(pv_path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if header is None or [c.strip().lower() for c in header] != ["day", "hour", "factor"]:
            raise DataError(f"{pv_path}:1: header must be day,hour,factor")
        for lineno, row in enumerate(rd, start=2):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                day, hour, f = int(row[0]), int(row[1]), float(row[2])
            except (ValueError, IndexError):
                raise DataError(f"{pv_path}:{lineno}: cannot parse row") from None
            if not (1 <= day <= DAYS) or not (0 <= hour < HOURS):
                raise DataError(f"{pv_path}:{lineno}: day/hour out of range")
            pv[day - 1, hour] = f

    if np.isnan(pv).any():
        total = int(np.isnan(pv).sum())
        raise DataError(f"{pv_path}: incomplete year: {total} missing hours")

    if np.any(pv < 0):
        raise DataError(f"{pv_path}: negative capacity factors")
    peak = pv.max()
    if peak > 0 and abs(peak - 1.0) > 1e-12:
        log.info("rescaling PV series so peak = 1 (scale factor %.6g)", 1.0 / peak)
        pv = pv / peak
    elif peak == 0:
        log.warning("PV series is identically zero; nothing to rescale")

    return AnnualProfiles(load_kw=load, pv_factor=pv, day_dates=year_dates())


def save_profiles(profiles: AnnualProfiles, load_path, pv_path=None, bus_ids=None) -> None:
    load_path = Path(load_path)
    pv_path = Path(pv_path) if pv_path else load_path.parent / "pv.csv"
    n = profiles.n_buses
    if bus_ids is None:
        bus_ids = tuple(range(1, n + 1))
    with open(load_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["day", "hour", "bus", "kw"])
        for d in range(DAYS):
            for i in range(n):
                for t in range(HOURS):
                    w.writerow([d + 1, t, bus_ids[i], repr(float(profiles.load_kw[d, i, t]))])
    with open(pv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["day", "hour", "factor"])
        for d in range(DAYS):
            for t in range(HOURS):
                w.writerow([d + 1, t, repr(float(profiles.pv_factor[d, t]))])
