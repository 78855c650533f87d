"""Component failure statistics and outage-window sampling.

Annual Poisson failure rates become per-day, per-bus probabilities; the
day's system state is then classified as normal operation, a single-class
outage, or a combined PV+battery outage, with the three class
probabilities summing to one by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gridplan.core.types import HOURS, DeviceParams, NetworkModel
from gridplan.errors import DataError

NORMAL = "normal"
SINGLE = "single"
COMBINED = "combined"
FAILURE_CLASSES = (NORMAL, SINGLE, COMBINED)


@dataclass(frozen=True)
class FailureClassProbabilities:
    p_pv_day: float
    p_b_day: float
    p_normal: float
    p_single: float
    p_combined: float

    def as_dict(self) -> dict[str, float]:
        return {
            "pv_day": self.p_pv_day,
            "battery_day": self.p_b_day,
            "normal": self.p_normal,
            "single": self.p_single,
            "combined": self.p_combined,
        }


@dataclass(frozen=True)
class OutageWindow:
    bus: int  # bus id
    component: str  # "pv" | "battery"
    start_h: int
    duration_h: int

    @property
    def hours(self) -> range:
        return range(self.start_h, self.start_h + self.duration_h)


def fta_probabilities(params: DeviceParams, n_buses: int) -> FailureClassProbabilities:
    """Daily normal/single/combined class probabilities for an N-bus system.

    Per-component daily failure probability p = 1 - exp(-lambda/365).
    Normal: no component fails anywhere. Combined: at least one bus loses
    both components the same day. Single: the residual mass.
    """
    if n_buses < 1:
        raise DataError("n_buses must be at least 1")
    p_pv = 1.0 - math.exp(-params.lambda_pv_per_year / 365.0)
    p_b = 1.0 - math.exp(-params.lambda_b_per_year / 365.0)
    p_normal = ((1.0 - p_pv) * (1.0 - p_b)) ** n_buses
    p_combined = 1.0 - (1.0 - p_pv * p_b) ** n_buses
    p_single = 1.0 - p_normal - p_combined
    # guard tiny negative residue from floating-point cancellation
    p_single = max(p_single, 0.0)
    return FailureClassProbabilities(p_pv, p_b, p_normal, p_single, p_combined)


def _draw_window(rng: np.random.Generator, mttr_h: float, start: int | None = None) -> tuple[int, int]:
    if start is None:
        start = int(rng.integers(HOURS))
    duration = max(1, math.ceil(rng.exponential(mttr_h)))
    duration = min(duration, HOURS - start)  # clip at the day boundary
    return start, duration


def sample_failure_events(
    failure_class: str,
    network: NetworkModel,
    params: DeviceParams,
    rng: np.random.Generator | int,
    multi_node: bool = False,
) -> list[OutageWindow]:
    """Sample the outage windows realizing one failure-class scenario.

    Single: one bus loses one component (PV vs battery odds proportional to
    their daily failure probabilities); the window starts uniformly in the
    day and lasts an Exponential(MTTR) duration rounded up to whole hours.
    Combined: one bus loses both, with the battery window forced to overlap
    the PV window by at least one hour.
    """
    if failure_class == NORMAL:
        return []
    if failure_class not in (SINGLE, COMBINED):
        raise DataError(f"unknown failure class {failure_class!r}")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(np.random.SeedSequence(int(rng)))

    buses = [int(rng.integers(network.n_buses))]
    if multi_node:
        p_any = 1.0 - math.exp(
            -(params.lambda_pv_per_year + params.lambda_b_per_year) / 365.0
        )
        extra = np.flatnonzero(rng.random(network.n_buses) < p_any)
        buses = sorted(set(buses) | set(int(e) for e in extra))

    windows: list[OutageWindow] = []
    for pos in buses:
        bus_id = network.buses[pos]
        if failure_class == SINGLE:
            p_pv = 1.0 - math.exp(-params.lambda_pv_per_year / 365.0)
            p_b = 1.0 - math.exp(-params.lambda_b_per_year / 365.0)
            total = p_pv + p_b
            pick_pv = rng.random() < (p_pv / total if total > 0 else 1.0)
            mttr = params.mttr_pv_h if pick_pv else params.mttr_b_h
            start, dur = _draw_window(rng, mttr)
            windows.append(OutageWindow(bus_id, "pv" if pick_pv else "battery", start, dur))
        else:
            pv_start, pv_dur = _draw_window(rng, params.mttr_pv_h)
            b_dur = max(1, math.ceil(rng.exponential(params.mttr_b_h)))
            # battery start chosen so the two windows overlap by >= 1 hour
            lo = max(0, pv_start - b_dur + 1)
            hi = min(HOURS - 1, pv_start + pv_dur - 1)
            b_start = int(rng.integers(lo, hi + 1))
            b_dur = min(b_dur, HOURS - b_start)
            windows.append(OutageWindow(bus_id, "pv", pv_start, pv_dur))
            windows.append(OutageWindow(bus_id, "battery", b_start, b_dur))
    return windows
