"""Domain types for the planning model.

Conventions used throughout the package:

* power in kW, energy in kWh, hourly resolution (delta_t = 1 h)
* line resistance in ohms, voltages handled as squared per-unit magnitudes
* a planning year has exactly 365 days; leap days are rejected on input
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field

import numpy as np

from gridplan.errors import DataError

HOURS = 24
DAYS = 365


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Line:
    """One distribution line between two buses."""

    from_bus: int
    to_bus: int
    r_ohm: float
    p_max_kw: float


@dataclass(frozen=True)
class NetworkModel:
    """Radial low-voltage network: buses, lines, and hosting limits.

    ``s_base_kw`` is the per-bus hosting capacity that caps the combined
    PV rating plus battery power rating installed at that bus.
    """

    buses: tuple[int, ...]
    lines: tuple[Line, ...]
    v_base_kv: float
    v_min_pu: float
    v_max_pu: float
    s_base_kw: np.ndarray  # hosting capacity per bus, aligned with `buses`
    slack_bus: int = 1

    def __post_init__(self):
        object.__setattr__(self, "buses", tuple(int(b) for b in self.buses))
        object.__setattr__(self, "lines", tuple(self.lines))
        object.__setattr__(self, "s_base_kw", _freeze(self.s_base_kw))
        self.validate()

    # -- derived views ----------------------------------------------------

    @property
    def n_buses(self) -> int:
        return len(self.buses)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    def bus_index(self, bus_id: int) -> int:
        try:
            return self.buses.index(bus_id)
        except ValueError:
            raise DataError(f"unknown bus id {bus_id}") from None

    def edge_index_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(from_idx, to_idx) position arrays for all lines."""
        fi = np.array([self.buses.index(ln.from_bus) for ln in self.lines], dtype=int)
        ti = np.array([self.buses.index(ln.to_bus) for ln in self.lines], dtype=int)
        return fi, ti

    # -- validation --------------------------------------------------------

    def validate(self) -> None:
        if self.n_buses < 1:
            raise DataError("network needs at least one bus")
        if len(set(self.buses)) != self.n_buses:
            raise DataError("duplicate bus ids")
        if self.slack_bus not in self.buses:
            raise DataError(f"slack bus {self.slack_bus} is not a network bus")
        if not (self.v_min_pu < 1.0 < self.v_max_pu):
            raise DataError(
                f"voltage band must straddle 1.0 pu, got [{self.v_min_pu}, {self.v_max_pu}]"
            )
        if self.v_base_kv <= 0:
            raise DataError("v_base_kv must be positive")
        if self.s_base_kw.shape != (self.n_buses,):
            raise DataError("s_base_kw must carry one value per bus")
        if np.any(self.s_base_kw < 0):
            raise DataError("hosting capacities must be non-negative")

        bus_set = set(self.buses)
        for ln in self.lines:
            if ln.from_bus not in bus_set or ln.to_bus not in bus_set:
                raise DataError(f"line {ln.from_bus}-{ln.to_bus} references unknown bus")
            if ln.r_ohm < 0:
                raise DataError(f"line {ln.from_bus}-{ln.to_bus} has negative resistance")
            if ln.p_max_kw <= 0:
                raise DataError(f"line {ln.from_bus}-{ln.to_bus} has non-positive limit")

        self._check_radial()

    def _check_radial(self) -> None:
        """Connected tree: exactly N-1 lines and no cycles (union-find)."""
        n = self.n_buses
        if self.n_lines != n - 1:
            raise DataError(
                f"radial network requires {n - 1} lines for {n} buses, got {self.n_lines}"
            )
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        pos = {b: i for i, b in enumerate(self.buses)}
        for ln in self.lines:
            ra, rb = find(pos[ln.from_bus]), find(pos[ln.to_bus])
            if ra == rb:
                raise DataError(
                    f"cycle detected: line {ln.from_bus}-{ln.to_bus} closes a loop"
                )
            parent[ra] = rb
        roots = {find(i) for i in range(n)}
        if len(roots) > 1:
            stranded = [b for i, b in enumerate(self.buses) if find(i) != find(pos[self.slack_bus])]
            raise DataError(f"network is disconnected; buses {stranded} unreachable from slack")


@dataclass(frozen=True)
class AnnualProfiles:
    """One year of hourly data: per-bus load and a shared PV capacity factor.

    ``load_kw`` has shape (365, N, 24); ``pv_factor`` has shape (365, 24)
    and is normalized so its annual maximum equals 1. A single PV series is
    shared by all buses (co-located community scale).
    """

    load_kw: np.ndarray
    pv_factor: np.ndarray
    day_dates: tuple[datetime.date, ...]

    def __post_init__(self):
        object.__setattr__(self, "load_kw", _freeze(self.load_kw))
        object.__setattr__(self, "pv_factor", _freeze(self.pv_factor))
        object.__setattr__(self, "day_dates", tuple(self.day_dates))
        self.validate()

    @property
    def n_buses(self) -> int:
        return self.load_kw.shape[1]

    def validate(self) -> None:
        if self.load_kw.ndim != 3 or self.load_kw.shape[0] != DAYS or self.load_kw.shape[2] != HOURS:
            raise DataError(
                f"load must be shaped (365, N, 24), got {self.load_kw.shape}"
            )
        if self.pv_factor.shape != (DAYS, HOURS):
            raise DataError(f"pv factor must be shaped (365, 24), got {self.pv_factor.shape}")
        if len(self.day_dates) != DAYS:
            raise DataError("incomplete year: need 365 dated days")
        if any(d.month == 2 and d.day == 29 for d in self.day_dates):
            raise DataError("leap day found; profiles must use a non-leap year")
        if np.any(self.load_kw < 0) or not np.all(np.isfinite(self.load_kw)):
            raise DataError("load values must be finite and non-negative")
        if np.any(self.pv_factor < 0) or np.any(self.pv_factor > 1 + 1e-12):
            raise DataError("pv factor must lie in [0, 1]")
        if not np.all(np.isfinite(self.pv_factor)):
            raise DataError("pv factor must be finite")


@dataclass(frozen=True)
class DeviceParams:
    """Battery/PV device characteristics and failure statistics."""

    eta_ch: float = 0.95
    eta_dis: float = 0.95
    soc_min_frac: float = 0.1
    soc_max_frac: float = 0.9
    soc_init_frac: float = 0.5
    c_rate_kw_per_kwh: float = 1.0  # battery power rating per unit energy capacity
    lambda_pv_per_year: float = 0.5
    lambda_b_per_year: float = 0.2
    mttr_pv_h: float = 8.0
    mttr_b_h: float = 4.0

    def __post_init__(self):
        if not (0 < self.eta_ch <= 1 and 0 < self.eta_dis <= 1):
            raise DataError("efficiencies must lie in (0, 1]")
        if not (0 <= self.soc_min_frac <= self.soc_init_frac <= self.soc_max_frac <= 1):
            raise DataError(
                "state-of-charge fractions must satisfy 0 <= min <= init <= max <= 1"
            )
        if self.c_rate_kw_per_kwh <= 0:
            raise DataError("c-rate must be positive")
        if self.lambda_pv_per_year < 0 or self.lambda_b_per_year < 0:
            raise DataError("failure rates must be non-negative")
        if self.mttr_pv_h <= 0 or self.mttr_b_h <= 0:
            raise DataError("mean repair times must be positive")


@dataclass(frozen=True)
class CostBook:
    """Investment, O&M, and reliability cost parameters.

    Monetary unit is arbitrary but must be consistent (AUD in the bundled
    configs). O&M is charged per installed unit per year and discounted over
    the horizon together with the unserved-energy penalty.
    """

    c_pv_per_kw: float
    c_b_per_kwh: float
    om_pv_per_kw_yr: float = 0.0
    om_b_per_kwh_yr: float = 0.0
    voll_per_kwh: float = 24.86
    discount_rate: float = 0.05
    horizon_years: int = 10
    cap_pv_max_kw: float = 1000.0
    cap_b_max_kwh: float = 1000.0
    epsilon_rel: float = 2e-5
    delta_t_h: float = 1.0

    def __post_init__(self):
        if self.c_pv_per_kw <= 0 or self.c_b_per_kwh <= 0:
            raise DataError("investment costs must be positive")
        if self.om_pv_per_kw_yr < 0 or self.om_b_per_kwh_yr < 0:
            raise DataError("O&M rates must be non-negative")
        if self.voll_per_kwh < 0:
            raise DataError("value of lost load must be non-negative")
        if not (0 < self.discount_rate < 1):
            raise DataError("discount rate must lie in (0, 1)")
        if self.horizon_years < 1:
            raise DataError("horizon must cover at least one year")
        if self.cap_pv_max_kw <= 0 or self.cap_b_max_kwh <= 0:
            raise DataError("capacity ceilings must be positive")
        if not (0 <= self.epsilon_rel < 1):
            raise DataError("unserved-energy fraction must lie in [0, 1)")
        if self.delta_t_h <= 0:
            raise DataError("time step must be positive")

    def annuity_factor(self) -> float:
        """Present value of 1 paid at the end of each year over the horizon."""
        r, h = self.discount_rate, self.horizon_years
        return (1.0 - (1.0 + r) ** (-h)) / r
