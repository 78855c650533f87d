"""Post-solve analytics over decoded planning solutions.

All quantities here are recomputed from the raw solution arrays and the
scenario set; nothing is read back from solver internals. Daily figures
are scenario-weighted (weights sum to one over the whole set), annual
figures scale the weighted day by 365. Seasonal profiles renormalize
weights within each season so a short season is not dwarfed by a long
one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gridplan.core.types import DAYS, CostBook
from gridplan.errors import DataError
from gridplan.program.solution import PlanningSolution
from gridplan.scenarios.assemble import Scenario
from gridplan.scenarios.failures import OutageWindow
from gridplan.scenarios.features import SEASON_ORDER

_SIGN_TOL = 1e-9


def _check_alignment(solution: PlanningSolution, scenarios: list[Scenario]) -> None:
    ids = [sc.id for sc in scenarios]
    if ids != list(solution.scenario_ids):
        raise DataError("scenario list does not match the solution's scenario ids")


def _demand_stack(scenarios: list[Scenario]) -> np.ndarray:
    return np.stack([sc.demand_kw for sc in scenarios])


# ---------------------------------------------------------------------------
# cost breakdown


@dataclass(frozen=True)
class CostBreakdown:
    """Objective split: upfront investment, discounted O&M, discounted
    expected unserved-energy penalty."""

    investment: float
    om_npv: float
    eens_npv: float

    @property
    def total(self) -> float:
        return self.investment + self.om_npv + self.eens_npv


def objective_breakdown(solution: PlanningSolution, costs: CostBook) -> CostBreakdown:
    """Recompute the three objective terms from solution arrays and prices."""
    a = costs.annuity_factor()
    pv_total = float(solution.cap_pv_kw.sum())
    b_total = float(solution.cap_b_kwh.sum())
    weighted_ens = float(
        solution.scenario_weights @ solution.ens_kw.sum(axis=(1, 2))
    )
    return CostBreakdown(
        investment=costs.c_pv_per_kw * pv_total + costs.c_b_per_kwh * b_total,
        om_npv=a * (costs.om_pv_per_kw_yr * pv_total + costs.om_b_per_kwh_yr * b_total),
        eens_npv=a * costs.voll_per_kwh * costs.delta_t_h * weighted_ens,
    )


# ---------------------------------------------------------------------------
# nodal energy balance


@dataclass(frozen=True)
class NodalBalance:
    """Scenario-weighted daily energy per node plus annual unserved energy.

    ``net_export_kwh_day`` is generation-side: pv + discharge - charge
    + unserved - load; over a lossless network these sum to zero.
    """

    bus_ids: list[int]
    pv_kwh_day: np.ndarray
    discharge_kwh_day: np.ndarray
    charge_kwh_day: np.ndarray
    load_kwh_day: np.ndarray
    net_export_kwh_day: np.ndarray
    ens_kwh_year: np.ndarray

    @property
    def exporters(self) -> list[int]:
        return [b for b, v in zip(self.bus_ids, self.net_export_kwh_day) if v > _SIGN_TOL]

    @property
    def importers(self) -> list[int]:
        return [b for b, v in zip(self.bus_ids, self.net_export_kwh_day) if v < -_SIGN_TOL]

    @property
    def export_residual(self) -> float:
        """System-wide sum of net exports; ~0 for a feasible solution."""
        return float(self.net_export_kwh_day.sum())


def nodal_energy_balance(
    solution: PlanningSolution, scenarios: list[Scenario]
) -> NodalBalance:
    _check_alignment(solution, scenarios)
    w = solution.scenario_weights
    dt = solution.delta_t_h
    demand = _demand_stack(scenarios)

    def day_kwh(arr: np.ndarray) -> np.ndarray:
        return dt * np.einsum("s,sit->i", w, arr)

    pv = day_kwh(solution.pv_kw)
    dis = day_kwh(solution.discharge_kw)
    ch = day_kwh(solution.charge_kw)
    load = day_kwh(demand)
    ens = day_kwh(solution.ens_kw)
    return NodalBalance(
        bus_ids=list(solution.bus_ids),
        pv_kwh_day=pv,
        discharge_kwh_day=dis,
        charge_kwh_day=ch,
        load_kwh_day=load,
        net_export_kwh_day=pv + dis - ch + ens - load,
        ens_kwh_year=DAYS * ens,
    )


# ---------------------------------------------------------------------------
# seasonal dispatch


@dataclass(frozen=True)
class SeasonProfile:
    """System-wide hourly dispatch averaged over one season's scenarios,
    with weights renormalized to sum to one within the season."""

    season: str
    weight_share: float  # season's share of total probability
    pv_kw: np.ndarray
    charge_kw: np.ndarray
    discharge_kw: np.ndarray
    load_kw: np.ndarray
    ens_kw: np.ndarray

    @property
    def balance_residual_kw(self) -> np.ndarray:
        """Hourly pv + discharge - charge + unserved - load; ~0 when the
        underlying solution satisfies nodal power balance."""
        return self.pv_kw + self.discharge_kw - self.charge_kw + self.ens_kw - self.load_kw


def seasonal_dispatch_profiles(
    solution: PlanningSolution, scenarios: list[Scenario]
) -> dict[str, SeasonProfile]:
    _check_alignment(solution, scenarios)
    w = solution.scenario_weights
    demand = _demand_stack(scenarios)
    out: dict[str, SeasonProfile] = {}
    for season in SEASON_ORDER:
        mask = np.array([sc.season is season for sc in scenarios])
        if not mask.any():
            continue
        share = float(w[mask].sum())
        if share <= 0:
            raise DataError(f"season {season.value} has zero total weight")
        wn = np.zeros_like(w)
        wn[mask] = w[mask] / share

        def hourly(arr: np.ndarray) -> np.ndarray:
            return np.einsum("s,sit->t", wn, arr)

        out[season.value] = SeasonProfile(
            season=season.value,
            weight_share=share,
            pv_kw=hourly(solution.pv_kw),
            charge_kw=hourly(solution.charge_kw),
            discharge_kw=hourly(solution.discharge_kw),
            load_kw=hourly(demand),
            ens_kw=hourly(solution.ens_kw),
        )
    return out


# ---------------------------------------------------------------------------
# failure trace


@dataclass(frozen=True)
class NodeTrace:
    """Hourly operation of one bus in one scenario, with outage windows."""

    scenario_id: str
    bus: int
    pv_kw: np.ndarray
    charge_kw: np.ndarray
    discharge_kw: np.ndarray
    soc_kwh: np.ndarray
    ens_kw: np.ndarray
    load_kw: np.ndarray
    net_import_kw: np.ndarray  # load + charge - pv - discharge - unserved
    soc_start_kwh: float
    windows: tuple[OutageWindow, ...]

    @property
    def n_hours(self) -> int:
        return self.pv_kw.shape[0]

    @property
    def cyclic_gap_kwh(self) -> float:
        return abs(float(self.soc_kwh[-1]) - self.soc_start_kwh)

    def outage_kinds(self, hour: int) -> list[str]:
        return sorted(w.component for w in self.windows if hour in w.hours)


def node_failure_trace(
    solution: PlanningSolution,
    scenarios: list[Scenario],
    scenario_id: str,
    bus: int,
    tol: float = 1e-6,
) -> NodeTrace:
    """Extract one bus/scenario trace and audit the outage semantics:
    inside a battery window the state of charge must be frozen and both
    power variables zero; inside a PV window the PV dispatch must be zero.
    """
    _check_alignment(solution, scenarios)
    try:
        s = list(solution.scenario_ids).index(scenario_id)
    except ValueError:
        raise DataError(f"unknown scenario id {scenario_id!r}") from None
    try:
        i = list(solution.bus_ids).index(bus)
    except ValueError:
        raise DataError(f"unknown bus id {bus}") from None

    if solution.soc_init_frac is None:
        raise DataError("solution lacks the initial state-of-charge fraction")
    sc = scenarios[s]
    pv = solution.pv_kw[s, i]
    ch = solution.charge_kw[s, i]
    dis = solution.discharge_kw[s, i]
    soc = solution.soc_kwh[s, i]
    ens = solution.ens_kw[s, i]
    load = sc.demand_kw[i]
    soc_start = float(solution.soc_init_frac * solution.cap_b_kwh[i])

    windows = tuple(w for w in sc.outage_windows if w.bus == bus)
    trace = NodeTrace(
        scenario_id=scenario_id,
        bus=bus,
        pv_kw=pv,
        charge_kw=ch,
        discharge_kw=dis,
        soc_kwh=soc,
        ens_kw=ens,
        load_kw=load,
        net_import_kw=load + ch - pv - dis - ens,
        soc_start_kwh=soc_start,
        windows=windows,
    )
    _audit_windows(trace, tol)
    return trace


def _audit_windows(trace: NodeTrace, tol: float) -> None:
    problems: list[str] = []
    t_n = trace.n_hours
    for w in trace.windows:
        hours = [h for h in w.hours if 0 <= h < t_n]
        if w.component == "pv":
            worst = max((abs(float(trace.pv_kw[h])) for h in hours), default=0.0)
            if worst > tol:
                problems.append(
                    f"pv dispatch {worst:.3e} inside pv outage at bus {trace.bus}"
                )
        else:
            for h in hours:
                if abs(float(trace.charge_kw[h])) > tol or abs(float(trace.discharge_kw[h])) > tol:
                    problems.append(f"battery power nonzero in outage hour {h}")
                    break
            ref = trace.soc_kwh[hours[0] - 1] if hours and hours[0] > 0 else trace.soc_start_kwh
            drift = max(
                (abs(float(trace.soc_kwh[h]) - float(ref)) for h in hours), default=0.0
            )
            if drift > tol:
                problems.append(
                    f"state of charge drifts {drift:.3e} inside battery outage at bus {trace.bus}"
                )
    if problems:
        raise DataError(
            f"trace {trace.scenario_id}/bus {trace.bus} violates outage semantics: "
            + "; ".join(problems)
        )


# ---------------------------------------------------------------------------
# reliability


@dataclass(frozen=True)
class ReliabilityReport:
    """Expected unserved energy against the planning threshold."""

    eens_kwh_year: float
    expected_demand_kwh_year: float
    eens_fraction: float
    reliability_pct: float
    epsilon_rel: float
    target_met: bool
    bus_ids: list[int] = field(default_factory=list)
    ens_by_season_kwh_year: dict[str, np.ndarray] = field(default_factory=dict)


def reliability_metric(
    solution: PlanningSolution,
    scenarios: list[Scenario],
    epsilon_rel: float | None = None,
) -> ReliabilityReport:
    """Probability-weighted unserved energy, recomputed from raw arrays.

    The fraction is the reliability constraint's left side over its right
    side, so an Optimal solve yields fraction <= epsilon up to solver
    tolerance.
    """
    _check_alignment(solution, scenarios)
    if epsilon_rel is None:
        epsilon_rel = solution.epsilon_rel
    w = solution.scenario_weights
    dt = solution.delta_t_h
    demand = _demand_stack(scenarios)

    ens_daily = dt * float(w @ solution.ens_kw.sum(axis=(1, 2)))
    demand_daily = dt * float(w @ demand.sum(axis=(1, 2)))
    fraction = ens_daily / demand_daily if demand_daily > 0 else 0.0

    by_season: dict[str, np.ndarray] = {}
    for season in SEASON_ORDER:
        mask = np.array([sc.season is season for sc in scenarios])
        if not mask.any():
            continue
        by_season[season.value] = DAYS * dt * np.einsum(
            "s,sit->i", w[mask], solution.ens_kw[mask]
        )

    return ReliabilityReport(
        eens_kwh_year=DAYS * ens_daily,
        expected_demand_kwh_year=DAYS * demand_daily,
        eens_fraction=fraction,
        reliability_pct=100.0 * (1.0 - fraction),
        epsilon_rel=float(epsilon_rel),
        target_met=fraction <= epsilon_rel + 1e-9,
        bus_ids=list(solution.bus_ids),
        ens_by_season_kwh_year=by_season,
    )
