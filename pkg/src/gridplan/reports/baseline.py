"""Distributed-versus-centralized comparison.

The centralized variant pools every asset at one bus, which removes the
network's locational value and makes pooled assets hostage to any single
outage. At tight reliability thresholds it is typically infeasible; when
that happens the threshold is relaxed along a fixed ladder and the first
feasible level is recorded alongside the comparison table.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from gridplan.core.types import DAYS, CostBook, DeviceParams, NetworkModel
from gridplan.errors import DataError
from gridplan.program.builder import build_deterministic_equivalent
from gridplan.program.centralized import build_centralized_variant
from gridplan.program.solution import PlanningSolution, decode_solution
from gridplan.scenarios.assemble import Scenario
from gridplan.solve import OPTIMAL, solve

EPSILON_LADDER = (1e-3, 2e-3, 3e-3)


@dataclass(frozen=True)
class CentralizedOutcome:
    """One centralized solve attempt at one reliability threshold."""

    epsilon_rel: float
    status: str
    solution: PlanningSolution | None


def run_centralized_ladder(
    network: NetworkModel,
    scenarios: list[Scenario],
    params: DeviceParams,
    costs: CostBook,
    backend: str = "auto",
    ladder: tuple[float, ...] = EPSILON_LADDER,
) -> list[CentralizedOutcome]:
    """Solve the centralized variant at the configured threshold, then
    relax along the ladder until feasible (attempts are all recorded)."""
    outcomes: list[CentralizedOutcome] = []
    for eps in (costs.epsilon_rel,) + tuple(e for e in ladder if e > costs.epsilon_rel):
        cb = dataclasses.replace(costs, epsilon_rel=eps)
        lp = build_centralized_variant(network, scenarios, params, cb)
        res = solve(lp, backend=backend)
        sol = decode_solution(lp, res.x, res.status) if res.status == OPTIMAL else None
        outcomes.append(CentralizedOutcome(epsilon_rel=eps, status=res.status, solution=sol))
        if res.status == OPTIMAL:
            break
    return outcomes


def solve_distributed(
    network: NetworkModel,
    scenarios: list[Scenario],
    params: DeviceParams,
    costs: CostBook,
    backend: str = "auto",
    with_network: bool = True,
) -> tuple[str, PlanningSolution | None]:
    lp = build_deterministic_equivalent(
        network, scenarios, params, costs, with_network=with_network
    )
    res = solve(lp, backend=backend)
    if res.status != OPTIMAL:
        return res.status, None
    return res.status, decode_solution(lp, res.x, res.status)


def min_unserved_fraction(lp, scenarios: list[Scenario], backend: str = "auto"):
    """Smallest expected unserved-energy fraction the model can reach.

    Lifts the reliability cap (the eq35 row) and minimizes shed energy
    alone, answering "was eq35 the binding cause of infeasibility, and how
    far off is the target". Returns ``(status, fraction)``; the fraction is
    None unless the relaxed problem solves.
    """
    if lp.layout is None:
        raise DataError("model has no variable layout; cannot form the relaxation")
    keep = np.array([not t.startswith("eq35") for t in lp.row_tags])
    if keep.all():
        raise DataError("model has no reliability row to lift")
    sub = lp.rows_csr()[keep]
    objective = lp.objective.copy()
    objective[: 2 * lp.layout.n_buses] = 0.0  # leave only the shed-energy term
    relaxed = dataclasses.replace(
        lp,
        name=f"{lp.name}_min_shed",
        objective=objective,
        row_data=sub.data,
        row_indices=sub.indices,
        row_indptr=sub.indptr,
        row_relations=lp.row_relations[keep],
        row_rhs=lp.row_rhs[keep],
        row_tags=[t for t, k in zip(lp.row_tags, keep) if k],
    )
    res = solve(relaxed, backend=backend)
    if res.status != OPTIMAL:
        return res.status, None
    layout = lp.layout
    ss = np.arange(layout.n_scenarios)[:, None, None]
    ii = np.arange(layout.n_buses)[None, :, None]
    tt = np.arange(layout.n_hours)[None, None, :]
    ens = res.x[layout.ens(ii, tt, ss)]
    w = np.asarray(lp.meta["scenario_weights"], dtype=float)
    shed = float(w @ ens.sum(axis=(1, 2)))
    demand = float(w @ np.stack([s.demand_kw for s in scenarios]).sum(axis=(1, 2)))
    return res.status, shed / demand if demand > 0 else 0.0


def _metrics(sol: PlanningSolution, expected_demand_kwh_year: float) -> dict:
    annual_ens = sol.annual_eens_kwh
    fraction = (
        annual_ens / expected_demand_kwh_year if expected_demand_kwh_year > 0 else 0.0
    )
    return {
        "total_pv_kw": float(sol.cap_pv_kw.sum()),
        "total_batt_kwh": float(sol.cap_b_kwh.sum()),
        "npv_total": sol.objective_total,
        "annual_ens_kwh": annual_ens,
        "eens_pct": 100.0 * fraction,
        "reliability_pct": 100.0 * (1.0 - fraction),
        "target_met": fraction <= sol.epsilon_rel + 1e-9,
    }


_METRIC_ORDER = (
    "total_pv_kw",
    "total_batt_kwh",
    "npv_total",
    "annual_ens_kwh",
    "eens_pct",
    "reliability_pct",
    "target_met",
)


@dataclass(frozen=True)
class BaselineComparison:
    distributed_status: str
    distributed: dict | None
    distributed_epsilon: float | None
    centralized_runs: tuple[CentralizedOutcome, ...]
    expected_demand_kwh_year: float

    @property
    def first_feasible(self) -> CentralizedOutcome | None:
        for run in self.centralized_runs:
            if run.status == OPTIMAL:
                return run
        return None

    @property
    def ens_ratio(self) -> float | None:
        """Centralized over distributed annual unserved energy."""
        feas = self.first_feasible
        if feas is None or self.distributed is None:
            return None
        dist_ens = self.distributed["annual_ens_kwh"]
        if dist_ens <= 0:
            return None
        return feas.solution.annual_eens_kwh / dist_ens

    def to_rows(self) -> list[list]:
        feas = self.first_feasible
        cent = (
            _metrics(feas.solution, self.expected_demand_kwh_year) if feas else None
        )
        rows: list[list] = [
            ["status", self.distributed_status,
             self.centralized_runs[0].status if self.centralized_runs else ""],
            ["epsilon_rel", self.distributed_epsilon,
             feas.epsilon_rel if feas else None],
        ]
        for key in _METRIC_ORDER:
            rows.append([
                key,
                self.distributed[key] if self.distributed else None,
                cent[key] if cent else None,
            ])
        rows.append(["ens_ratio_centralized_over_distributed", None, self.ens_ratio])
        for run in self.centralized_runs:
            rows.append([f"ladder_epsilon_{run.epsilon_rel!r}", None, run.status])
        rows.append([
            "first_feasible_epsilon", None, feas.epsilon_rel if feas else None,
        ])
        return rows


def baseline_compare(
    distributed_status: str,
    distributed: PlanningSolution | None,
    centralized_runs: list[CentralizedOutcome],
    scenarios: list[Scenario],
) -> BaselineComparison:
    """Assemble the comparison table from both solve attempts.

    Expected demand is taken from the scenario set; asset pooling keeps
    total demand identical across the two variants, so one figure serves
    both columns.
    """
    if distributed is not None:
        ids = [sc.id for sc in scenarios]
        if ids != list(distributed.scenario_ids):
            raise DataError("scenario list does not match the distributed solution")
        weights = distributed.scenario_weights
        dt = distributed.delta_t_h
        eps = distributed.epsilon_rel
    else:
        weights = np.array([sc.weight for sc in scenarios])
        dt = 1.0
        eps = None
    demand = np.stack([sc.demand_kw for sc in scenarios])
    expected_year = DAYS * dt * float(weights @ demand.sum(axis=(1, 2)))

    return BaselineComparison(
        distributed_status=distributed_status,
        distributed=_metrics(distributed, expected_year) if distributed else None,
        distributed_epsilon=eps,
        centralized_runs=tuple(centralized_runs),
        expected_demand_kwh_year=expected_year,
    )
