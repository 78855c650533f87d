"""Decoded planning results and their JSON round trip.

A solved column vector is opaque; this module maps it back onto the
structured quantities planners care about: installed capacities per bus,
hourly dispatch per scenario, and the three cost terms. Operational
arrays are scenario-major (S, N, T); line flow is (S, E, T). Network-free
models carry ``flow_kw = None`` and ``voltage_pu = None``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gridplan.core.types import DAYS
from gridplan.errors import DataError
from gridplan.program.builder import THROUGHPUT_TIE_BREAK
from gridplan.program.indexing import LinearProgram

SOLUTION_SCHEMA_VERSION = 1

_OPERATION_KEYS = ("pv_kw", "charge_kw", "discharge_kw", "soc_kwh", "ens_kw")


@dataclass
class PlanningSolution:
    """Structured view of one solved planning program."""

    status: str
    objective_total: float
    cost_investment: float
    cost_om_npv: float
    cost_eens_npv: float
    cap_pv_kw: np.ndarray  # (N,)
    cap_b_kwh: np.ndarray  # (N,)
    pv_kw: np.ndarray  # (S, N, T)
    charge_kw: np.ndarray
    discharge_kw: np.ndarray
    soc_kwh: np.ndarray
    ens_kw: np.ndarray
    flow_kw: np.ndarray | None  # (S, E, T), signed along each edge
    voltage_pu: np.ndarray | None  # (S, N, T), magnitude
    bus_ids: list[int]
    edges: list[list[int]]
    scenario_ids: list[str]
    scenario_weights: np.ndarray  # (S,)
    delta_t_h: float
    epsilon_rel: float
    soc_init_frac: float | None = None  # day-start state of charge per unit capacity

    @property
    def n_buses(self) -> int:
        return len(self.bus_ids)

    @property
    def n_scenarios(self) -> int:
        return len(self.scenario_ids)

    @property
    def n_hours(self) -> int:
        return self.pv_kw.shape[2]

    @property
    def annual_eens_kwh(self) -> float:
        """Scenario-weighted daily unserved energy scaled to a year."""
        daily = self.scenario_weights @ self.ens_kw.sum(axis=(1, 2))
        return float(DAYS * daily * self.delta_t_h)

    def validate(self) -> None:
        n, s, t = self.n_buses, self.n_scenarios, self.n_hours
        if self.cap_pv_kw.shape != (n,) or self.cap_b_kwh.shape != (n,):
            raise DataError("capacity arrays must hold one value per bus")
        for key in _OPERATION_KEYS:
            if getattr(self, key).shape != (s, n, t):
                raise DataError(f"{key} must have shape (S, N, T) = ({s}, {n}, {t})")
        if self.voltage_pu is not None and self.voltage_pu.shape != (s, n, t):
            raise DataError("voltage_pu must have shape (S, N, T)")
        if self.flow_kw is not None and self.flow_kw.shape != (s, len(self.edges), t):
            raise DataError("flow_kw must have shape (S, E, T)")
        if self.scenario_weights.shape != (s,):
            raise DataError("one weight per scenario required")
        parts = self.cost_investment + self.cost_om_npv + self.cost_eens_npv
        # tolerance covers the vanishing dispatch tie-break term, which is in
        # the program objective but deliberately not in the three cost terms
        if abs(parts - self.objective_total) > 1e-5 * max(1.0, abs(self.objective_total)):
            raise DataError(
                f"cost terms sum to {parts:.6f} but objective is {self.objective_total:.6f}"
            )


def decode_values(
    layout,
    meta: dict,
    x: np.ndarray,
    status: str = "Optimal",
    objective_total: float | None = None,
) -> PlanningSolution:
    """Map a primal vector onto structured quantities via layout + metadata.

    When ``objective_total`` is omitted it is reconstructed as the sum of
    the three cost terms, which equals the program objective by
    construction; passing the solver's own value instead turns the
    dataclass validation into a consistency cross-check.
    """
    x = np.asarray(x, dtype=float) + 0.0  # drop negative zeros
    if x.shape != (layout.n_cols,):
        raise DataError(f"value vector has length {x.size}, program has {layout.n_cols} columns")

    n, t, n_s = layout.n_buses, layout.n_hours, layout.n_scenarios
    ss = np.arange(n_s)[:, None, None]
    ii = np.arange(n)[None, :, None]
    tt = np.arange(t)[None, None, :]

    cap_pv = x[layout.cap_pv(np.arange(n))]
    cap_b = x[layout.cap_b(np.arange(n))]
    weights = np.asarray(meta.get("scenario_weights", np.ones(n_s) / n_s), dtype=float)
    delta_t = float(meta.get("delta_t_h", 1.0))

    flow = volt = None
    if layout.with_network:
        ee = np.arange(layout.n_edges)[None, :, None]
        te = np.arange(t)[None, None, :]
        flow = x[layout.flow(ee, te, np.arange(n_s)[:, None, None])]
        volt = np.sqrt(np.maximum(x[layout.voltsq(ii, tt, ss)], 0.0))

    cc = meta.get("cost_constants")
    if cc is None:
        raise DataError("program metadata lacks cost constants; cannot split the objective")
    ens = x[layout.ens(ii, tt, ss)]
    charge = x[layout.ch(ii, tt, ss)]
    discharge = x[layout.dis(ii, tt, ss)]
    investment = float(cc["c_pv_per_kw"] * cap_pv.sum() + cc["c_b_per_kwh"] * cap_b.sum())
    om_npv = float(
        cc["annuity"] * (cc["om_pv_per_kw_yr"] * cap_pv.sum() + cc["om_b_per_kwh_yr"] * cap_b.sum())
    )
    eens_npv = float(
        cc["annuity"] * cc["voll_per_kwh"] * delta_t * (weights @ ens.sum(axis=(1, 2)))
    )
    # the reconstructed total carries the dispatch tie-break term so it
    # matches the program objective; the three reported terms do not
    tie = float(
        THROUGHPUT_TIE_BREAK
        * cc["annuity"]
        * cc["voll_per_kwh"]
        * delta_t
        * (weights @ (charge + discharge).sum(axis=(1, 2)))
    )

    sol = PlanningSolution(
        status=status,
        objective_total=(
            investment + om_npv + eens_npv + tie if objective_total is None else objective_total
        ),
        cost_investment=investment,
        cost_om_npv=om_npv,
        cost_eens_npv=eens_npv,
        cap_pv_kw=cap_pv,
        cap_b_kwh=cap_b,
        pv_kw=x[layout.p(ii, tt, ss)],
        charge_kw=charge,
        discharge_kw=discharge,
        soc_kwh=x[layout.soc(ii, tt, ss)],
        ens_kw=ens,
        flow_kw=flow,
        voltage_pu=volt,
        bus_ids=[int(b) for b in meta.get("bus_ids", range(1, n + 1))],
        edges=[list(e) for e in meta.get("edges", [])],
        scenario_ids=list(meta.get("scenario_ids", [str(s) for s in range(n_s)])),
        scenario_weights=weights,
        delta_t_h=delta_t,
        epsilon_rel=float(meta.get("epsilon_rel", 0.0)),
        soc_init_frac=(
            float(meta["soc_init_frac"]) if "soc_init_frac" in meta else None
        ),
    )
    sol.validate()
    return sol


def decode_solution(lp: LinearProgram, x: np.ndarray, status: str = "Optimal") -> PlanningSolution:
    """Map a primal vector back onto structured planning quantities."""
    if lp.layout is None:
        raise DataError("program carries no column layout; cannot decode")
    x = np.asarray(x, dtype=float)
    if x.shape != (lp.n_cols,):
        raise DataError(f"value vector has length {x.size}, program has {lp.n_cols} columns")
    return decode_values(lp.layout, lp.meta, x, status, objective_total=float(lp.objective @ x))


def solution_to_dict(sol: PlanningSolution) -> dict:
    d = {
        "schema_version": SOLUTION_SCHEMA_VERSION,
        "status": sol.status,
        "objective_total": sol.objective_total,
        "cost_investment": sol.cost_investment,
        "cost_om_npv": sol.cost_om_npv,
        "cost_eens_npv": sol.cost_eens_npv,
        "annual_eens_kwh": sol.annual_eens_kwh,
        "bus_ids": sol.bus_ids,
        "edges": sol.edges,
        "scenario_ids": sol.scenario_ids,
        "scenario_weights": sol.scenario_weights.tolist(),
        "delta_t_h": sol.delta_t_h,
        "epsilon_rel": sol.epsilon_rel,
        "soc_init_frac": sol.soc_init_frac,
        "cap_pv_kw": sol.cap_pv_kw.tolist(),
        "cap_b_kwh": sol.cap_b_kwh.tolist(),
        "operations": {key: getattr(sol, key).tolist() for key in _OPERATION_KEYS},
    }
    d["operations"]["flow_kw"] = None if sol.flow_kw is None else sol.flow_kw.tolist()
    d["operations"]["voltage_pu"] = None if sol.voltage_pu is None else sol.voltage_pu.tolist()
    return d


def write_solution(sol: PlanningSolution, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(solution_to_dict(sol), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def read_solution(path: str | Path) -> PlanningSolution:
    with open(path) as fh:
        d = json.load(fh)
    version = d.get("schema_version")
    if version != SOLUTION_SCHEMA_VERSION:
        raise DataError(f"unsupported solution schema {version!r}")
    ops = d["operations"]

    def arr(key):
        return None if ops[key] is None else np.asarray(ops[key], dtype=float)

    sol = PlanningSolution(
        status=d["status"],
        objective_total=d["objective_total"],
        cost_investment=d["cost_investment"],
        cost_om_npv=d["cost_om_npv"],
        cost_eens_npv=d["cost_eens_npv"],
        cap_pv_kw=np.asarray(d["cap_pv_kw"], dtype=float),
        cap_b_kwh=np.asarray(d["cap_b_kwh"], dtype=float),
        pv_kw=arr("pv_kw"),
        charge_kw=arr("charge_kw"),
        discharge_kw=arr("discharge_kw"),
        soc_kwh=arr("soc_kwh"),
        ens_kw=arr("ens_kw"),
        flow_kw=arr("flow_kw"),
        voltage_pu=arr("voltage_pu"),
        bus_ids=[int(b) for b in d["bus_ids"]],
        edges=[list(e) for e in d["edges"]],
        scenario_ids=list(d["scenario_ids"]),
        scenario_weights=np.asarray(d["scenario_weights"], dtype=float),
        delta_t_h=d["delta_t_h"],
        epsilon_rel=d["epsilon_rel"],
        soc_init_frac=d.get("soc_init_frac"),
    )
    sol.validate()
    return sol
