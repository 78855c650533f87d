"""Assembly of the deterministic-equivalent planning program.

Two-stage structure: investment columns (PV kW, battery kWh per bus) are
shared by every scenario block, which enforces non-anticipativity without
extra rows. Storage is tracked over T+1 states per battery and scenario:
the anchor state is the affine expression soc_init_frac * cap_b (not a
column), hour columns hold end-of-hour states, and the first recursion row
carries the anchor coefficient. Failed hours freeze the state because the
charge/discharge ceilings drop to zero while the recursion stays active.

ENS columns are additionally capped by nodal demand; this cannot change
the optimum (over-shedding is never useful) but keeps solutions tidy.
"""

from __future__ import annotations

import numpy as np

from gridplan.core.types import CostBook, DeviceParams, NetworkModel
from gridplan.errors import DataError, DimensionError
from gridplan.program.indexing import (
    RELATION_EQ,
    RELATION_GE,
    RELATION_LE,
    LinearProgram,
    LpBuilder,
    VariableLayout,
)
from gridplan.scenarios.assemble import Scenario

MAX_COLUMNS = 2_000_000


def _scenario_hours(scenarios: list[Scenario]) -> int:
    hours = {s.n_hours for s in scenarios}
    if len(hours) != 1:
        raise DataError("all scenarios must share the same hour count")
    return hours.pop()


def layout_for(network: NetworkModel, scenarios: list[Scenario], with_network: bool = True) -> VariableLayout:
    return VariableLayout(
        n_buses=network.n_buses,
        n_edges=network.n_lines if with_network else 0,
        n_hours=_scenario_hours(scenarios),
        n_scenarios=len(scenarios),
        with_network=with_network,
    )


# Tie-break cost on battery throughput, as a fraction of the unserved-energy
# penalty. With costless PV curtailment the program has tied optima, some of
# which charge and discharge simultaneously to burn off surplus; a vanishing
# wear cost makes the clean dispatch strictly preferred without measurably
# moving the objective.
THROUGHPUT_TIE_BREAK = 1e-6


def build_objective(
    network: NetworkModel,
    costs: CostBook,
    scenarios: list[Scenario],
    layout: VariableLayout | None = None,
) -> np.ndarray:
    """Cost vector: annualized investment+O&M on capacities, discounted
    expected unserved-energy penalty on ENS columns."""
    if layout is None:
        layout = layout_for(network, scenarios)
    a = costs.annuity_factor()
    obj = np.zeros(layout.n_cols)
    n, t = layout.n_buses, layout.n_hours
    obj[0:n] = costs.c_pv_per_kw + a * costs.om_pv_per_kw_yr
    obj[n : 2 * n] = costs.c_b_per_kwh + a * costs.om_b_per_kwh_yr
    ii = np.repeat(np.arange(n), t)
    tt = np.tile(np.arange(t), n)
    for s, sc in enumerate(scenarios):
        shed = a * sc.weight * costs.voll_per_kwh * costs.delta_t_h
        obj[layout.ens(ii, tt, s)] = shed
        obj[layout.ch(ii, tt, s)] = THROUGHPUT_TIE_BREAK * shed
        obj[layout.dis(ii, tt, s)] = THROUGHPUT_TIE_BREAK * shed
    return obj


def add_planning_bounds(
    lp: LpBuilder,
    network: NetworkModel,
    params: DeviceParams,
    costs: CostBook,
    cap_pv_max_per_bus: np.ndarray | None = None,
    cap_b_max_per_bus: np.ndarray | None = None,
) -> None:
    n = lp.layout.n_buses
    pv_cols = np.arange(n)
    b_cols = n + np.arange(n)
    pv_max = (
        np.full(n, costs.cap_pv_max_kw)
        if cap_pv_max_per_bus is None
        else np.asarray(cap_pv_max_per_bus, dtype=float)
    )
    b_max = (
        np.full(n, costs.cap_b_max_kwh)
        if cap_b_max_per_bus is None
        else np.asarray(cap_b_max_per_bus, dtype=float)
    )
    lp.set_bounds(pv_cols, lower=0.0, upper=pv_max, tag="eq20")
    lp.set_bounds(b_cols, lower=0.0, upper=b_max, tag="eq21")

    # hosting capacity: PV rating plus battery power rating per bus
    cols = np.column_stack([pv_cols, b_cols])
    vals = np.column_stack([np.ones(n), np.full(n, params.c_rate_kw_per_kwh)])
    lp.add_block(cols, vals, RELATION_LE, network.s_base_kw, [f"eq19_i{i}" for i in range(n)])


def add_dispatch_constraints(
    lp: LpBuilder,
    scenarios: list[Scenario],
    params: DeviceParams,
    delta_t: float = 1.0,
) -> None:
    lay = lp.layout
    n, t = lay.n_buses, lay.n_hours
    ii = np.repeat(np.arange(n), t)
    tt = np.tile(np.arange(t), n)
    ones = np.ones(n * t)

    for s, sc in enumerate(scenarios):
        p_cols = lay.p(ii, tt, s)
        ch_cols = lay.ch(ii, tt, s)
        dis_cols = lay.dis(ii, tt, s)
        soc_cols = lay.soc(ii, tt, s)
        ens_cols = lay.ens(ii, tt, s)

        # PV output limited by installed capacity, hourly factor, availability
        pv_cap_coef = -(sc.pv_factor[tt] * sc.pv_avail[ii, tt])
        lp.add_block(
            np.column_stack([p_cols, lay.cap_pv(ii)]),
            np.column_stack([ones, pv_cap_coef]),
            RELATION_LE,
            np.zeros(n * t),
            [f"eq22_i{i}_t{h}_s{s}" for i in range(n) for h in range(t)],
        )

        # charge/discharge ceilings from the battery power rating
        b_coef = -(params.c_rate_kw_per_kwh * sc.batt_avail[ii, tt])
        for cols, label in ((ch_cols, "eq23c"), (dis_cols, "eq23d")):
            lp.add_block(
                np.column_stack([cols, lay.cap_b(ii)]),
                np.column_stack([ones, b_coef]),
                RELATION_LE,
                np.zeros(n * t),
                [f"{label}_i{i}_t{h}_s{s}" for i in range(n) for h in range(t)],
            )

        # storage recursion; hour 0 row anchors to the initial state
        kd = delta_t / params.eta_dis
        kc = delta_t * params.eta_ch
        i0 = np.arange(n)
        lp.add_block(
            np.column_stack([lay.soc(i0, 0, s), lay.cap_b(i0), lay.dis(i0, 0, s), lay.ch(i0, 0, s)]),
            np.column_stack([np.ones(n), np.full(n, -params.soc_init_frac), np.full(n, kd), np.full(n, -kc)]),
            RELATION_EQ,
            np.zeros(n),
            [f"eq25_i{i}_s{s}" for i in range(n)],
        )
        if t > 1:
            ii2 = np.repeat(np.arange(n), t - 1)
            tt2 = np.tile(np.arange(1, t), n)
            m = n * (t - 1)
            lp.add_block(
                np.column_stack([
                    lay.soc(ii2, tt2, s),
                    lay.soc(ii2, tt2 - 1, s),
                    lay.dis(ii2, tt2, s),
                    lay.ch(ii2, tt2, s),
                ]),
                np.column_stack([np.ones(m), -np.ones(m), np.full(m, kd), np.full(m, -kc)]),
                RELATION_EQ,
                np.zeros(m),
                [f"eq24_i{i}_t{h}_s{s}" for i in range(n) for h in range(1, t)],
            )

        # state-of-charge window scaled by installed energy capacity
        soc_cap = np.column_stack([soc_cols, lay.cap_b(ii)])
        lp.add_block(
            soc_cap,
            np.column_stack([ones, np.full(n * t, -params.soc_min_frac)]),
            RELATION_GE,
            np.zeros(n * t),
            [f"eq26lo_i{i}_t{h}_s{s}" for i in range(n) for h in range(t)],
        )
        lp.add_block(
            soc_cap,
            np.column_stack([ones, np.full(n * t, -params.soc_max_frac)]),
            RELATION_LE,
            np.zeros(n * t),
            [f"eq26hi_i{i}_t{h}_s{s}" for i in range(n) for h in range(t)],
        )

        lp.set_bounds(p_cols, lower=0.0, lower_tag="eq34")
        lp.set_bounds(soc_cols, lower=0.0, lower_tag="eq34")
        lp.set_bounds(np.concatenate([ch_cols, dis_cols]), lower=0.0, lower_tag="eq23")
        # shedding can never usefully exceed the local demand
        lp.set_bounds(
            ens_cols,
            lower=0.0,
            upper=sc.demand_kw[ii, tt],
            lower_tag="eq34",
            upper_tag="ens_cap",
        )


def add_network_constraints(
    lp: LpBuilder, network: NetworkModel, scenarios: list[Scenario]
) -> None:
    lay = lp.layout
    n, t = lay.n_buses, lay.n_hours
    hours = np.arange(t)
    fi, ti = network.edge_index_arrays() if network.n_lines else (np.zeros(0, int), np.zeros(0, int))
    out_edges = [np.flatnonzero(fi == i) for i in range(n)]
    in_edges = [np.flatnonzero(ti == i) for i in range(n)]
    kappa = np.array([2.0 * ln.r_ohm / (network.v_base_kv**2 * 1000.0) for ln in network.lines])
    pmax = np.array([ln.p_max_kw for ln in network.lines])
    n_e = network.n_lines
    ee = np.repeat(np.arange(n_e), t)
    th = np.tile(hours, n_e)
    ii = np.repeat(np.arange(n), t)
    tt = np.tile(hours, n)

    for s, sc in enumerate(scenarios):
        # nodal real-power balance with unserved-energy slack
        for i in range(n):
            base_cols = np.column_stack([
                lay.p(i, hours, s),
                lay.dis(i, hours, s),
                lay.ch(i, hours, s),
                lay.ens(i, hours, s),
            ])
            base_vals = [1.0, 1.0, -1.0, 1.0]
            if lay.with_network and (len(out_edges[i]) or len(in_edges[i])):
                fcols = [lay.flow(e, hours, s) for e in out_edges[i]]
                fcols += [lay.flow(e, hours, s) for e in in_edges[i]]
                fvals = [-1.0] * len(out_edges[i]) + [1.0] * len(in_edges[i])
                cols = np.column_stack([base_cols] + [c[:, None] for c in fcols])
                vals = np.array(base_vals + fvals)
            else:
                cols = base_cols
                vals = np.array(base_vals)
            lp.add_block(
                cols,
                np.broadcast_to(vals, cols.shape),
                RELATION_EQ,
                sc.demand_kw[i],
                [f"eq27_i{i}_t{h}_s{s}" for h in range(t)],
            )

        if not lay.with_network:
            continue

        # linearized voltage drop along each line (squared magnitudes)
        if n_e:
            m = n_e * t
            lp.add_block(
                np.column_stack([
                    lay.voltsq(ti[ee], th, s),
                    lay.voltsq(fi[ee], th, s),
                    lay.flow(ee, th, s),
                ]),
                np.column_stack([np.ones(m), -np.ones(m), kappa[ee]]),
                RELATION_EQ,
                np.zeros(m),
                [f"eq30_e{e}_t{h}_s{s}" for e in range(n_e) for h in range(t)],
            )
            # line thermal limits as symmetric column bounds
            lp.set_bounds(lay.flow(ee, th, s), lower=-pmax[ee], upper=pmax[ee], tag="eq28")

        # voltage band, with the slack bus pinned to 1 pu
        lp.set_bounds(
            lay.voltsq(ii, tt, s),
            lower=network.v_min_pu**2,
            upper=network.v_max_pu**2,
            tag="eq29",
        )
        slack_pos = network.bus_index(network.slack_bus)
        lp.set_bounds(lay.voltsq(slack_pos, hours, s), lower=1.0, upper=1.0, tag="eq32")


def add_cyclic_and_reliability(
    lp: LpBuilder,
    scenarios: list[Scenario],
    costs: CostBook,
    params: DeviceParams,
) -> None:
    lay = lp.layout
    n, t = lay.n_buses, lay.n_hours
    i0 = np.arange(n)
    for s in range(len(scenarios)):
        # terminal state returns to the anchor (cyclic day)
        lp.add_block(
            np.column_stack([lay.soc(i0, t - 1, s), lay.cap_b(i0)]),
            np.column_stack([np.ones(n), np.full(n, -params.soc_init_frac)]),
            RELATION_EQ,
            np.zeros(n),
            [f"eq33_i{i}_s{s}" for i in range(n)],
        )

    # single system-wide expected-unserved-energy cap
    ii = np.repeat(np.arange(n), t)
    tt = np.tile(np.arange(t), n)
    cols = np.concatenate([lay.ens(ii, tt, s) for s in range(len(scenarios))])
    vals = np.concatenate([
        np.full(n * t, sc.weight * costs.delta_t_h) for sc in scenarios
    ])
    expected_demand = sum(
        sc.weight * costs.delta_t_h * float(sc.demand_kw.sum()) for sc in scenarios
    )
    lp.add_row(cols, vals, RELATION_LE, costs.epsilon_rel * expected_demand, "eq35")


def build_deterministic_equivalent(
    network: NetworkModel,
    scenarios: list[Scenario],
    params: DeviceParams,
    costs: CostBook,
    with_network: bool = True,
    name: str = "plan",
    cap_pv_max_per_bus: np.ndarray | None = None,
    cap_b_max_per_bus: np.ndarray | None = None,
) -> LinearProgram:
    if not scenarios:
        raise DataError("no scenarios supplied")
    for sc in scenarios:
        if sc.n_buses != network.n_buses:
            raise DataError(f"scenario {sc.id} has {sc.n_buses} buses, network has {network.n_buses}")
    layout = layout_for(network, scenarios, with_network)
    if layout.n_cols > MAX_COLUMNS:
        raise DimensionError(
            f"model would have {layout.n_cols} columns (limit {MAX_COLUMNS}); "
            "reduce the scenario count or raise the limit"
        )

    lp = LpBuilder(layout, name=name)
    lp.objective = build_objective(network, costs, scenarios, layout)
    add_planning_bounds(lp, network, params, costs, cap_pv_max_per_bus, cap_b_max_per_bus)
    add_dispatch_constraints(lp, scenarios, params, delta_t=costs.delta_t_h)
    add_network_constraints(lp, network, scenarios)
    add_cyclic_and_reliability(lp, scenarios, costs, params)
    lp.meta = {
        "scenario_ids": [sc.id for sc in scenarios],
        "scenario_weights": [sc.weight for sc in scenarios],
        "bus_ids": list(network.buses),
        "edges": [[ln.from_bus, ln.to_bus] for ln in network.lines] if with_network else [],
        "with_network": with_network,
        "delta_t_h": costs.delta_t_h,
        "epsilon_rel": costs.epsilon_rel,
        "soc_init_frac": params.soc_init_frac,
        "cost_constants": {
            "c_pv_per_kw": costs.c_pv_per_kw,
            "c_b_per_kwh": costs.c_b_per_kwh,
            "om_pv_per_kw_yr": costs.om_pv_per_kw_yr,
            "om_b_per_kwh_yr": costs.om_b_per_kwh_yr,
            "voll_per_kwh": costs.voll_per_kwh,
            "annuity": costs.annuity_factor(),
        },
    }
    return lp.finish()
