"""Single-node comparison baseline.

The feeder is collapsed to one bus: demands are summed, one PV plant and
one battery serve the total, and flow/voltage variables disappear. Any
sampled outage now takes down the pooled asset for those hours, because a
local failure becomes system-wide once all capacity sits at a single
point. Per-bus capacity ceilings scale by the original bus count so the
aggregate may build as much in total as the distributed design could.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from gridplan.core.types import CostBook, DeviceParams, NetworkModel
from gridplan.program.builder import build_deterministic_equivalent
from gridplan.program.indexing import LinearProgram
from gridplan.scenarios.assemble import Scenario
from gridplan.scenarios.failures import OutageWindow


def aggregate_to_single_bus(
    network: NetworkModel, scenarios: list[Scenario]
) -> tuple[NetworkModel, list[Scenario]]:
    """Collapse a network and its scenario set onto one bus.

    Demand is summed across buses hour by hour. Availability is the
    elementwise minimum over buses: the pooled asset is out whenever any
    original node had that component out. Outage windows are re-homed to
    the single bus for reporting.
    """
    agg_net = NetworkModel(
        buses=(1,),
        lines=(),
        v_base_kv=network.v_base_kv,
        v_min_pu=network.v_min_pu,
        v_max_pu=network.v_max_pu,
        s_base_kw=np.array([float(network.s_base_kw.sum())]),
        slack_bus=1,
    )
    agg_scenarios = []
    for sc in scenarios:
        windows = tuple(
            OutageWindow(bus=1, component=w.component, start_h=w.start_h, duration_h=w.duration_h)
            for w in sc.outage_windows
        )
        agg_scenarios.append(
            dataclasses.replace(
                sc,
                demand_kw=sc.demand_kw.sum(axis=0, keepdims=True),
                pv_avail=sc.pv_avail.min(axis=0, keepdims=True),
                batt_avail=sc.batt_avail.min(axis=0, keepdims=True),
                failed_nodes=(1,) if sc.failed_nodes else (),
                outage_windows=windows,
            )
        )
    return agg_net, agg_scenarios


def build_centralized_variant(
    network: NetworkModel,
    scenarios: list[Scenario],
    params: DeviceParams,
    costs: CostBook,
) -> LinearProgram:
    """Deterministic equivalent for the aggregated one-bus system.

    Capacity ceilings are multiplied by the original bus count; without
    that the single bus could host only one node's worth of plant and the
    comparison against the distributed design would be meaningless.
    """
    agg_net, agg_scenarios = aggregate_to_single_bus(network, scenarios)
    n = network.n_buses
    return build_deterministic_equivalent(
        agg_net,
        agg_scenarios,
        params,
        costs,
        with_network=False,
        name="centralized",
        cap_pv_max_per_bus=np.array([n * costs.cap_pv_max_kw]),
        cap_b_max_per_bus=np.array([n * costs.cap_b_max_kwh]),
    )
