"""Shared fixtures: the bundled toy case, a roomy 3-bus network, and
hand-built scenario helpers used across the suite."""

import numpy as np
import pytest

from gridplan.config import bundled_data_dir, load_config
from gridplan.core import Line, NetworkModel, load_network
from gridplan.program import build_deterministic_equivalent, decode_solution
from gridplan.scenarios import Scenario, read_scenarios
from gridplan.solve import OPTIMAL, solve

BUNDLED = bundled_data_dir()


@pytest.fixture(scope="session")
def toy_cfg():
    return load_config(BUNDLED / "toy3_config.json")


@pytest.fixture(scope="session")
def toy_net(toy_cfg):
    return load_network(toy_cfg.network_path)


@pytest.fixture(scope="session")
def toy_scenarios():
    scenarios, _ = read_scenarios(BUNDLED / "toy3_scenarios.json")
    return scenarios


@pytest.fixture(scope="session")
def toy_lp(toy_cfg, toy_net, toy_scenarios):
    return build_deterministic_equivalent(
        toy_net, toy_scenarios, toy_cfg.device, toy_cfg.costs
    )


@pytest.fixture(scope="session")
def toy_plan(toy_lp):
    """The toy case solved once with the built-in simplex; reused by any
    test that only needs some optimal solution to inspect."""
    res = solve(toy_lp, backend="builtin")
    assert res.status == OPTIMAL
    return toy_lp, res, decode_solution(toy_lp, res.x, res.status)


@pytest.fixture(scope="session")
def roomy_net():
    """Three buses with hosting far above anything the synthetic year can
    use, so solves on generated scenarios stay comfortably feasible."""
    return NetworkModel(
        buses=(1, 2, 3),
        lines=(Line(1, 2, 0.01, 2000.0), Line(2, 3, 0.01, 2000.0)),
        v_base_kv=12.66,
        v_min_pu=0.95,
        v_max_pu=1.05,
        s_base_kw=np.array([0.0, 5000.0, 5000.0]),
        slack_bus=1,
    )


@pytest.fixture(scope="session")
def make_scenario():
    """Factory for hand-built scenarios; availability masks are derived
    from the outage windows exactly like the generator does it."""

    def build(
        network,
        scenario_id,
        season,
        rep_day,
        weight,
        demand_kw,
        pv_factor,
        failure_class="normal",
        windows=(),
        weight_rep=None,
    ):
        n = network.n_buses
        t = len(pv_factor)
        pv = np.ones((n, t), dtype=np.int8)
        batt = np.ones((n, t), dtype=np.int8)
        for w in windows:
            pos = network.bus_index(w.bus)
            target = pv if w.component == "pv" else batt
            target[pos, w.start_h : w.start_h + w.duration_h] = 0
        sc = Scenario(
            id=scenario_id,
            season=season,
            rep_day=rep_day,
            weight_rep=weight if weight_rep is None else weight_rep,
            failure_class=failure_class,
            weight=weight,
            demand_kw=np.asarray(demand_kw, dtype=float),
            pv_factor=np.asarray(pv_factor, dtype=float),
            pv_avail=pv,
            batt_avail=batt,
            failed_nodes=tuple(sorted({w.bus for w in windows})),
            outage_windows=tuple(windows),
        )
        sc.validate()
        return sc

    return build
