"""Scenario-count convergence: solve the plan at increasing cluster counts.

For each K the seasonal clustering is forced to exactly K clusters, the
program is rebuilt, and the solve is repeated several times to confirm
the objective does not wander between runs. Failures at one K are
recorded in its row and the sweep moves on.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from gridplan.core.types import AnnualProfiles, CostBook, DeviceParams, NetworkModel
from gridplan.errors import GridplanError
from gridplan.program.builder import build_deterministic_equivalent
from gridplan.scenarios.assemble import generate_scenarios
from gridplan.solve import OPTIMAL, solve

SOLVE_REPEATS = 5


@dataclass(frozen=True)
class KSweepRow:
    k: int
    n_scenarios: int
    status: str
    objective: float | None
    wall_time_s: float
    repeats_identical: bool | None
    error: str = ""


def _sweep_one(
    k: int,
    profiles: AnnualProfiles,
    network: NetworkModel,
    params: DeviceParams,
    costs: CostBook,
    seed: int,
    backend: str,
    repeats: int,
    multi_node: bool,
    with_network: bool,
) -> KSweepRow:
    if k < 2:
        return KSweepRow(k, 0, "error", None, 0.0, None, "cluster count must be at least 2")
    try:
        scenarios, _ = generate_scenarios(
            profiles, network, params, k_min=k, k_max=k, seed=seed, multi_node=multi_node
        )
        lp = build_deterministic_equivalent(
            network, scenarios, params, costs, with_network=with_network,
            name=f"sweep_k{k}",
        )
        t0 = time.perf_counter()
        res = solve(lp, backend=backend)
        wall = time.perf_counter() - t0
        identical = None
        if res.status == OPTIMAL:
            objectives = [res.objective]
            for _ in range(repeats - 1):
                objectives.append(solve(lp, backend=backend).objective)
            identical = all(o == objectives[0] for o in objectives)
        return KSweepRow(
            k=k,
            n_scenarios=len(scenarios),
            status=res.status,
            objective=res.objective if res.status == OPTIMAL else None,
            wall_time_s=wall,
            repeats_identical=identical,
        )
    except GridplanError as exc:
        return KSweepRow(k, 0, "error", None, 0.0, None, str(exc))


def convergence_sweep(
    k_values: list[int],
    profiles: AnnualProfiles,
    network: NetworkModel,
    params: DeviceParams,
    costs: CostBook,
    seed: int = 0,
    backend: str = "auto",
    repeats: int = SOLVE_REPEATS,
    multi_node: bool = False,
    with_network: bool = True,
    jobs: int = 1,
) -> list[KSweepRow]:
    args = [
        (k, profiles, network, params, costs, seed, backend, repeats, multi_node, with_network)
        for k in k_values
    ]
    if jobs > 1 and len(k_values) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(k_values))) as ex:
            return list(ex.map(_sweep_one, *zip(*args)))
    return [_sweep_one(*a) for a in args]
