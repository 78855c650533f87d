"""Scenario assembly: representative days x failure classes, plus file IO.

Every representative day yields three weighted scenarios (normal, single
outage, combined outage). Availability is time-resolved: per-bus, per-hour
0/1 masks for PV and battery, built from the sampled outage windows.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gridplan.core.types import HOURS, AnnualProfiles, DeviceParams, NetworkModel
from gridplan.errors import DataError
from gridplan.scenarios import clustering, features
from gridplan.scenarios.clustering import ClusterResult, cluster_and_pick_reps, select_k
from gridplan.scenarios.failures import (
    COMBINED,
    FAILURE_CLASSES,
    NORMAL,
    SINGLE,
    FailureClassProbabilities,
    OutageWindow,
    fta_probabilities,
    sample_failure_events,
)
from gridplan.scenarios.features import Season, SEASON_ORDER, build_feature_matrix, stratify_seasons

SCENARIO_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Scenario:
    """One representative day under one failure class."""

    id: str
    season: Season
    rep_day: int  # absolute day index, 0-based
    weight_rep: float  # cluster share of the year
    failure_class: str
    weight: float  # scenario probability pi_s
    demand_kw: np.ndarray  # (N, 24)
    pv_factor: np.ndarray  # (24,)
    pv_avail: np.ndarray  # (N, 24) in {0,1}
    batt_avail: np.ndarray  # (N, 24) in {0,1}
    failed_nodes: tuple[int, ...]  # bus ids with any outage
    outage_windows: tuple[OutageWindow, ...]

    @property
    def n_buses(self) -> int:
        return self.demand_kw.shape[0]

    @property
    def n_hours(self) -> int:
        return self.pv_factor.shape[0]

    def validate(self) -> None:
        n, t = self.n_buses, self.n_hours
        if self.demand_kw.shape != (n, t):
            raise DataError(f"scenario {self.id}: bad array shapes")
        for mask in (self.pv_avail, self.batt_avail):
            if mask.shape != (n, t) or not np.isin(mask, (0, 1)).all():
                raise DataError(f"scenario {self.id}: masks must be (N,T) of 0/1")
        if self.failure_class == NORMAL and not (
            self.pv_avail.all() and self.batt_avail.all()
        ):
            raise DataError(f"scenario {self.id}: normal class must have full availability")
        if self.failure_class == COMBINED:
            both_out = (self.pv_avail == 0) & (self.batt_avail == 0)
            if not both_out.any():
                raise DataError(
                    f"scenario {self.id}: combined class needs an hour with both components out"
                )


def _masks_from_windows(
    windows: list[OutageWindow], network: NetworkModel
) -> tuple[np.ndarray, np.ndarray]:
    n = network.n_buses
    pv = np.ones((n, HOURS), dtype=np.int8)
    batt = np.ones((n, HOURS), dtype=np.int8)
    for w in windows:
        pos = network.bus_index(w.bus)
        target = pv if w.component == "pv" else batt
        target[pos, w.start_h : w.start_h + w.duration_h] = 0
    return pv, batt


def assemble_scenarios(
    reps: dict[Season, ClusterResult],
    probs: FailureClassProbabilities,
    profiles: AnnualProfiles,
    network: NetworkModel,
    params: DeviceParams,
    seed: int,
    multi_node: bool = False,
) -> list[Scenario]:
    class_weights = {NORMAL: probs.p_normal, SINGLE: probs.p_single, COMBINED: probs.p_combined}
    scenarios: list[Scenario] = []
    for season in SEASON_ORDER:
        if season not in reps:
            continue
        day_weights = sorted(reps[season].rep_days)  # ascending day order
        for day, w_rep in day_weights:
            for class_code, fclass in enumerate(FAILURE_CLASSES):
                rng = np.random.default_rng(
                    np.random.SeedSequence(int(seed), spawn_key=(int(day), class_code))
                )
                windows = sample_failure_events(fclass, network, params, rng, multi_node)
                pv_avail, batt_avail = _masks_from_windows(windows, network)
                failed = tuple(sorted({w.bus for w in windows}))
                sc = Scenario(
                    id=f"{season.value}_d{day + 1:03d}_{fclass}",
                    season=season,
                    rep_day=int(day),
                    weight_rep=float(w_rep),
                    failure_class=fclass,
                    weight=float(w_rep * class_weights[fclass]),
                    demand_kw=profiles.load_kw[day].copy(),
                    pv_factor=profiles.pv_factor[day].copy(),
                    pv_avail=pv_avail,
                    batt_avail=batt_avail,
                    failed_nodes=failed,
                    outage_windows=tuple(windows),
                )
                sc.validate()
                scenarios.append(sc)

    total = sum(s.weight for s in scenarios)
    if abs(total - 1.0) > 1e-9:
        raise DataError(f"scenario weights sum to {total!r}, expected 1")
    return scenarios


def generate_scenarios(
    profiles: AnnualProfiles,
    network: NetworkModel,
    params: DeviceParams,
    k_min: int = 7,
    k_max: int = 20,
    seed: int = 0,
    multi_node: bool = False,
    jobs: int = 1,
) -> tuple[list[Scenario], dict]:
    """Full pipeline: features -> seasons -> PCA -> clustering -> scenarios."""
    fm = build_feature_matrix(profiles)
    part = stratify_seasons(fm, profiles.day_dates)

    def one_season(season: Season) -> tuple[Season, ClusterResult, int]:
        rows = part.day_indices[season]
        x = features.normalize_minmax(fm.values[rows])
        scores, _ = features.reduce_pca(x)
        k = select_k(scores, k_min=k_min, k_max=k_max, seed=seed)
        res = cluster_and_pick_reps(scores, k, seed, day_index=rows)
        return season, res, scores.shape[1]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=min(jobs, len(SEASON_ORDER))) as ex:
            season_results = list(ex.map(one_season, SEASON_ORDER))
    else:
        season_results = [one_season(s) for s in SEASON_ORDER]

    reps = {season: res for season, res, _ in season_results}
    probs = fta_probabilities(params, network.n_buses)
    scenarios = assemble_scenarios(reps, probs, profiles, network, params, seed, multi_node)

    diagnostics = {
        "feature_dim": fm.dim,
        "season_k": {s.value: reps[s].k for s in SEASON_ORDER},
        "season_silhouette": {s.value: reps[s].silhouette for s in SEASON_ORDER},
        "season_pca_dims": {s.value: dims for s, _, dims in season_results},
        "rep_day_count": sum(reps[s].k for s in SEASON_ORDER),
        "scenario_count": len(scenarios),
        "probabilities": probs.as_dict(),
        "weight_sum": sum(s.weight for s in scenarios),
        "seed": int(seed),
        "k_min": int(k_min),
        "k_max": int(k_max),
        "multi_node_failures": bool(multi_node),
    }
    return scenarios, diagnostics


# ---------------------------------------------------------------------------
# serialization

def write_scenarios(path, scenarios: list[Scenario], diagnostics: dict | None = None) -> None:
    doc = {
        "schema_version": SCENARIO_SCHEMA_VERSION,
        "n_buses": scenarios[0].n_buses if scenarios else 0,
        "n_hours": scenarios[0].n_hours if scenarios else HOURS,
        "diagnostics": diagnostics or {},
        "scenarios": [
            {
                "id": s.id,
                "season": s.season.value,
                "rep_day": s.rep_day,
                "weight_rep": s.weight_rep,
                "failure_class": s.failure_class,
                "weight": s.weight,
                "demand_kw": s.demand_kw.tolist(),
                "pv_factor": s.pv_factor.tolist(),
                "pv_avail": s.pv_avail.astype(int).tolist(),
                "batt_avail": s.batt_avail.astype(int).tolist(),
                "failed_nodes": list(s.failed_nodes),
                "outage_windows": [
                    {
                        "bus": w.bus,
                        "component": w.component,
                        "start_h": w.start_h,
                        "duration_h": w.duration_h,
                    }
                    for w in s.outage_windows
                ],
            }
            for s in scenarios
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def read_scenarios(path) -> tuple[list[Scenario], dict]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"scenario file not found: {path}")
    with open(path) as fh:
        doc = json.load(fh)
    version = doc.get("schema_version")
    if version != SCENARIO_SCHEMA_VERSION:
        raise DataError(f"unsupported scenario schema version {version!r}")
    scenarios = []
    for row in doc["scenarios"]:
        sc = Scenario(
            id=row["id"],
            season=Season(row["season"]),
            rep_day=int(row["rep_day"]),
            weight_rep=float(row["weight_rep"]),
            failure_class=row["failure_class"],
            weight=float(row["weight"]),
            demand_kw=np.array(row["demand_kw"], dtype=float),
            pv_factor=np.array(row["pv_factor"], dtype=float),
            pv_avail=np.array(row["pv_avail"], dtype=np.int8),
            batt_avail=np.array(row["batt_avail"], dtype=np.int8),
            failed_nodes=tuple(row["failed_nodes"]),
            outage_windows=tuple(
                OutageWindow(w["bus"], w["component"], w["start_h"], w["duration_h"])
                for w in row["outage_windows"]
            ),
        )
        sc.validate()
        scenarios.append(sc)
    return scenarios, doc.get("diagnostics", {})
