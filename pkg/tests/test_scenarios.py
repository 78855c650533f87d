"""Scenario assembly, weights, serialization, and the generation pipeline."""

import dataclasses
import json

import numpy as np
import pytest

from gridplan.core import DeviceParams, synth_profiles
from gridplan.errors import DataError
from gridplan.scenarios import (
    Scenario,
    Season,
    assemble_scenarios,
    cluster_and_pick_reps,
    fta_probabilities,
    generate_scenarios,
    read_scenarios,
    write_scenarios,
)
from gridplan.scenarios.assemble import SCENARIO_SCHEMA_VERSION
from gridplan.scenarios.features import SEASON_ORDER


@pytest.fixture(scope="module")
def generated(roomy_net):
    profiles = synth_profiles(roomy_net, seed=9)
    scenarios, diag = generate_scenarios(
        profiles, roomy_net, DeviceParams(), k_min=2, k_max=3, seed=1
    )
    return profiles, scenarios, diag


def test_pipeline_counts_and_weights(generated):
    _, scenarios, diag = generated
    k_total = sum(diag["season_k"].values())
    assert diag["rep_day_count"] == k_total
    assert len(scenarios) == 3 * k_total
    assert diag["scenario_count"] == len(scenarios)
    total = sum(s.weight for s in scenarios)
    assert total == pytest.approx(1.0, abs=1e-9)
    assert diag["weight_sum"] == pytest.approx(1.0, abs=1e-9)


def test_pipeline_diagnostics_complete(generated):
    _, _, diag = generated
    expected = {
        "feature_dim", "season_k", "season_silhouette", "season_pca_dims",
        "rep_day_count", "scenario_count", "probabilities", "weight_sum",
        "seed", "k_min", "k_max", "multi_node_failures",
    }
    assert expected <= set(diag)
    assert diag["feature_dim"] == 3 * 24 + 24
    for s in SEASON_ORDER:
        assert 2 <= diag["season_k"][s.value] <= 3


def test_scenario_ids_unique_and_ordered(generated):
    _, scenarios, _ = generated
    ids = [s.id for s in scenarios]
    assert len(set(ids)) == len(ids)
    # three classes per representative day, in a fixed class order
    for j in range(0, len(scenarios), 3):
        trio = scenarios[j : j + 3]
        assert [s.failure_class for s in trio] == ["normal", "single", "combined"]
        assert len({s.rep_day for s in trio}) == 1


def test_scenario_weights_factorize(generated):
    _, scenarios, diag = generated
    probs = diag["probabilities"]
    for s in scenarios:
        assert s.weight == pytest.approx(s.weight_rep * probs[s.failure_class], rel=1e-12)


def test_masks_match_windows(generated):
    _, scenarios, _ = generated
    for sc in scenarios:
        pv = np.ones_like(sc.pv_avail)
        batt = np.ones_like(sc.batt_avail)
        bus_pos = {b: i for i, b in enumerate(range(1, sc.n_buses + 1))}
        for w in sc.outage_windows:
            target = pv if w.component == "pv" else batt
            target[bus_pos[w.bus], w.start_h : w.start_h + w.duration_h] = 0
        assert np.array_equal(pv, sc.pv_avail)
        assert np.array_equal(batt, sc.batt_avail)
        assert sc.failed_nodes == tuple(sorted({w.bus for w in sc.outage_windows}))


def test_demand_matches_rep_day(generated):
    profiles, scenarios, _ = generated
    for sc in scenarios:
        assert np.array_equal(sc.demand_kw, profiles.load_kw[sc.rep_day])
        assert np.array_equal(sc.pv_factor, profiles.pv_factor[sc.rep_day])


def test_pipeline_deterministic(roomy_net):
    profiles = synth_profiles(roomy_net, seed=9)
    a, _ = generate_scenarios(profiles, roomy_net, DeviceParams(), k_min=2, k_max=2, seed=5)
    b, _ = generate_scenarios(profiles, roomy_net, DeviceParams(), k_min=2, k_max=2, seed=5)
    assert [s.id for s in a] == [s.id for s in b]
    for x, y in zip(a, b):
        assert x.outage_windows == y.outage_windows
        assert np.array_equal(x.demand_kw, y.demand_kw)


def test_pipeline_jobs_equivalent(roomy_net):
    profiles = synth_profiles(roomy_net, seed=9)
    a, _ = generate_scenarios(profiles, roomy_net, DeviceParams(), k_min=2, k_max=2, seed=5)
    b, _ = generate_scenarios(profiles, roomy_net, DeviceParams(), k_min=2, k_max=2, seed=5, jobs=4)
    assert [s.id for s in a] == [s.id for s in b]
    for x, y in zip(a, b):
        assert x.weight == y.weight
        assert x.outage_windows == y.outage_windows


def test_seed_changes_failure_draws(roomy_net):
    profiles = synth_profiles(roomy_net, seed=9)
    a, _ = generate_scenarios(profiles, roomy_net, DeviceParams(), k_min=2, k_max=2, seed=5)
    b, _ = generate_scenarios(profiles, roomy_net, DeviceParams(), k_min=2, k_max=2, seed=6)
    wa = [s.outage_windows for s in a if s.failure_class != "normal"]
    wb = [s.outage_windows for s in b if s.failure_class != "normal"]
    assert wa != wb


def _whole_year_reps():
    # one pseudo-season holding all 365 days, so rep weights sum to one
    points = np.random.default_rng(0).random((365, 3))
    return {Season.SUMMER: cluster_and_pick_reps(points, 2, seed=0)}


def test_assemble_accepts_unit_mass(roomy_net):
    profiles = synth_profiles(roomy_net, seed=9)
    probs = fta_probabilities(DeviceParams(), roomy_net.n_buses)
    scenarios = assemble_scenarios(
        _whole_year_reps(), probs, profiles, roomy_net, DeviceParams(), seed=0
    )
    assert len(scenarios) == 6
    assert sum(s.weight for s in scenarios) == pytest.approx(1.0, abs=1e-12)


def test_assemble_rejects_broken_weights(roomy_net):
    profiles = synth_profiles(roomy_net, seed=9)
    probs = fta_probabilities(DeviceParams(), roomy_net.n_buses)
    bad = dataclasses.replace(probs, p_normal=probs.p_normal * 0.5)
    with pytest.raises(DataError, match="weights sum"):
        assemble_scenarios(
            _whole_year_reps(), bad, profiles, roomy_net, DeviceParams(), seed=0
        )


def test_validate_rejects_bad_masks(make_scenario, roomy_net):
    sc = make_scenario(roomy_net, "x", Season.SUMMER, 0, 1.0, np.ones((3, 4)), [0, 0.5, 1, 0])
    broken = dataclasses.replace(sc, pv_avail=sc.pv_avail * 2)
    with pytest.raises(DataError, match="masks"):
        broken.validate()


def test_validate_rejects_partial_normal(make_scenario, roomy_net):
    sc = make_scenario(roomy_net, "x", Season.SUMMER, 0, 1.0, np.ones((3, 4)), [0, 0.5, 1, 0])
    masked = sc.pv_avail.copy()
    masked[1, 2] = 0
    broken = dataclasses.replace(sc, pv_avail=masked)
    with pytest.raises(DataError, match="full availability"):
        broken.validate()


def test_round_trip_preserves_everything(tmp_path, generated):
    _, scenarios, diag = generated
    path = tmp_path / "scenarios.json"
    write_scenarios(path, scenarios, diag)
    back, diag_back = read_scenarios(path)
    assert len(back) == len(scenarios)
    assert diag_back["season_k"] == diag["season_k"]
    for a, b in zip(scenarios, back):
        assert a.id == b.id
        assert a.season is b.season
        assert a.weight == b.weight
        assert a.failure_class == b.failure_class
        assert np.array_equal(a.demand_kw, b.demand_kw)
        assert np.array_equal(a.pv_factor, b.pv_factor)
        assert np.array_equal(a.pv_avail, b.pv_avail)
        assert np.array_equal(a.batt_avail, b.batt_avail)
        assert a.outage_windows == b.outage_windows


def test_rewrite_is_byte_identical(tmp_path, generated):
    _, scenarios, diag = generated
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_scenarios(p1, scenarios, diag)
    back, diag_back = read_scenarios(p1)
    write_scenarios(p2, back, diag_back)
    assert p1.read_bytes() == p2.read_bytes()


def test_read_rejects_wrong_schema(tmp_path, generated):
    _, scenarios, _ = generated
    path = tmp_path / "scenarios.json"
    write_scenarios(path, scenarios)
    doc = json.loads(path.read_text())
    doc["schema_version"] = SCENARIO_SCHEMA_VERSION + 1
    path.write_text(json.dumps(doc))
    with pytest.raises(DataError, match="schema version"):
        read_scenarios(path)


def test_read_missing_file(tmp_path):
    with pytest.raises(DataError, match="not found"):
        read_scenarios(tmp_path / "nope.json")
