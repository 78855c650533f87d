"""Report emission: one CSV or JSON file per analysis.

Files are written with deterministic ordering and repr-based float
formatting, so identical inputs always produce byte-identical output.
The convergence table is the one exception in spirit: it contains wall
times, which vary run to run by nature.
"""

from __future__ import annotations

import json
from pathlib import Path

from gridplan.program.solution import PlanningSolution
from gridplan.reports.analytics import (
    NodalBalance,
    NodeTrace,
    ReliabilityReport,
    SeasonProfile,
    nodal_energy_balance,
    reliability_metric,
    seasonal_dispatch_profiles,
)
from gridplan.scenarios.assemble import Scenario


def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)):
        return str(v)
    return repr(float(v))


def _write_rows(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else _num(v) for v in row) + "\n")


def write_balance_csv(path: str | Path, balance: NodalBalance) -> None:
    rows = []
    for j, bus in enumerate(balance.bus_ids):
        net = balance.net_export_kwh_day[j]
        role = "exporter" if bus in balance.exporters else (
            "importer" if bus in balance.importers else "balanced"
        )
        rows.append([
            bus,
            balance.pv_kwh_day[j],
            balance.discharge_kwh_day[j],
            balance.charge_kwh_day[j],
            balance.load_kwh_day[j],
            net,
            balance.ens_kwh_year[j],
            role,
        ])
    _write_rows(
        Path(path),
        [
            "bus", "pv_kwh_day", "discharge_kwh_day", "charge_kwh_day",
            "load_kwh_day", "net_export_kwh_day", "ens_kwh_year", "role",
        ],
        rows,
    )


def write_seasonal_csv(path: str | Path, profiles: dict[str, SeasonProfile]) -> None:
    rows = []
    for season, prof in profiles.items():
        for h in range(prof.pv_kw.shape[0]):
            rows.append([
                season, h,
                prof.pv_kw[h], prof.charge_kw[h], prof.discharge_kw[h],
                prof.load_kw[h], prof.ens_kw[h],
            ])
    _write_rows(
        Path(path),
        ["season", "hour", "pv_kw", "charge_kw", "discharge_kw", "load_kw", "ens_kw"],
        rows,
    )


def trace_filename(bus: int, scenario_id: str) -> str:
    return f"trace_{bus}_{scenario_id}.csv"


def write_trace_csv(path: str | Path, trace: NodeTrace) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    windows = "; ".join(
        f"{w.component} hours {w.start_h}-{w.start_h + w.duration_h - 1}"
        for w in trace.windows
    )
    with open(path, "w") as fh:
        fh.write(f"# scenario: {trace.scenario_id}\n")
        fh.write(f"# bus: {trace.bus}\n")
        fh.write(f"# soc_start_kwh: {_num(trace.soc_start_kwh)}\n")
        fh.write(f"# outage_windows: {windows if windows else 'none'}\n")
        fh.write("hour,load_kw,pv_kw,charge_kw,discharge_kw,soc_kwh,ens_kw,net_import_kw,outage\n")
        for h in range(trace.n_hours):
            cells = [
                str(h),
                _num(trace.load_kw[h]),
                _num(trace.pv_kw[h]),
                _num(trace.charge_kw[h]),
                _num(trace.discharge_kw[h]),
                _num(trace.soc_kwh[h]),
                _num(trace.ens_kw[h]),
                _num(trace.net_import_kw[h]),
                "+".join(trace.outage_kinds(h)),
            ]
            fh.write(",".join(cells) + "\n")


def write_ens_map_csv(path: str | Path, report: ReliabilityReport) -> None:
    rows = []
    for j, bus in enumerate(report.bus_ids):
        for season, per_node in report.ens_by_season_kwh_year.items():
            rows.append([bus, season, per_node[j]])
    _write_rows(Path(path), ["bus", "season", "ens_kwh_year"], rows)


def write_reliability_json(path: str | Path, report: ReliabilityReport) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "eens_kwh_year": report.eens_kwh_year,
        "expected_demand_kwh_year": report.expected_demand_kwh_year,
        "eens_fraction": report.eens_fraction,
        "reliability_pct": report.reliability_pct,
        "epsilon_rel": report.epsilon_rel,
        "target_met": report.target_met,
        "ens_by_season_kwh_year": {
            season: float(values.sum())
            for season, values in report.ens_by_season_kwh_year.items()
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def write_convergence_csv(path: str | Path, rows) -> None:
    table = [
        [
            row.k, row.n_scenarios, row.status, row.objective,
            row.wall_time_s, row.repeats_identical, row.error,
        ]
        for row in rows
    ]
    _write_rows(
        Path(path),
        ["k", "n_scenarios", "status", "objective", "wall_time_s", "repeats_identical", "error"],
        table,
    )


def write_baseline_csv(path: str | Path, comparison) -> None:
    _write_rows(Path(path), ["metric", "distributed", "centralized"], comparison.to_rows())


def write_report_set(
    out_dir: str | Path,
    solution: PlanningSolution,
    scenarios: list[Scenario],
) -> list[Path]:
    """Emit the standard per-solve report files; returns what was written."""
    out_dir = Path(out_dir)
    balance = nodal_energy_balance(solution, scenarios)
    seasonal = seasonal_dispatch_profiles(solution, scenarios)
    reliability = reliability_metric(solution, scenarios)
    paths = [
        out_dir / "balance.csv",
        out_dir / "seasonal.csv",
        out_dir / "ens_map.csv",
        out_dir / "reliability.json",
    ]
    write_balance_csv(paths[0], balance)
    write_seasonal_csv(paths[1], seasonal)
    write_ens_map_csv(paths[2], reliability)
    write_reliability_json(paths[3], reliability)
    return paths
