"""Solution-value files and the model map that makes them decodable.

External solvers hand back a plain name/value text file. The model map
(``model_map.json``) written next to every exported model carries the
column layout, run metadata, and any hashed-name substitutions, so such
a file can be decoded into a PlanningSolution even in a later session
without rebuilding the program. When the assembled program itself is
available, import runs the full residual audit; with only the map, the
matrix is gone and the audit degrades to the array-level checks, which
is recorded in the report warnings.

Value-file grammar: one ``name value`` pair per line; blank lines and
lines starting with ``#`` or ``//`` are ignored. Columns absent from
the file are treated as zero (mainstream solvers omit zeros) and
counted in a warning; unknown names are an error, listed by name.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from gridplan.errors import DataError
from gridplan.program.indexing import LinearProgram, VariableLayout
from gridplan.program.solution import PlanningSolution, decode_solution, decode_values
from gridplan.solve.mps import _fmt, _safe_names
from gridplan.solve.verify import VerificationReport, verify_solution

MODEL_MAP_SCHEMA_VERSION = 1
MODEL_MAP_NAME = "model_map.json"


def write_solution_values(path: str | Path, names: list[str], x: np.ndarray) -> None:
    x = np.asarray(x, dtype=float)
    if len(names) != x.size:
        raise DataError("one name per value required")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for name, v in zip(names, x):
            fh.write(f"{name} {_fmt(v)}\n")


def parse_solution_values(path: str | Path) -> dict[str, float]:
    values: dict[str, float] = {}
    path = Path(path)
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("//"):
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise DataError(f"{path}:{lineno}: expected 'name value', got {line!r}")
            name, tok = tokens
            if name in values:
                raise DataError(f"{path}:{lineno}: duplicate value for {name!r}")
            try:
                values[name] = float(tok)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad numeric value {tok!r}") from None
    return values


def build_model_map(lp: LinearProgram) -> dict:
    overrides: dict[str, str] = {}
    written = _safe_names(lp.col_names, overrides)
    layout = None
    if lp.layout is not None:
        lay = lp.layout
        layout = {
            "n_buses": lay.n_buses,
            "n_edges": lay.n_edges,
            "n_hours": lay.n_hours,
            "n_scenarios": lay.n_scenarios,
            "with_network": lay.with_network,
        }
    return {
        "schema_version": MODEL_MAP_SCHEMA_VERSION,
        "name": lp.name,
        "layout": layout,
        "meta": lp.meta,
        "col_names": written,
        "name_overrides": overrides,
    }


def write_model_map(lp: LinearProgram, path: str | Path) -> dict:
    mm = build_model_map(lp)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(mm, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    return mm


def load_model_map(path: str | Path) -> dict:
    with open(path) as fh:
        mm = json.load(fh)
    if mm.get("schema_version") != MODEL_MAP_SCHEMA_VERSION:
        raise DataError(f"unsupported model map schema {mm.get('schema_version')!r}")
    return mm


def _vector_from_values(
    values: dict[str, float], names: list[str], source: str
) -> tuple[np.ndarray, list[str]]:
    index = {name: j for j, name in enumerate(names)}
    unknown = sorted(set(values) - set(index))
    if unknown:
        shown = ", ".join(unknown[:10])
        more = f" (+{len(unknown) - 10} more)" if len(unknown) > 10 else ""
        raise DataError(f"{source}: unknown column names: {shown}{more}")
    x = np.zeros(len(names))
    for name, v in values.items():
        x[index[name]] = v
    warnings = []
    missing = len(names) - len(values)
    if missing:
        warnings.append(f"{missing} columns absent from the solution file, assumed 0")
    return x, warnings


def import_solution(
    path: str | Path,
    model: LinearProgram | dict | str | Path,
    status: str = "Optimal",
) -> tuple[PlanningSolution, VerificationReport]:
    """Decode an external solution file against a program or model map."""
    values = parse_solution_values(path)

    if isinstance(model, LinearProgram):
        names = _safe_names(model.col_names, {})
        x, warnings = _vector_from_values(values, names, str(path))
        report = verify_solution(model, x)
        report.warnings.extend(warnings)
        return decode_solution(model, x, status), report

    mm = model if isinstance(model, dict) else load_model_map(model)
    if mm.get("layout") is None:
        raise DataError("model map carries no layout; cannot decode the solution")
    layout = VariableLayout(**mm["layout"])
    names = list(mm["col_names"])
    if len(names) != layout.n_cols:
        raise DataError("model map column list does not match its layout")
    x, warnings = _vector_from_values(values, names, str(path))
    sol = decode_values(layout, mm.get("meta", {}), x, status)

    meta = mm.get("meta", {})
    cyclic = simultaneous = None
    if "soc_init_frac" in meta:
        anchor = meta["soc_init_frac"] * sol.cap_b_kwh[None, :]
        cyclic = float(np.abs(sol.soc_kwh[:, :, -1] - anchor).max(initial=0.0))
        simultaneous = float(np.minimum(sol.charge_kw, sol.discharge_kw).max(initial=0.0))
    warnings.append("row residual audit skipped: only the model map was available")
    report = VerificationReport(
        max_by_family={},
        mean_by_family={},
        worst_row_by_family={},
        max_bound_violation=0.0,
        objective=sol.objective_total,
        cyclic_gap=cyclic,
        simultaneous_flow=simultaneous,
        warnings=warnings,
    )
    return sol, report
