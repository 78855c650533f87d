"""Solver backends, interchange formats, and solution verification."""

from __future__ import annotations

from pathlib import Path

from gridplan.errors import DataError
from gridplan.program.indexing import LinearProgram
from gridplan.solve.highs import solve_highs
from gridplan.solve.lp_text import parse_lp_text, write_lp_text
from gridplan.solve.mps import parse_mps, write_mps
from gridplan.solve.outcome import (
    INFEASIBLE,
    ITERATION_LIMIT,
    OPTIMAL,
    UNBOUNDED,
    SolveOutcome,
)
from gridplan.solve.simplex import (
    MAX_BUILTIN_COLS,
    MAX_BUILTIN_ROWS,
    SimplexOptions,
    solve_builtin,
)
from gridplan.solve.solution_io import (
    MODEL_MAP_NAME,
    build_model_map,
    import_solution,
    load_model_map,
    parse_solution_values,
    write_model_map,
    write_solution_values,
)
from gridplan.solve.verify import VerificationReport, verify_solution

BACKENDS = ("auto", "builtin", "highs")
MODEL_FORMATS = ("mps", "lp")


def fits_builtin(lp: LinearProgram) -> bool:
    return lp.n_cols <= MAX_BUILTIN_COLS and lp.n_rows <= MAX_BUILTIN_ROWS


def solve(
    lp: LinearProgram,
    backend: str = "auto",
    time_limit_s: float | None = None,
    options: SimplexOptions | dict | None = None,
) -> SolveOutcome:
    """Solve with the requested backend; ``auto`` prefers the built-in
    simplex when the model is small enough for it and HiGHS otherwise.
    ``options`` means :class:`SimplexOptions` for the built-in backend and
    a linprog option dict (plus the ``method`` key) for HiGHS."""
    if backend not in BACKENDS:
        raise DataError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "auto":
        backend = "builtin" if fits_builtin(lp) else "highs"
    if backend == "builtin":
        return solve_builtin(lp, options=options)
    return solve_highs(lp, time_limit_s=time_limit_s, options=options)


def export_model(lp: LinearProgram, path: str | Path, fmt: str = "mps") -> dict:
    """Write the model in an interchange format plus its model map.

    The map lands next to the model as ``model_map.json`` and is what
    ``import_solution`` needs to decode a solver's value file later.
    Returns the map as written.
    """
    if fmt not in MODEL_FORMATS:
        raise DataError(f"unknown model format {fmt!r}; expected one of {MODEL_FORMATS}")
    path = Path(path)
    if fmt == "mps":
        write_mps(lp, path)
    else:
        write_lp_text(lp, path)
    return write_model_map(lp, path.parent / MODEL_MAP_NAME)


__all__ = [
    "BACKENDS",
    "INFEASIBLE",
    "ITERATION_LIMIT",
    "MAX_BUILTIN_COLS",
    "MAX_BUILTIN_ROWS",
    "MODEL_FORMATS",
    "MODEL_MAP_NAME",
    "OPTIMAL",
    "SimplexOptions",
    "SolveOutcome",
    "UNBOUNDED",
    "VerificationReport",
    "build_model_map",
    "export_model",
    "fits_builtin",
    "import_solution",
    "load_model_map",
    "parse_lp_text",
    "parse_mps",
    "parse_solution_values",
    "solve",
    "solve_builtin",
    "solve_highs",
    "verify_solution",
    "write_lp_text",
    "write_model_map",
    "write_mps",
    "write_solution_values",
]
