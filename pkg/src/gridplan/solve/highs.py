"""Backend bridging to the HiGHS solver that ships inside scipy.

Rows are split into inequality and equality groups for linprog, then
dual values are stitched back together in original row order with the
d(objective)/d(rhs) sensitivity convention (>= rows were negated on the
way in, so their marginals flip sign on the way back).
"""

from __future__ import annotations

import time

import numpy as np
import scipy.optimize as sopt
import scipy.sparse as sp

from gridplan.errors import SolverError
from gridplan.program.indexing import (
    RELATION_EQ,
    RELATION_GE,
    RELATION_LE,
    LinearProgram,
)
from gridplan.solve.outcome import (
    INFEASIBLE,
    ITERATION_LIMIT,
    OPTIMAL,
    UNBOUNDED,
    SolveOutcome,
)

_STATUS = {
    0: OPTIMAL,
    1: ITERATION_LIMIT,
    2: INFEASIBLE,
    3: UNBOUNDED,
}


def solve_highs(
    lp: LinearProgram,
    time_limit_s: float | None = None,
    options: dict | None = None,
) -> SolveOutcome:
    """``options`` are passed through to linprog; the special key ``method``
    selects the HiGHS algorithm ("highs", "highs-ds", "highs-ipm")."""
    t0 = time.perf_counter()
    a = lp.rows_csr()
    le = lp.row_relations == RELATION_LE
    ge = lp.row_relations == RELATION_GE
    eq = lp.row_relations == RELATION_EQ

    a_ub = b_ub = None
    if le.any() or ge.any():
        a_ub = sp.vstack([a[le], -a[ge]], format="csr")
        b_ub = np.concatenate([lp.row_rhs[le], -lp.row_rhs[ge]])
    a_eq = b_eq = None
    if eq.any():
        a_eq, b_eq = a[eq], lp.row_rhs[eq]

    opts = {"presolve": True}
    if options:
        opts.update(options)
    method = opts.pop("method", "highs")
    if time_limit_s is not None:
        opts["time_limit"] = float(time_limit_s)
    res = sopt.linprog(
        lp.objective,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=np.column_stack([lp.col_lower, lp.col_upper]),
        method=method,
        options=opts,
    )
    if res.status not in _STATUS:
        raise SolverError(f"highs backend failed: {res.message}")
    status = _STATUS[res.status]

    x = duals = None
    objective = float("nan")
    if res.x is not None:
        x = np.asarray(res.x, dtype=float) + 0.0
        objective = float(lp.objective @ x)
    if status == OPTIMAL and res.x is not None:
        duals = np.zeros(lp.n_rows)
        ineq_m = np.asarray(res.ineqlin.marginals) if a_ub is not None else np.zeros(0)
        n_le = int(le.sum())
        duals[le] = ineq_m[:n_le]
        duals[ge] = -ineq_m[n_le:]
        if a_eq is not None:
            duals[eq] = np.asarray(res.eqlin.marginals)

    return SolveOutcome(
        status=status,
        objective=objective,
        x=x,
        duals=duals,
        iterations=int(getattr(res, "nit", 0)),
        wall_time_s=time.perf_counter() - t0,
        backend="highs",
        messages=[res.message] if res.message else [],
    )
