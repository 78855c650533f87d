"""Bounded-variable revised simplex with an explicit dense basis inverse.

Scope: desk-scale programs (toys, fixtures, small studies). Memory for
the basis inverse grows with the square of the row count, so a guard
refuses programs past the documented ceiling and points at the ``highs``
backend instead. Two phases: artificial columns absorb whatever initial
infeasibility the slack basis leaves, then the true objective is
optimized with the artificials pinned to zero.

Pricing is Dantzig (most negative reduced cost) with a permanent switch
to Bland's least-index rule after a degeneracy stall, which guarantees
termination. All tie-breaks are index-based and there is no randomness,
so identical inputs give identical pivot sequences and results.

Tolerances: primal feasibility 1e-6 absolute, reduced-cost optimality
1e-8, both configurable via SimplexOptions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from gridplan.errors import SolverError
from gridplan.program.indexing import (
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

MAX_BUILTIN_COLS = 50_000
MAX_BUILTIN_ROWS = 5_000

_BASIC, _AT_LOWER, _AT_UPPER, _FREE = 0, 1, 2, 3


@dataclass
class SimplexOptions:
    feasibility_tol: float = 1e-6
    optimality_tol: float = 1e-8
    pivot_tol: float = 1e-9
    max_iterations: int | None = None  # None picks 50*(rows+cols) + 1000
    refactor_every: int = 500
    stall_limit: int = 1000  # non-improving iterations before Bland's rule


class _Workspace:
    """Mutable solver state: extended matrix, basis, values, inverse."""

    def __init__(self, lp: LinearProgram, opts: SimplexOptions):
        self.opts = opts
        m, n = lp.n_rows, lp.n_cols
        self.m, self.n = m, n
        a = lp.rows_csr()
        self.b = lp.row_rhs.astype(float)

        # slack bounds encode the row relation: a.x + s = b
        slo = np.where(lp.row_relations == RELATION_GE, -np.inf, 0.0)
        shi = np.where(lp.row_relations == RELATION_LE, np.inf, 0.0)

        lo = np.concatenate([lp.col_lower, slo])
        hi = np.concatenate([lp.col_upper, shi])
        val = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
        vstatus = np.where(
            np.isfinite(lo), _AT_LOWER, np.where(np.isfinite(hi), _AT_UPPER, _FREE)
        ).astype(np.int8)

        resid = self.b - a @ val[:n]
        feasible = (resid >= slo - 0.0) & (resid <= shi + 0.0)
        val[n : n + m] = np.where(feasible, resid, np.clip(resid, slo, shi))
        vstatus[n : n + m] = np.where(
            feasible, _BASIC, np.where(resid < slo, _AT_LOWER, _AT_UPPER)
        )

        # one artificial per initially violated row, basic at |residual|
        self.art_rows = np.flatnonzero(~feasible)
        n_art = self.art_rows.size
        rem = resid[self.art_rows] - val[n + self.art_rows]
        sgn = np.where(rem >= 0, 1.0, -1.0)
        art = sp.csc_matrix(
            (sgn, (self.art_rows, np.arange(n_art))), shape=(m, n_art)
        )
        self.a_csc = sp.hstack([a, sp.eye(m, format="csc"), art], format="csc")
        self.n_tot = n + m + n_art
        self.lo = np.concatenate([lo, np.zeros(n_art)])
        self.hi = np.concatenate([hi, np.full(n_art, np.inf)])
        self.val = np.concatenate([val, np.abs(rem)])
        self.vstatus = np.concatenate([vstatus, np.full(n_art, _BASIC, np.int8)])

        self.basis = np.where(feasible, n + np.arange(m), 0)
        self.basis[self.art_rows] = n + m + np.arange(n_art)
        binv_diag = np.ones(m)
        binv_diag[self.art_rows] = sgn  # 1/sign == sign for +-1
        self.binv = np.diag(binv_diag)

        self.iterations = 0
        self.pivots_since_refactor = 0
        self.bland = False

    # -- linear algebra helpers -----------------------------------------

    def column(self, j: int) -> np.ndarray:
        lo_p, hi_p = self.a_csc.indptr[j], self.a_csc.indptr[j + 1]
        rows = self.a_csc.indices[lo_p:hi_p]
        vals = self.a_csc.data[lo_p:hi_p]
        return self.binv[:, rows] @ vals

    def duals(self, c: np.ndarray) -> np.ndarray:
        return self.binv.T @ c[self.basis]

    def reduced_costs(self, c: np.ndarray) -> np.ndarray:
        y = self.duals(c)
        d = c - self.a_csc.T @ y
        d[self.basis] = 0.0
        return d

    def refactor(self) -> None:
        try:
            bmat = self.a_csc[:, self.basis].toarray()
            self.binv = np.linalg.inv(bmat)
        except np.linalg.LinAlgError as exc:
            raise SolverError("basis matrix became singular") from exc
        mask = np.ones(self.n_tot, dtype=bool)
        mask[self.basis] = False
        r = self.b - self.a_csc @ (self.val * mask)
        self.val[self.basis] = self.binv @ r
        self.pivots_since_refactor = 0

    # -- one pricing/pivot step ------------------------------------------

    def step(self, c: np.ndarray) -> str:
        """Returns 'optimal', 'unbounded', or '' when a pivot was made."""
        opts = self.opts
        d = self.reduced_costs(c)
        down = ((self.vstatus == _AT_LOWER) | (self.vstatus == _FREE)) & (
            d < -opts.optimality_tol
        )
        up = ((self.vstatus == _AT_UPPER) | (self.vstatus == _FREE)) & (
            d > opts.optimality_tol
        )
        candidates = np.flatnonzero(down | up)
        if candidates.size == 0:
            return "optimal"
        if self.bland:
            j = int(candidates[0])
        else:
            j = int(candidates[np.argmax(np.abs(d[candidates]))])
        sigma = 1.0 if down[j] else -1.0

        w = self.column(j)
        delta = -sigma * w
        bvar = self.basis
        eligible = np.abs(w) > opts.pivot_tol
        theta = np.full(self.m, np.inf)
        pos = eligible & (delta > opts.pivot_tol)
        neg = eligible & (delta < -opts.pivot_tol)
        theta[pos] = np.maximum(self.hi[bvar[pos]] - self.val[bvar[pos]], 0.0) / delta[pos]
        theta[neg] = np.minimum(self.lo[bvar[neg]] - self.val[bvar[neg]], 0.0) / delta[neg]

        theta_basic = theta.min() if self.m else np.inf
        span = self.hi[j] - self.lo[j]
        theta_flip = span if np.isfinite(span) else np.inf

        if not np.isfinite(min(theta_basic, theta_flip)):
            self._unbounded_col = j
            self._unbounded_dir = sigma
            return "unbounded"

        if theta_flip <= theta_basic:
            # entering variable runs to its other bound; basis unchanged
            self.val[bvar] += theta_flip * delta
            self.val[j] = self.hi[j] if sigma > 0 else self.lo[j]
            self.vstatus[j] = _AT_UPPER if sigma > 0 else _AT_LOWER
            return ""

        near = np.flatnonzero(theta <= theta_basic + 1e-12)
        if self.bland:
            r = int(near[np.argmin(bvar[near])])
        else:
            r = int(near[np.argmax(np.abs(w[near]))])

        step = theta[r]
        self.val[bvar] += step * delta
        self.val[j] += sigma * step
        leaving = bvar[r]
        if delta[r] > 0:
            self.val[leaving] = self.hi[leaving]
            self.vstatus[leaving] = _AT_UPPER
        else:
            self.val[leaving] = self.lo[leaving]
            self.vstatus[leaving] = _AT_LOWER
        self.basis[r] = j
        self.vstatus[j] = _BASIC

        pivot_row = self.binv[r] / w[r]
        self.binv -= np.outer(w, pivot_row)
        self.binv[r] = pivot_row
        self.pivots_since_refactor += 1
        if self.pivots_since_refactor >= opts.refactor_every:
            self.refactor()
        return ""

    def run_phase(self, c: np.ndarray, max_iterations: int) -> str:
        best = np.inf
        stall = 0
        while True:
            if self.iterations >= max_iterations:
                return "iteration_limit"
            outcome = self.step(c)
            if outcome:
                return outcome
            self.iterations += 1
            z = float(c[self.basis] @ self.val[self.basis])
            if z < best - 1e-11:
                best, stall = z, 0
            else:
                stall += 1
                if stall > self.opts.stall_limit and not self.bland:
                    self.bland = True
                    stall = 0


def solve_builtin(lp: LinearProgram, options: SimplexOptions | None = None) -> SolveOutcome:
    """Two-phase simplex solve of a desk-scale program."""
    opts = options or SimplexOptions()
    if lp.n_cols > MAX_BUILTIN_COLS or lp.n_rows > MAX_BUILTIN_ROWS:
        raise SolverError(
            f"program has {lp.n_cols} columns x {lp.n_rows} rows; the built-in "
            f"solver handles at most {MAX_BUILTIN_COLS} x {MAX_BUILTIN_ROWS}. "
            "Use the 'highs' or 'export' backend."
        )
    bad = np.flatnonzero(lp.col_lower > lp.col_upper)
    if bad.size:
        raise SolverError(f"column {lp.col_names[bad[0]]} has crossed bounds")

    t0 = time.perf_counter()
    ws = _Workspace(lp, opts)
    max_iterations = (
        opts.max_iterations
        if opts.max_iterations is not None
        else 50 * (lp.n_rows + lp.n_cols) + 1000
    )

    c1 = np.zeros(ws.n_tot)
    c1[lp.n_cols + lp.n_rows :] = 1.0
    c2 = np.zeros(ws.n_tot)
    c2[: lp.n_cols] = lp.objective

    def finish(status: str, duals: np.ndarray | None, certificate: dict | None = None):
        x = ws.val[: lp.n_cols] + 0.0
        return SolveOutcome(
            status=status,
            objective=float(lp.objective @ x),
            x=x,
            duals=duals,
            iterations=ws.iterations,
            wall_time_s=time.perf_counter() - t0,
            backend="builtin",
            certificate=certificate,
        )

    if ws.art_rows.size:
        phase1 = ws.run_phase(c1, max_iterations)
        if phase1 == "iteration_limit":
            return finish(ITERATION_LIMIT, None)
        infeas = float(c1[ws.basis] @ ws.val[ws.basis])
        if infeas > opts.feasibility_tol:
            art = lp.n_cols + lp.n_rows + np.arange(ws.art_rows.size)
            stuck = ws.art_rows[ws.val[art] > opts.feasibility_tol]
            return finish(
                INFEASIBLE,
                ws.duals(c1),
                {"rows": [int(i) for i in stuck], "max_violation": infeas},
            )
        ws.hi[lp.n_cols + lp.n_rows :] = 0.0  # pin artificials for phase 2

    phase2 = ws.run_phase(c2, max_iterations)
    if phase2 == "iteration_limit":
        return finish(ITERATION_LIMIT, None)
    if phase2 == "unbounded":
        return finish(
            UNBOUNDED,
            None,
            {"column": int(ws._unbounded_col), "direction": float(ws._unbounded_dir)},
        )

    ws.refactor()  # squeeze accumulated drift out of the basic values
    x = ws.val[: lp.n_cols]
    worst = max(
        float(lp.residuals(x).max(initial=0.0)),
        float(lp.bound_violations(x).max(initial=0.0)),
    )
    if worst > opts.feasibility_tol:
        raise SolverError(f"solution failed the feasibility check (residual {worst:.3e})")
    return finish(OPTIMAL, ws.duals(c2))
