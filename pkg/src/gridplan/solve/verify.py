"""Independent feasibility audit of a candidate solution vector.

Residuals are grouped by constraint family so a violation points at the
offending physics (balance, storage recursion, voltage drop, ...), not
just a row number. Families realized as column bounds (capacity caps,
flow and voltage bands, non-negativity) are folded in from the tagged
bounds, so the family report covers the whole formulation. Two solution
level checks from the model's operating claims are included: terminal
state of charge must return to the anchor, and no battery may charge
and discharge in the same hour beyond tolerance.

Report-only: nothing here raises on a bad solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gridplan.errors import DataError
from gridplan.program.indexing import LinearProgram, tag_family

DEFAULT_TOL = 1e-6


@dataclass
class VerificationReport:
    max_by_family: dict[str, float]
    mean_by_family: dict[str, float]
    worst_row_by_family: dict[str, str]
    max_bound_violation: float
    objective: float
    cyclic_gap: float | None
    simultaneous_flow: float | None
    warnings: list[str] = field(default_factory=list)

    def passed(self, tol: float = DEFAULT_TOL) -> bool:
        worst = max(self.max_by_family.values(), default=0.0)
        checks = [worst, self.max_bound_violation]
        checks += [v for v in (self.cyclic_gap, self.simultaneous_flow) if v is not None]
        return max(checks) <= tol

    def failures(self, tol: float = DEFAULT_TOL) -> list[str]:
        out = []
        for fam in sorted(self.max_by_family):
            if self.max_by_family[fam] > tol:
                out.append(
                    f"{fam} violated by {self.max_by_family[fam]:.3e}"
                    f" (worst at {self.worst_row_by_family[fam]})"
                )
        if self.max_bound_violation > tol:
            out.append(f"column bounds violated by {self.max_bound_violation:.3e}")
        if self.cyclic_gap is not None and self.cyclic_gap > tol:
            out.append(f"terminal state of charge off by {self.cyclic_gap:.3e}")
        if self.simultaneous_flow is not None and self.simultaneous_flow > tol:
            out.append(f"simultaneous charge/discharge of {self.simultaneous_flow:.3e}")
        return out


def _family(tag: str) -> str:
    # ad-hoc models may carry free-form tags; group those by the tag itself
    try:
        return tag_family(tag)
    except DataError:
        return tag


def verify_solution(lp: LinearProgram, x: np.ndarray) -> VerificationReport:
    x = np.asarray(x, dtype=float)
    viol = lp.residuals(x)

    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    maxes: dict[str, float] = {}
    worst_row: dict[str, str] = {}
    def tally(fam: str, v: float, label: str) -> None:
        sums[fam] = sums.get(fam, 0.0) + v
        counts[fam] = counts.get(fam, 0) + 1
        if fam not in maxes or v > maxes[fam]:
            maxes[fam] = v
            worst_row[fam] = label

    for r, tag in enumerate(lp.row_tags):
        tally(_family(tag), float(viol[r]), tag)

    # fold tagged bound violations into their families
    below = np.maximum(lp.col_lower - x, 0.0)
    above = np.maximum(x - lp.col_upper, 0.0)
    for tags, gaps in ((lp.lower_tags, below), (lp.upper_tags, above)):
        for col, tag in tags.items():
            tally(_family(tag), float(gaps[col]), f"{tag} ({lp.col_names[col]})")

    cyclic = simultaneous = None
    warnings: list[str] = []
    lay = lp.layout
    if lay is not None and "soc_init_frac" in lp.meta:
        n, t, n_s = lay.n_buses, lay.n_hours, lay.n_scenarios
        ii = np.arange(n)[None, :]
        ss = np.arange(n_s)[:, None]
        terminal = x[lay.soc(ii, t - 1, ss)]
        anchor = lp.meta["soc_init_frac"] * x[lay.cap_b(np.arange(n))][None, :]
        cyclic = float(np.abs(terminal - anchor).max(initial=0.0))
        iin = np.arange(n)[None, :, None]
        tte = np.arange(t)[None, None, :]
        sss = np.arange(n_s)[:, None, None]
        simultaneous = float(
            np.minimum(x[lay.ch(iin, tte, sss)], x[lay.dis(iin, tte, sss)]).max(initial=0.0)
        )
    else:
        warnings.append("no layout/metadata: storage-cycle and overlap checks skipped")

    return VerificationReport(
        max_by_family={k: maxes[k] for k in sorted(maxes)},
        mean_by_family={k: sums[k] / counts[k] for k in sorted(sums)},
        worst_row_by_family={k: worst_row[k] for k in sorted(worst_row)},
        max_bound_violation=float(np.maximum(below, above).max(initial=0.0)),
        objective=float(lp.objective @ x),
        cyclic_gap=cyclic,
        simultaneous_flow=simultaneous,
        warnings=warnings,
    )
