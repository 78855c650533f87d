"""Result record shared by every solver backend."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
ITERATION_LIMIT = "IterationLimit"


@dataclass
class SolveOutcome:
    """What a solve attempt produced.

    ``duals`` follow the sensitivity convention d(objective)/d(rhs) per
    row, in original row order. ``certificate`` carries backend-specific
    evidence: violated row indices for Infeasible, an escape direction
    for Unbounded.
    """

    status: str
    objective: float
    x: np.ndarray | None
    duals: np.ndarray | None
    iterations: int
    wall_time_s: float
    backend: str
    certificate: dict | None = None
    messages: list[str] = field(default_factory=list)

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL
