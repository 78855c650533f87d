"""Capacity planning toolkit for fully renewable islanded microgrids.

The package covers the whole planning chain: annual load/PV data handling,
representative-day scenario generation with component failure sampling,
assembly of the two-stage planning problem as a single linear program,
solving (built-in simplex or an external solver via file exchange), and
post-solve analytics and reports.
"""

from gridplan.errors import (
    DataError,
    DimensionError,
    GridplanError,
    InfeasibleError,
    SolverError,
    UnboundedError,
)

__version__ = "0.1.0"

__all__ = [
    "GridplanError",
    "DataError",
    "DimensionError",
    "InfeasibleError",
    "UnboundedError",
    "SolverError",
    "__version__",
]
