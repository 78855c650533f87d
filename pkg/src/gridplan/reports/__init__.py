from gridplan.reports.analytics import (
    CostBreakdown,
    NodalBalance,
    NodeTrace,
    ReliabilityReport,
    SeasonProfile,
    node_failure_trace,
    nodal_energy_balance,
    objective_breakdown,
    reliability_metric,
    seasonal_dispatch_profiles,
)
from gridplan.reports.baseline import (
    EPSILON_LADDER,
    BaselineComparison,
    CentralizedOutcome,
    baseline_compare,
    min_unserved_fraction,
    run_centralized_ladder,
    solve_distributed,
)
from gridplan.reports.files import (
    trace_filename,
    write_balance_csv,
    write_baseline_csv,
    write_convergence_csv,
    write_ens_map_csv,
    write_reliability_json,
    write_report_set,
    write_seasonal_csv,
    write_trace_csv,
)
from gridplan.reports.sweep import KSweepRow, convergence_sweep

__all__ = [
    "CostBreakdown",
    "NodalBalance",
    "NodeTrace",
    "ReliabilityReport",
    "SeasonProfile",
    "objective_breakdown",
    "nodal_energy_balance",
    "seasonal_dispatch_profiles",
    "node_failure_trace",
    "reliability_metric",
    "EPSILON_LADDER",
    "BaselineComparison",
    "CentralizedOutcome",
    "baseline_compare",
    "run_centralized_ladder",
    "solve_distributed",
    "min_unserved_fraction",
    "KSweepRow",
    "convergence_sweep",
    "trace_filename",
    "write_balance_csv",
    "write_baseline_csv",
    "write_convergence_csv",
    "write_ens_map_csv",
    "write_reliability_json",
    "write_report_set",
    "write_seasonal_csv",
    "write_trace_csv",
]
