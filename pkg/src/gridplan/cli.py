"""Command-line pipeline: scenarios -> plan -> reports, plus sweeps and baselines.

Every subcommand reads one JSON config (see :mod:`gridplan.config`) and a
handful of override flags. Outputs land in the config's output directory and
are byte-identical across repeat runs with the same config and seed.

Exit codes: 0 ok, 1 usage, 2 data error, 3 infeasible, 4 solver failure,
5 model exported and awaiting an external solution.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import __version__
from .config import (
    CONFIG_BACKENDS,
    RunConfig,
    apply_overrides,
    load_config,
    validate_config,
)
from .core.network_io import load_network
from .core.profiles_io import load_profiles
from .core.synthetic import synth_profiles
from .scenarios.features import SEASON_ORDER
from .errors import (
    DataError,
    DimensionError,
    GridplanError,
    InfeasibleError,
    SolverError,
    UnboundedError,
)
from .program import (
    build_centralized_variant,
    build_deterministic_equivalent,
    decode_solution,
    read_solution,
    tag_family,
    write_solution,
)
from .reports import (
    baseline_compare,
    convergence_sweep,
    min_unserved_fraction,
    node_failure_trace,
    reliability_metric,
    run_centralized_ladder,
    solve_distributed,
    trace_filename,
    write_baseline_csv,
    write_convergence_csv,
    write_report_set,
    write_trace_csv,
)
from .scenarios.assemble import generate_scenarios, read_scenarios, write_scenarios
from .solve import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    export_model,
    import_solution,
    solve,
    verify_solution,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INFEASIBLE = 3
EXIT_SOLVER = 4
EXIT_EXPORTED = 5


class _Parser(argparse.ArgumentParser):
    """argparse's default usage-error exit code is 2; this tool reserves
    that for data errors, so remap usage problems to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="gridplan",
        description="Size node-level solar and storage on a distribution feeder "
        "under clustered representative days and sampled outages.",
    )
    parser.add_argument("--version", action="version", version=f"gridplan {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--config", required=True, help="path to the run config (JSON)")
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument(
        "--backend", choices=CONFIG_BACKENDS, default=None, help="override the solver backend"
    )
    common.add_argument(
        "--epsilon", type=float, default=None, help="override the unserved-energy fraction cap"
    )
    common.add_argument("--out", default=None, help="override the output directory")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers where supported")

    p = sub.add_parser(
        "scenarios", parents=[common], help="cluster the year and write scenarios.json"
    )
    p.add_argument(
        "--synth",
        action="store_true",
        help="generate profiles from the seed instead of reading profile files",
    )
    p.set_defaults(func=cmd_scenarios)

    p = sub.add_parser(
        "plan", parents=[common], help="build and solve the planning model, then report"
    )
    p.add_argument(
        "--centralized",
        action="store_true",
        help="pool all assets at a single bus instead of siting them per node",
    )
    p.add_argument(
        "--scenarios",
        default=None,
        help="scenario file to plan against (default: <out>/scenarios.json)",
    )
    p.add_argument(
        "--solution",
        default=None,
        help="import an externally solved point (name/value file) instead of solving",
    )
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser(
        "sweep", parents=[common], help="re-cluster and re-solve across cluster counts"
    )
    p.add_argument(
        "--k-list",
        required=True,
        help="cluster counts to visit, e.g. '2,3,4' or '2-7' (inclusive)",
    )
    p.add_argument(
        "--synth",
        action="store_true",
        help="generate profiles from the seed instead of reading profile files",
    )
    p.add_argument(
        "--repeats", type=int, default=5, help="solver repeats per K for the stability flag"
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "baseline",
        parents=[common],
        help="compare the per-node design against a single-bus centralized variant",
    )
    p.add_argument("--scenarios", default=None, help="scenario file (default: <out>/scenarios.json)")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser(
        "trace", parents=[common], help="dump one bus/scenario dispatch trace as CSV"
    )
    p.add_argument("--scenario", required=True, help="scenario id, e.g. winter_d181_single")
    p.add_argument("--node", required=True, type=int, help="bus id to trace")
    p.add_argument(
        "--solution", default=None, help="solution file (default: <out>/solution.json)"
    )
    p.add_argument("--scenarios", default=None, help="scenario file (default: <out>/scenarios.json)")
    p.set_defaults(func=cmd_trace)
    return parser


# ---------------------------------------------------------------------------
# shared plumbing

def _configure(args, need_profiles: bool = False) -> RunConfig:
    cfg = load_config(args.config)
    cfg = apply_overrides(
        cfg,
        seed=args.seed,
        epsilon=args.epsilon,
        backend=args.backend,
        out=args.out,
        synth=getattr(args, "synth", False),
    )
    validate_config(cfg, need_profiles=need_profiles)
    return cfg


def _load_profiles(cfg: RunConfig):
    network = load_network(cfg.network_path)
    if cfg.uses_synthetic_profiles:
        profiles = synth_profiles(network, seed=cfg.synth_seed)
    else:
        profiles = load_profiles(cfg.load_path, network, pv_path=cfg.pv_path)
    return network, profiles


def _scenario_path(args, cfg: RunConfig) -> Path:
    given = getattr(args, "scenarios", None)
    return Path(given) if given else cfg.out_dir / "scenarios.json"


def _solve_backend(cfg: RunConfig) -> str:
    if cfg.backend == "export":
        raise DataError("backend 'export' only applies to the plan subcommand")
    return cfg.backend


def _parse_k_list(text: str) -> list[int]:
    out: list[int] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        sep = "-" if "-" in token else ".." if ".." in token else None
        try:
            if sep:
                lo, hi = token.split(sep, 1)
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise DataError(f"empty cluster-count range {token!r}")
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(token))
        except ValueError:
            raise DataError(f"bad cluster-count entry {token!r}") from None
    if not out:
        raise DataError("empty cluster-count list")
    return out


def _certificate_families(lp, certificate: dict | None) -> str:
    if not certificate or "rows" not in certificate:
        return ""
    fams: dict[str, int] = {}
    for r in certificate["rows"]:
        fam = tag_family(lp.row_tags[r])
        fams[fam] = fams.get(fam, 0) + 1
    return ", ".join(f"{f} (x{n})" if n > 1 else f for f, n in sorted(fams.items()))


# ---------------------------------------------------------------------------
# subcommands

def cmd_scenarios(args) -> int:
    cfg = _configure(args, need_profiles=True)
    network, profiles = _load_profiles(cfg)
    t0 = time.perf_counter()
    scenarios, diag = generate_scenarios(
        profiles,
        network,
        cfg.device,
        k_min=cfg.k_min,
        k_max=cfg.k_max,
        seed=cfg.seed,
        multi_node=cfg.multi_node,
        jobs=args.jobs,
    )
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / "scenarios.json"
    write_scenarios(path, scenarios, diag)
    print(
        f"{len(scenarios)} scenarios from {diag['rep_day_count']} representative days"
        f" in {time.perf_counter() - t0:.1f}s -> {path}"
    )
    for season in SEASON_ORDER:
        k = diag["season_k"][season.value]
        sil = diag["season_silhouette"][season.value]
        print(f"  {season.value}: K={k} silhouette={sil:.3f}")
    print(f"  weight sum: {diag['weight_sum']:.12f}")
    return EXIT_OK


def _emit_plan_outputs(cfg: RunConfig, solution, report, scenarios) -> int:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    sol_path = cfg.out_dir / "solution.json"
    write_solution(solution, sol_path)
    written = [sol_path] + write_report_set(cfg.out_dir, solution, scenarios)

    rel = reliability_metric(solution, scenarios, epsilon_rel=cfg.costs.epsilon_rel)
    worst = max(report.max_by_family.values(), default=0.0)
    print(f"objective: {solution.objective_total:.6f}")
    print(
        f"capacity: {solution.cap_pv_kw.sum():.1f} kW solar,"
        f" {solution.cap_b_kwh.sum():.1f} kWh storage"
    )
    print(
        f"reliability: {rel.reliability_pct:.4f}%"
        f" (unserved fraction {rel.eens_fraction:.3e},"
        f" cap {cfg.costs.epsilon_rel:.3e},"
        f" {'met' if rel.target_met else 'MISSED'})"
    )
    print(
        f"residuals: worst row {worst:.3e}, bounds {report.max_bound_violation:.3e},"
        f" cyclic {report.cyclic_gap if report.cyclic_gap is not None else 0.0:.3e},"
        f" simultaneous charge/discharge"
        f" {report.simultaneous_flow if report.simultaneous_flow is not None else 0.0:.3e}"
    )
    for w in report.warnings:
        print(f"warning: {w}")
    for p in written:
        print(f"wrote {p}")
    if not report.passed():
        for line in report.failures():
            print(f"verification failure: {line}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_plan(args) -> int:
    cfg = _configure(args)
    network = load_network(cfg.network_path)
    scenarios, _ = read_scenarios(_scenario_path(args, cfg))
    if args.centralized:
        lp = build_centralized_variant(network, scenarios, cfg.device, cfg.costs)
    else:
        lp = build_deterministic_equivalent(
            network,
            scenarios,
            cfg.device,
            cfg.costs,
            with_network=cfg.with_network,
            name=cfg.name,
        )
    print(f"model {lp.name}: {lp.n_rows} rows, {lp.n_cols} columns, {lp.n_nonzeros} nonzeros")

    if args.solution:
        solution, report = import_solution(args.solution, lp)
        print(f"imported point from {args.solution}")
        return _emit_plan_outputs(cfg, solution, report, scenarios)

    if cfg.backend == "export":
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        model_path = cfg.out_dir / "model.mps"
        export_model(lp, model_path, fmt="mps")
        print(f"wrote {model_path}")
        print(f"wrote {model_path.parent / 'model_map.json'}")
        print("solve externally, then import with: plan --solution <values-file>")
        return EXIT_EXPORTED

    t0 = time.perf_counter()
    result = solve(lp, backend=cfg.backend)
    print(
        f"status: {result.status} ({result.backend},"
        f" {result.iterations} iterations, {time.perf_counter() - t0:.1f}s)"
    )
    if result.status == OPTIMAL:
        report = verify_solution(lp, result.x)
        solution = decode_solution(lp, result.x, result.status)
        return _emit_plan_outputs(cfg, solution, report, scenarios)
    if result.status == INFEASIBLE:
        fams = _certificate_families(lp, result.certificate)
        if fams:
            print(f"violated constraint families: {fams}", file=sys.stderr)
        diag_status, fraction = min_unserved_fraction(lp, scenarios, backend=cfg.backend)
        if fraction is not None and fraction > cfg.costs.epsilon_rel:
            print(
                "the reliability cap (eq35) cannot be met: minimum achievable"
                f" unserved-energy fraction is {fraction:.4e},"
                f" epsilon_rel is {cfg.costs.epsilon_rel:.4e}",
                file=sys.stderr,
            )
        elif diag_status != OPTIMAL:
            print(
                "infeasible even with the reliability cap (eq35) lifted;"
                " check availability, capacity ceilings, and line limits",
                file=sys.stderr,
            )
        return EXIT_INFEASIBLE
    if result.status == UNBOUNDED:
        print("model is unbounded; check cost signs and bounds", file=sys.stderr)
        return EXIT_SOLVER
    print(f"solver stopped without an answer: {result.status}", file=sys.stderr)
    return EXIT_SOLVER


def cmd_sweep(args) -> int:
    cfg = _configure(args, need_profiles=True)
    ks = _parse_k_list(args.k_list)
    network, profiles = _load_profiles(cfg)
    rows = convergence_sweep(
        ks,
        profiles,
        network,
        cfg.device,
        cfg.costs,
        seed=cfg.seed,
        backend=_solve_backend(cfg),
        repeats=args.repeats,
        multi_node=cfg.multi_node,
        with_network=cfg.with_network,
        jobs=args.jobs,
    )
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / "convergence.csv"
    write_convergence_csv(path, rows)
    for r in rows:
        if r.status == OPTIMAL:
            stable = "stable" if r.repeats_identical else "UNSTABLE"
            print(
                f"K={r.k}: {r.n_scenarios} scenarios, objective {r.objective:.6f},"
                f" {r.wall_time_s:.1f}s, {stable} across {args.repeats} repeats"
            )
        else:
            detail = f" ({r.error})" if r.error else ""
            print(f"K={r.k}: {r.status}{detail}")
    print(f"wrote {path}")
    return EXIT_OK if any(r.status == OPTIMAL for r in rows) else EXIT_SOLVER


def cmd_baseline(args) -> int:
    cfg = _configure(args)
    network = load_network(cfg.network_path)
    scenarios, _ = read_scenarios(_scenario_path(args, cfg))
    backend = _solve_backend(cfg)
    dist_status, dist_sol = solve_distributed(
        network, scenarios, cfg.device, cfg.costs, backend=backend, with_network=cfg.with_network
    )
    print(f"distributed: {dist_status}")
    runs = run_centralized_ladder(network, scenarios, cfg.device, cfg.costs, backend=backend)
    for run in runs:
        print(f"centralized at epsilon_rel={run.epsilon_rel!r}: {run.status}")
    comparison = baseline_compare(dist_status, dist_sol, runs, scenarios)
    first = comparison.first_feasible
    print(
        "first feasible centralized threshold: "
        + (f"{first!r}" if first is not None else "none on the relaxation ladder")
    )
    if comparison.ens_ratio is not None:
        print(f"centralized/distributed unserved-energy ratio: {comparison.ens_ratio:.2f}")
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / "baseline.csv"
    write_baseline_csv(path, comparison)
    print(f"wrote {path}")
    return EXIT_OK if dist_status == OPTIMAL else EXIT_INFEASIBLE


def cmd_trace(args) -> int:
    cfg = _configure(args)
    scenarios, _ = read_scenarios(_scenario_path(args, cfg))
    sol_path = Path(args.solution) if args.solution else cfg.out_dir / "solution.json"
    if not sol_path.exists():
        raise DataError(f"solution file not found: {sol_path} (run plan first)")
    solution = read_solution(sol_path)
    trace = node_failure_trace(solution, scenarios, args.scenario, args.node)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / trace_filename(args.node, args.scenario)
    write_trace_csv(path, trace)
    windows = (
        "; ".join(f"{w.component} out hours {w.start_h}-{w.start_h + w.duration_h - 1}" for w in trace.windows)
        or "none"
    )
    print(f"bus {trace.bus} in {trace.scenario_id}: outage windows: {windows}")
    print(f"cyclic state-of-charge gap: {trace.cyclic_gap_kwh:.3e} kWh")
    print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    stage = args.command
    try:
        return args.func(args)
    except (DataError, DimensionError) as exc:
        print(f"{stage}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InfeasibleError as exc:
        print(f"{stage}: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UnboundedError, SolverError) as exc:
        print(f"{stage}: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except GridplanError as exc:
        print(f"{stage}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
