"""Command-line entry point.

Subcommands: generate, graph dump, solve, oracle, extract-labels, reduce,
validate. Exit codes: 0 success, 1 domain failure (infeasible solve or a
failed validation), 2 usage errors (bad flags, missing or malformed files).
Every run emits a machine-readable manifest: commands with --out write a
sidecar `<out>.manifest.json`; the others embed it in their stdout JSON.
"""

from __future__ import annotations

import argparse
import json
import logging
import platform
import sys
import time
from pathlib import Path

from . import __version__
from .columns import column_from_dict
from .driver import SolveConfig, TraceRecorder, solve
from .graph import build_graph
from .instance import (
    GeneratorConfig,
    InstanceError,
    canonical_dumps,
    generate_instance,
    instance_from_dict,
    load_instance,
    save_instance,
)
from .oracle import OracleCapError, solve_exact
from .pricing import PricingConfig
from .reduction import (
    LABEL_CLASSES,
    ReductionError,
    compute_label_sets,
    export_training_sample,
    load_scores,
    reduce_graph,
)
from .shifts import shifts_for
from .validate import validate_solution

log = logging.getLogger("shiftcg")

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class CliUsageError(Exception):
    pass


def _manifest(command: str, args, started: float) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    return {
        "command": command,
        "config": config,
        "versions": {"shiftcg": __version__, "python": platform.python_version()},
        "wall_seconds": round(time.monotonic() - started, 6),
    }


def _write_manifest(out_path: str, manifest: dict) -> None:
    Path(f"{out_path}.manifest.json").write_text(canonical_dumps(manifest))


def _load_instance_checked(path: str):
    p = Path(path)
    if not p.exists():
        raise CliUsageError(f"instance file not found: {path}")
    return load_instance(p)


def _cmd_generate(args) -> int:
    started = time.monotonic()
    config = GeneratorConfig(
        n_requests=args.n,
        seed=args.seed,
        fraction_paired_riders=args.paired,
        window_width_range=(args.window_min, args.window_max),
        capacity=args.capacity,
        omega=args.omega,
        fleet_size="auto" if args.fleet == "auto" else int(args.fleet),
        shift_earliest=args.shift_earliest,
        shift_latest=args.shift_latest,
        shift_duration=args.shift_duration,
        shift_step=args.shift_step,
        speed=args.speed,
        service_time=args.service_time,
        demand=args.demand,
    )
    instance = generate_instance(config)
    save_instance(instance, args.out)
    _write_manifest(args.out, _manifest("generate", args, started))
    print(f"wrote {args.out}: {instance.n} requests, {len(instance.riders)} riders")
    return EXIT_OK


def _cmd_graph_dump(args) -> int:
    started = time.monotonic()
    instance = _load_instance_checked(args.instance)
    graph = build_graph(instance)
    graph.dump_edges_csv(args.out)
    _write_manifest(args.out, _manifest("graph dump", args, started))
    print(f"wrote {args.out}: {len(graph.edges)} edges over {graph.num_nodes} nodes")
    return EXIT_OK


def _solve_config(args) -> SolveConfig:
    return SolveConfig(
        time_limit=args.time_limit,
        stall_iters=args.stall_iters,
        pricing=PricingConfig(
            max_columns=None if args.max_columns == 0 else args.max_columns,
            max_labels_per_node=None if args.max_labels == 0 else args.max_labels,
            dominance=not args.no_dominance,
        ),
        lp_backend=args.lp_backend,
        jobs=args.jobs,
    )


def _cmd_solve(args) -> int:
    started = time.monotonic()
    instance = _load_instance_checked(args.instance)
    if args.shift_step is not None:
        instance = instance_from_dict(
            {**instance.to_dict(), "shift_step": args.shift_step}
        )
    graph = build_graph(instance)
    if (args.scores is None) != (args.tau is None):
        raise CliUsageError("--scores and --tau must be given together")
    if args.scores is not None:
        graph = reduce_graph(graph, load_scores(args.scores), args.tau)

    trace = TraceRecorder() if args.record_trace else None
    report = solve(instance, _solve_config(args), graph=graph, trace=trace)
    payload = report.to_dict()
    if args.out:
        Path(args.out).write_text(canonical_dumps(payload))
        _write_manifest(args.out, _manifest("solve", args, started))
    else:
        print(canonical_dumps(payload), end="")
    if trace is not None:
        Path(args.record_trace).write_text(canonical_dumps(trace.to_dict()))
    log.info(
        "solve finished: status=%s objective=%d iterations=%d",
        report.status,
        report.objective,
        report.iterations,
    )
    if args.out:
        print(
            f"wrote {args.out}: status {report.status}, objective {report.objective}, "
            f"{len(report.columns)} routes"
        )
    return EXIT_DOMAIN if report.status == "infeasible" else EXIT_OK


def _cmd_oracle(args) -> int:
    started = time.monotonic()
    instance = _load_instance_checked(args.instance)
    graph = build_graph(instance)
    shifts = shifts_for(instance)
    result = solve_exact(
        instance, graph, shifts, max_requests=args.max_requests, max_shifts=args.max_shifts
    )
    payload = {
        "objective": result.objective,
        "routes": [c.to_dict() for c in result.routes],
        "manifest": _manifest("oracle", args, started),
    }
    print(canonical_dumps(payload), end="")
    return EXIT_OK


def _cmd_extract_labels(args) -> int:
    started = time.monotonic()
    if args.trace is None and args.instance is None:
        raise CliUsageError("provide --trace (labeled) or --instance (unlabeled)")
    if args.trace is not None:
        trace_path = Path(args.trace)
        if not trace_path.exists():
            raise CliUsageError(f"trace file not found: {args.trace}")
        trace = json.loads(trace_path.read_text())
        if not trace.get("instance"):
            raise CliUsageError(f"{args.trace}: trace has no embedded instance")
        instance = instance_from_dict(trace["instance"])
        labels = compute_label_sets(trace).for_class(args.label_class)
    else:
        instance = _load_instance_checked(args.instance)
        labels = None
    graph = build_graph(instance)
    sample = export_training_sample(instance, graph, labels)
    Path(args.out).write_text(canonical_dumps(sample))
    _write_manifest(args.out, _manifest("extract-labels", args, started))
    kind = f"labeled ({args.label_class})" if labels is not None else "unlabeled"
    print(f"wrote {args.out}: {kind} sample with {len(sample['edges'])} edges")
    return EXIT_OK


def _cmd_reduce(args) -> int:
    started = time.monotonic()
    instance = _load_instance_checked(args.instance)
    graph = build_graph(instance)
    reduced = reduce_graph(graph, load_scores(args.scores), args.tau)
    reduced.dump_edges_csv(args.out)
    _write_manifest(args.out, _manifest("reduce", args, started))
    print(
        f"wrote {args.out}: kept {len(reduced.edges)} of {len(graph.edges)} edges "
        f"at tau={args.tau}"
    )
    return EXIT_OK


def _cmd_validate(args) -> int:
    started = time.monotonic()
    instance = _load_instance_checked(args.instance)
    solution_path = Path(args.solution)
    if not solution_path.exists():
        raise CliUsageError(f"solution file not found: {args.solution}")
    try:
        payload = json.loads(solution_path.read_text())
        columns = [column_from_dict(c) for c in payload["routes"]]
        claimed_objective = int(payload["objective"])
        claimed_riders = [int(u) for u in payload["served_riders"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CliUsageError(f"{args.solution}: malformed solution file ({exc})") from exc
    graph = build_graph(instance)
    verdict = validate_solution(
        columns, instance, graph, claimed_objective, claimed_riders
    )
    print(
        canonical_dumps(
            {
                "verdict": "pass" if verdict.ok else "fail",
                "failures": verdict.failures,
                "manifest": _manifest("validate", args, started),
            }
        ),
        end="",
    )
    return EXIT_OK if verdict.ok else EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftcg",
        description="Joint trip-and-shift scheduling by column generation.",
    )
    parser.add_argument("--verbose", action="store_true", help="log progress at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a seeded synthetic instance")
    p.add_argument("--n", type=int, required=True, help="number of trip requests")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--paired", type=float, default=0.3, help="fraction of paired riders")
    p.add_argument("--capacity", type=int, default=3)
    p.add_argument("--omega", type=int, default=16, help="trips per driver divisor")
    p.add_argument("--fleet", default="auto", help="'auto' or an explicit vehicle count")
    p.add_argument("--window-min", type=int, default=30)
    p.add_argument("--window-max", type=int, default=60)
    p.add_argument("--shift-earliest", type=int, default=300)
    p.add_argument("--shift-latest", type=int, default=1320)
    p.add_argument("--shift-duration", type=int, default=480)
    p.add_argument("--shift-step", type=int, default=60)
    p.add_argument("--speed", type=float, default=0.6, help="km per minute")
    p.add_argument("--service-time", type=int, default=2)
    p.add_argument("--demand", type=int, default=1, help="seats per request")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("graph", help="routing-graph utilities")
    graph_sub = p.add_subparsers(dest="graph_command", required=True)
    pd = graph_sub.add_parser("dump", help="dump the edge universe as i,j,t_ij CSV")
    pd.add_argument("--instance", required=True)
    pd.add_argument("--out", required=True)
    pd.set_defaults(func=_cmd_graph_dump)

    p = sub.add_parser("solve", help="run column generation on an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", default=None, help="solution JSON path (stdout if omitted)")
    p.add_argument("--time-limit", type=float, default=None, help="seconds of wall clock")
    p.add_argument("--scores", default=None, help="edge-score CSV for graph reduction")
    p.add_argument("--tau", type=float, default=None, help="keep top tau percent of edges")
    p.add_argument("--record-trace", default=None, help="write a solve trace JSON here")
    p.add_argument("--stall-iters", type=int, default=20)
    p.add_argument("--max-columns", type=int, default=10, help="0 disables the cap")
    p.add_argument("--max-labels", type=int, default=200, help="0 disables the cap")
    p.add_argument("--no-dominance", action="store_true")
    p.add_argument("--lp-backend", choices=["bundled", "external"], default="bundled")
    p.add_argument("--shift-step", type=int, default=None, help="override the instance's step")
    p.add_argument("--jobs", type=int, default=1, help="parallel pricing workers")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle", help="exact brute-force solve (tiny instances)")
    p.add_argument("--instance", required=True)
    p.add_argument("--max-requests", type=int, default=6)
    p.add_argument("--max-shifts", type=int, default=4)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser(
        "extract-labels", help="export a training sample (labeled from a trace)"
    )
    p.add_argument("--trace", default=None, help="solve trace JSON (labeled export)")
    p.add_argument(
        "--class",
        dest="label_class",
        choices=LABEL_CLASSES,
        default="u50",
        help="labeling rule over the trace",
    )
    p.add_argument("--instance", default=None, help="instance JSON (unlabeled export)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_extract_labels)

    p = sub.add_parser("reduce", help="write the reduced edge universe as CSV")
    p.add_argument("--instance", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("validate", help="re-check a solution file from scratch")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except CliUsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceError, ReductionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
