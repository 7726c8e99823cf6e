"""Command-line interface.

Subcommands: gen (graph providers), build (structure inspection), route
(single-scenario simulation), experiment (full protocol with CSV output),
bench (precompute runtime grid and backend comparison).

Exit codes: 0 success / packet delivered, 2 routing failure (route), 1 usage
or configuration error.  stdout carries human-readable output; machine
artifacts (CSV, JSON, graph files) go to files named by flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import experiments as ex
from . import failures as fl
from ._core import BACKEND, available_backends
from .bench import bench_backends, bench_table
from .graph import (FormatError, GenerationError, Graph, GraphError,
                    dump_edge_list, gen_erdos_renyi, gen_random_regular,
                    load_edge_list, load_graphml_file, write_graphml)
from .routing import compile_rules, format_trace, simulate
from .structures import MODES, build_structures, structures_to_json

USAGE_ERROR = 1
ROUTE_FAILED = 2


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; this CLI reserves 2
    for routing failures, so usage problems exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    p = _Parser(prog="treeroute", description=__doc__.split("\n", 1)[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def add_family(sp, seed_default=None):
        g = sp.add_mutually_exclusive_group(required=False)
        g.add_argument("--er", nargs=2, metavar=("N", "P"),
                       help="random G(n, p) family")
        g.add_argument("--regular", nargs=2, metavar=("N", "DELTA"),
                       help="random delta-regular family")
        g.add_argument("--graphml", metavar="PATH",
                       help="GraphML topology file")
        sp.add_argument("--seed", type=int, default=seed_default,
                        help="base RNG seed")

    sp = sub.add_parser("gen", help="generate a graph file")
    add_family(sp, seed_default=0)
    sp.add_argument("--out", help="output path (default stdout)")
    sp.add_argument("--echo-graphml", metavar="PATH",
                    help="also write the graph as GraphML")
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("build", help="build routing structures as JSON")
    sp.add_argument("--graph", required=True, help="edge-list or GraphML file")
    sp.add_argument("--src", required=True)
    sp.add_argument("--dst", required=True)
    sp.add_argument("--scheme", choices=MODES, required=True)
    sp.add_argument("--out", help="output path (default stdout)")
    sp.set_defaults(fn=cmd_build)

    sp = sub.add_parser("route", help="simulate one packet")
    sp.add_argument("--graph", required=True, help="edge-list or GraphML file")
    sp.add_argument("--src", required=True)
    sp.add_argument("--dst", required=True)
    sp.add_argument("--scheme", choices=MODES, required=True)
    sp.add_argument("--fail", default="",
                    help='failed edges as "u-v,u-v" (labels or ids)')
    sp.add_argument("--scenario", help="failure scenario JSON file")
    sp.set_defaults(fn=cmd_route)

    sp = sub.add_parser("experiment", help="run the evaluation protocol")
    sp.add_argument("--config", help="JSON config file; flags override it")
    add_family(sp)
    sp.add_argument("--connect", choices=(ex.CONNECT_RESAMPLE, ex.CONNECT_LCC),
                    help="connectivity policy for the er family")
    sp.add_argument("--schemes", help="comma list (default all three)")
    sp.add_argument("--failures", choices=fl.MODELS, dest="failure_model",
                    help="failure model (default clustered)")
    sp.add_argument("--rates", help="comma list of failure rates")
    sp.add_argument("--runs", type=int)
    sp.add_argument("--pf-delta", type=float, dest="pf_delta",
                    help="clustered decay parameter (default 0.3)")
    sp.add_argument("--decay",
                    choices=(fl.DECAY_MULTIPLICATIVE, fl.DECAY_SUBTRACTIVE))
    sp.add_argument("--jobs", type=int,
                    help="parallel workers (default: cpu count)")
    sp.add_argument("--out", help="aggregate metrics CSV path")
    sp.add_argument("--records", help="raw per-run records CSV path")
    sp.set_defaults(fn=cmd_experiment)

    sp = sub.add_parser("bench", help="precompute runtime grid / backends")
    sp.add_argument("--grid", default="25:105:10",
                    help="node counts as start:stop:step (default 25:105:10)")
    sp.add_argument("--p", type=float, default=0.15)
    sp.add_argument("--runs", type=int, default=50, help="runs per grid point")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-prefix", dest="out_prefix",
                    help="write <prefix>_timing.csv and <prefix>_timing_binned.csv")
    sp.add_argument("--compare-backends", action="store_true",
                    help="time the pure and compiled kernels side by side")
    sp.set_defaults(fn=cmd_bench)
    return p


def _load_graph(path: str) -> Graph:
    if path.endswith((".graphml", ".xml")):
        return load_graphml_file(path)
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh.read())


def _family_graph(args) -> Graph:
    if args.er:
        n, p = int(args.er[0]), float(args.er[1])
        return gen_erdos_renyi(n, p, args.seed)
    if args.regular:
        n, delta = int(args.regular[0]), int(args.regular[1])
        return gen_random_regular(n, delta, args.seed)
    return load_graphml_file(args.graphml)


def cmd_gen(args, parser) -> int:
    if not (args.er or args.regular or args.graphml):
        parser.error("one of --er, --regular, --graphml is required")
    g = _family_graph(args)
    text = dump_edge_list(g)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {g.n} nodes, {g.m} edges to {args.out}")
    else:
        sys.stdout.write(text)
    if args.echo_graphml:
        with open(args.echo_graphml, "w", encoding="utf-8") as fh:
            fh.write(write_graphml(g))
    return 0


def _flow(args, g: Graph) -> tuple[int, int]:
    s = g.node_by_label(args.src)
    d = g.node_by_label(args.dst)
    if s == d:
        raise GraphError("source and destination must differ")
    return s, d


def cmd_build(args, parser) -> int:
    g = _load_graph(args.graph)
    s, d = _flow(args, g)
    doc = structures_to_json(build_structures(g, s, d, args.scheme))
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _parse_failures(args, g: Graph) -> list[tuple[int, int]]:
    failed = []
    if args.scenario:
        with open(args.scenario, encoding="utf-8") as fh:
            failed.extend(tuple(e) for e in
                          fl.FailureScenario.from_json(json.load(fh)).failed)
    if args.fail:
        for token in args.fail.split(","):
            token = token.strip()
            if not token:
                continue
            parts = token.split("-")
            if len(parts) != 2:
                raise GraphError(f'bad --fail entry {token!r}, expected "u-v"')
            failed.append((g.node_by_label(parts[0]),
                           g.node_by_label(parts[1])))
    return failed


def cmd_route(args, parser) -> int:
    g = _load_graph(args.graph)
    s, d = _flow(args, g)
    failed = _parse_failures(args, g)
    table = compile_rules(build_structures(g, s, d, args.scheme))
    trace = simulate(g, table, failed)
    sys.stdout.write(format_trace(trace))
    return 0 if trace.delivered else ROUTE_FAILED


def cmd_experiment(args, parser) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = ex.config_from_json(json.load(fh))
    else:
        cfg = ex.ExperimentConfig(
            family=ex.GraphFamily(kind=""), schemes=list(MODES),
            failure_model=fl.MODEL_CLUSTERED, rates=[], runs=0, base_seed=0)

    if args.er:
        cfg.family = ex.GraphFamily("er", n=int(args.er[0]),
                                    p=float(args.er[1]))
    elif args.regular:
        cfg.family = ex.GraphFamily("regular", n=int(args.regular[0]),
                                    delta=int(args.regular[1]))
    elif args.graphml:
        cfg.family = ex.GraphFamily("graphml", path=args.graphml)
    if args.connect:
        cfg.family.connect = args.connect
    if args.schemes:
        cfg.schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
    if args.failure_model:
        cfg.failure_model = args.failure_model
    if args.rates:
        try:
            cfg.rates = [float(r) for r in args.rates.split(",") if r.strip()]
        except ValueError:
            parser.error(f"--rates must be a comma list of numbers, "
                         f"got {args.rates!r}")
    if args.runs is not None:
        cfg.runs = args.runs
    if args.seed is not None:
        cfg.base_seed = args.seed
    if args.pf_delta is not None:
        cfg.pf_delta = args.pf_delta
    if args.decay:
        cfg.decay = args.decay
    cfg.jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)

    errors = ex.validate_config(cfg)
    if errors:
        for e in errors:
            print(f"config error: {e}", file=sys.stderr)
        return USAGE_ERROR

    result = ex.run_experiment(cfg)
    print(f"family: {cfg.family.describe()}  failures: {cfg.failure_model}"
          f"  runs: {cfg.runs}  seed: {cfg.base_seed}")
    if result.generation_retries:
        print(f"generation retries: {result.generation_retries}")
    if result.loop_diagnostics:
        print(f"LOOP diagnostics: {len(result.loop_diagnostics)} "
              "(invariant violation!)", file=sys.stderr)
    print(result.metrics.summary_text())
    if args.out:
        ex.emit_csv(result, args.out, args.records)
        print(f"wrote {args.out}" +
              (f" and {args.records}" if args.records else ""))
    elif args.records:
        ex.emit_csv(result, os.devnull, args.records)
        print(f"wrote {args.records}")
    return 0


def cmd_bench(args, parser) -> int:
    try:
        start, stop, step = (int(x) for x in args.grid.split(":"))
    except ValueError:
        parser.error(f"--grid must be start:stop:step, got {args.grid!r}")
    ns = list(range(start, stop + 1, step))
    if not ns:
        parser.error("empty --grid")
    print(f"active backend: {BACKEND} "
          f"(available: {', '.join(available_backends())})")
    if args.compare_backends:
        print(bench_table(bench_backends(seed=args.seed)))
        print()
    records = ex.runtime_grid(ns, args.p, args.runs, args.seed)
    binned = ex.bin_timings(records)
    by_scheme: dict[str, list[float]] = {}
    for r in records:
        by_scheme.setdefault(r.scheme, []).append(r.ms)
    print(f"{'scheme':16} {'mean ms':>10} {'samples':>8}")
    for scheme, vals in by_scheme.items():
        print(f"{scheme:16} {sum(vals) / len(vals):10.4f} {len(vals):8}")
    if args.out_prefix:
        raw_path = f"{args.out_prefix}_timing.csv"
        bin_path = f"{args.out_prefix}_timing_binned.csv"
        with open(raw_path, "w", encoding="utf-8") as fh:
            fh.write(ex.timings_to_csv(records))
        with open(bin_path, "w", encoding="utf-8") as fh:
            fh.write(ex.binned_timings_to_csv(binned))
        print(f"wrote {raw_path} and {bin_path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args, parser)
    except (GraphError, FormatError, GenerationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
