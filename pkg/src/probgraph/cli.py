"""Command-line interface.

Verbs:
    probgraph bench run --config cfg.toml --out records.csv
    probgraph bench scaling --mode strong|weak --config cfg.toml --out ...
    probgraph bench plot --records records.csv --out plot.csv --kind scatter
    probgraph bounds eval --kind bf-mse|minhash-tail|tc ...
    probgraph sketch dump ... / probgraph sketch load ...

The default thread count comes from $PROBGRAPH_THREADS; the hash seed
from --hash-seed / config key ``hash_seed`` (default shown in --help).
Exits 0 on success, nonzero with a diagnostic on stderr otherwise.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bench import (RunConfig, emit_plot_data, run_benchmark, scaling_sweep)
from .estimators import (BoundQuery, EstimatorKind, bound_bf_mse,
                         bound_minhash_tail, bound_tc)
from .graphs import degree_stats, generate_kronecker, load_edge_list
from .hashing import DEFAULT_HASH_SEED
from .sketches import (SketchKind, build_sketched_graph, dump_sketches,
                       load_sketches)


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("PROBGRAPH_THREADS", "1")))
    except ValueError:
        return 1


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config)
    if args.threads is not None:
        cfg.threads = [args.threads]
    elif not cfg.threads:
        cfg.threads = [_default_threads()]
    return cfg


def _cmd_bench_run(args) -> int:
    cfg = _load_config(args)
    records = run_benchmark(cfg, args.out)
    done = sum(1 for r in records if not r.skip_reason)
    skipped = len(records) - done
    print(f"wrote {done} records ({skipped} skipped) to {args.out}")
    return 0


def _cmd_bench_scaling(args) -> int:
    cfg = _load_config(args)
    records = scaling_sweep(cfg, args.mode, args.out)
    print(f"wrote {len(records)} {args.mode}-scaling records to {args.out}")
    return 0


def _cmd_bench_plot(args) -> int:
    rows = emit_plot_data(args.records, args.out, args.kind)
    print(f"wrote {rows} plot rows to {args.out}")
    return 0


def _cmd_bounds_eval(args) -> int:
    if args.kind == "bf-mse":
        q = BoundQuery(bit_length=args.bits, hash_count=args.b,
                       intersection=args.intersection, t=args.t)
        res = bound_bf_mse(q)
        form = (f"e^(c*b/(B-1))*B/b^2 - B/b^2 - c/b with "
                f"B={args.bits} b={args.b} c={args.intersection}")
        if args.t is not None:
            form += f", Chebyshev t={args.t}"
    elif args.kind == "minhash-tail":
        value = bound_minhash_tail(args.k, args.size_x, args.size_y, args.t)
        print(f"min(1, 2*exp(-2*k*t^2/(|X|+|Y|)^2)) with k={args.k} "
              f"|X|={args.size_x} |Y|={args.size_y} t={args.t} = {value}")
        return 0
    else:
        est = {"tc-bf": EstimatorKind.BF_AND,
               "tc-khash": EstimatorKind.KHASH,
               "tc-onehash": EstimatorKind.ONEHASH}[args.kind]
        res = bound_tc(est, m=args.m, max_degree=args.max_degree,
                       sum_d2=args.sum_d2, sum_d3=args.sum_d3,
                       bit_length=args.bits, hash_count=args.b, k=args.k,
                       t=args.t or 0.0, variant=args.variant)
        form = (f"triangle-count bound for {est.value} at t={args.t} "
                f"(variant={args.variant})")
    if not res.in_regime:
        print(f"{form}: out of regime -- {res.detail}", file=sys.stderr)
        return 2
    print(f"{form} = {res.value}")
    return 0


def _graph_from_args(args):
    if args.graph:
        return load_edge_list(args.graph)
    scale, edge_factor, seed = (int(x) for x in args.kronecker.split(","))
    return generate_kronecker(scale, edge_factor, seed)


def _cmd_sketch_dump(args) -> int:
    graph = _graph_from_args(args)
    sg = build_sketched_graph(graph, SketchKind(args.kind), args.s, args.b,
                              args.hash_seed, source=args.source)
    dump_sketches(sg, args.out)
    print(f"dumped {sg.n} {sg.kind.value} sketches "
          f"({sg.extra_bytes_used()} bytes payload) to {args.out}")
    return 0


def _cmd_sketch_load(args) -> int:
    sg = load_sketches(args.infile)
    print(f"{sg.kind.value} sketches: n={sg.n} source={sg.source} "
          f"hash_count={sg.plan.hash_count} "
          f"{'bits=' + str(sg.bit_length) if sg.kind is SketchKind.BLOOM else 'k=' + str(sg.capacity)} "
          f"seed={sg.seed:#x} payload={sg.extra_bytes_used()} bytes")
    return 0


def _cmd_stats(args) -> int:
    graph = _graph_from_args(args)
    st = degree_stats(graph)
    print(f"n={graph.n} m={graph.m} max_degree={st.max_degree} "
          f"mean_degree={st.mean_degree:.3f} sum_d2={st.sum_d2} "
          f"sum_d3={st.sum_d3}")
    return 0


def _add_graph_source(p: argparse.ArgumentParser) -> None:
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--graph", help="edge-list or MatrixMarket file")
    grp.add_argument("--kronecker", metavar="SCALE,EDGE_FACTOR,SEED",
                     help="generate a synthetic power-law input")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="probgraph",
        description="approximate graph mining with neighborhood sketches")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="benchmark harness")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)
    run_p = bench_sub.add_parser("run", help="run a benchmark config")
    run_p.add_argument("--config", required=True,
                       help="TOML or JSON run configuration")
    run_p.add_argument("--out", required=True, help="records CSV to write")
    run_p.add_argument("--threads", type=int, default=None)
    run_p.set_defaults(fn=_cmd_bench_run)
    sc_p = bench_sub.add_parser("scaling", help="strong/weak scaling sweep")
    sc_p.add_argument("--mode", choices=("strong", "weak"), required=True)
    sc_p.add_argument("--config", required=True)
    sc_p.add_argument("--out", required=True)
    sc_p.add_argument("--threads", type=int, default=None)
    sc_p.set_defaults(fn=_cmd_bench_scaling)
    plot_p = bench_sub.add_parser("plot", help="aggregate records for plots")
    plot_p.add_argument("--records", required=True)
    plot_p.add_argument("--out", required=True)
    plot_p.add_argument("--kind", choices=("scatter", "bars"),
                        default="scatter")
    plot_p.set_defaults(fn=_cmd_bench_plot)

    bounds = sub.add_parser("bounds", help="closed-form accuracy bounds")
    bounds_sub = bounds.add_subparsers(dest="bounds_command", required=True)
    ev = bounds_sub.add_parser("eval", help="evaluate one bound")
    ev.add_argument("--kind", required=True,
                    choices=("bf-mse", "minhash-tail", "tc-bf", "tc-khash",
                             "tc-onehash"))
    ev.add_argument("--bits", type=int, default=0, help="Bloom width B")
    ev.add_argument("--b", type=int, default=1, help="Bloom hash count")
    ev.add_argument("--k", type=int, default=0, help="MinHash capacity")
    ev.add_argument("--intersection", type=int, default=0, help="|X n Y|")
    ev.add_argument("--size-x", type=int, default=0)
    ev.add_argument("--size-y", type=int, default=0)
    ev.add_argument("--m", type=int, default=0, help="edge count")
    ev.add_argument("--max-degree", type=int, default=0)
    ev.add_argument("--sum-d2", type=int, default=0)
    ev.add_argument("--sum-d3", type=int, default=0)
    ev.add_argument("--t", type=float, default=None,
                    help="deviation distance")
    ev.add_argument("--variant", choices=("sum_d2", "degree"),
                    default="sum_d2")
    ev.set_defaults(fn=_cmd_bounds_eval)

    sketch = sub.add_parser("sketch", help="binary sketch dump/restore")
    sketch_sub = sketch.add_subparsers(dest="sketch_command", required=True)
    dump_p = sketch_sub.add_parser("dump")
    _add_graph_source(dump_p)
    dump_p.add_argument("--kind", required=True,
                        choices=[k.value for k in SketchKind])
    dump_p.add_argument("-s", type=float, default=0.25,
                        help="storage budget fraction")
    dump_p.add_argument("-b", type=int, default=1, help="Bloom hash count")
    dump_p.add_argument("--hash-seed", type=lambda x: int(x, 0),
                        default=DEFAULT_HASH_SEED,
                        help=f"base seed (default {DEFAULT_HASH_SEED:#x})")
    dump_p.add_argument("--source", choices=("undirected", "directed"),
                        default="undirected")
    dump_p.add_argument("--out", required=True)
    dump_p.set_defaults(fn=_cmd_sketch_dump)
    load_p = sketch_sub.add_parser("load")
    load_p.add_argument("infile")
    load_p.set_defaults(fn=_cmd_sketch_load)

    stats = sub.add_parser("stats", help="degree statistics of an input")
    _add_graph_source(stats)
    stats.set_defaults(fn=_cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
