"""Benchmark harness: build sketches under a budget, run exact and
approximate algorithms, and stream accuracy/runtime/memory records to CSV.

Protocol per experiment cell (graph x problem x estimator x budget x
seed): the exact baseline is computed once per (graph, problem) and
reused; each cell performs warm-up runs (the first
max(1, ceil(warmup_fraction * repetitions)) runs are discarded) followed
by ``repetitions`` measured runs, each emitting one record; the cell mean
and a 1000-resample bootstrap percentile 95% confidence interval of the
wall time are attached to every record of the cell. Accuracy is
|approx - exact| / exact, recorded as the sentinel "undefined" when the
exact count is 0. Timing covers computation only, never I/O.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field, fields

import numpy as np

from .estimators import EstimatorKind
from .graphs import (CsrGraph, degree_order, degree_stats, generate_kronecker,
                     load_edge_list)
from .mining import (SimilarityMeasure, jarvis_patrick_cluster,
                     link_prediction_eval, make_link_prediction_split,
                     tc_estimate, triangle_count, four_clique_count)
from .providers import UnsupportedCombinationError, make_provider
from .sketches import BudgetError, SketchKind, build_sketched_graph
from .hashing import DEFAULT_HASH_SEED

__all__ = [
    "CSV_SCHEMA_LINE",
    "BenchRecord",
    "GraphSpec",
    "RunConfig",
    "run_benchmark",
    "scaling_sweep",
    "emit_plot_data",
    "write_records",
    "read_records",
    "bootstrap_ci",
]

CSV_SCHEMA_LINE = "# probgraph-bench v1"

_UNDEFINED = "undefined"

PROBLEMS = ("tc", "4clique", "cluster", "linkpred")

_SKETCH_FOR = {
    EstimatorKind.BF_AND: SketchKind.BLOOM,
    EstimatorKind.BF_L: SketchKind.BLOOM,
    EstimatorKind.BF_OR: SketchKind.BLOOM,
    EstimatorKind.KHASH: SketchKind.KHASH,
    EstimatorKind.ONEHASH: SketchKind.ONEHASH,
    EstimatorKind.KMV: SketchKind.KMV,
}


@dataclass
class BenchRecord:
    graph: str
    problem: str
    estimator: str
    mode: str = "fixed"
    s: float = 0.0
    b_or_k: int = 0
    seed: int = 0
    repetition: int = 0
    threads: int = 1
    exact_value: float = 0.0
    approx_value: float = 0.0
    accuracy: float | None = 0.0
    exact_time: float = 0.0
    approx_time: float = 0.0
    construction_time: float = 0.0
    mean_approx_time: float = 0.0
    ci_lo: float = 0.0
    ci_hi: float = 0.0
    extra_memory_bytes: int = 0
    extra_memory_fraction: float = 0.0
    skip_reason: str = ""


_FIELDS = [f.name for f in fields(BenchRecord)]


def _format_cell(value) -> str:
    if value is None:
        return _UNDEFINED
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_row(fh, rec: BenchRecord) -> None:
    csv.writer(fh).writerow([_format_cell(getattr(rec, f)) for f in _FIELDS])
    fh.flush()


def write_records(records, path, append: bool = False) -> None:
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8", newline="") as fh:
        if not append:
            fh.write(CSV_SCHEMA_LINE + "\n")
            fh.write(",".join(_FIELDS) + "\n")
        for rec in records:
            _write_row(fh, rec)


def read_records(path) -> list[BenchRecord]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_SCHEMA_LINE:
            raise ValueError(f"unrecognized records file (got {first!r})")
        reader = csv.DictReader(fh)
        for row in reader:
            kwargs = {}
            for f in fields(BenchRecord):
                raw = row[f.name]
                if f.name == "accuracy":
                    kwargs[f.name] = None if raw == _UNDEFINED else float(raw)
                elif f.type in ("float", "float | None"):
                    kwargs[f.name] = float(raw)
                elif f.type == "int":
                    kwargs[f.name] = int(raw)
                else:
                    kwargs[f.name] = raw
            out.append(BenchRecord(**kwargs))
    return out


def bootstrap_ci(samples, n_resamples: int = 1000, seed: int = 12345,
                 level: float = 0.95):
    """Nonparametric percentile bootstrap interval for the mean."""
    samples = np.asarray(samples, dtype=np.float64)
    if len(samples) == 0:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(samples), size=(n_resamples, len(samples)))
    means = samples[idx].mean(axis=1)
    alpha = (1.0 - level) / 2.0
    return (float(np.quantile(means, alpha)),
            float(np.quantile(means, 1.0 - alpha)))


@dataclass
class GraphSpec:
    """A benchmark input: an edge-list file or a Kronecker recipe."""

    name: str
    path: str | None = None
    scale: int = 0
    edge_factor: int = 0
    seed: int = 1

    def load(self) -> CsrGraph:
        if self.path:
            return load_edge_list(self.path)
        return generate_kronecker(self.scale, self.edge_factor, self.seed)

    @classmethod
    def from_dict(cls, d: dict) -> "GraphSpec":
        if "path" in d:
            return cls(name=d.get("name") or d["path"], path=d["path"])
        k = d["kronecker"]
        name = d.get("name") or (f"kron-s{k['scale']}-e{k['edge_factor']}"
                                 f"-r{k.get('seed', 1)}")
        return cls(name=name, scale=k["scale"],
                   edge_factor=k["edge_factor"], seed=k.get("seed", 1))


@dataclass
class RunConfig:
    inputs: list = field(default_factory=list)        # GraphSpec items
    problems: list = field(default_factory=lambda: ["tc"])
    estimators: list = field(default_factory=lambda: [EstimatorKind.BF_AND])
    budgets: list = field(default_factory=lambda: [0.25])
    bf_b: list = field(default_factory=lambda: [2])
    seeds: list = field(default_factory=lambda: [DEFAULT_HASH_SEED])
    threads: list = field(default_factory=list)  # empty: resolved by caller
    repetitions: int = 1
    warmup_fraction: float = 0.01
    tau: float = 0.0
    lp_fraction: float = 0.1
    lp_top: int = 10
    lp_measure: str = SimilarityMeasure.COMMON_NEIGHBORS.value
    lp_seed: int = 7
    sum_d2_cap: int = 50_000_000
    hash_seed: int = DEFAULT_HASH_SEED

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not 0 <= self.warmup_fraction <= 0.5:
            raise ValueError("warmup fraction must be in [0, 0.5]")
        self.estimators = [EstimatorKind(e) for e in self.estimators]
        for p in self.problems:
            if p not in PROBLEMS:
                raise ValueError(f"unknown problem {p!r}")

    @property
    def warmup_runs(self) -> int:
        return max(1, math.ceil(self.warmup_fraction * self.repetitions))

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        raw_inputs = d.pop("inputs", [])
        if "hash_seed" in d and "seeds" not in d:
            d["seeds"] = [d["hash_seed"]]
        cfg = cls(**d)
        cfg.inputs = [GraphSpec.from_dict(x) for x in raw_inputs]
        return cfg

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        text = open(path, "rb").read()
        if str(path).endswith(".json"):
            return cls.from_dict(json.loads(text))
        try:
            import tomllib  # python >= 3.11
        except ModuleNotFoundError:
            import tomli as tomllib
        return cls.from_dict(tomllib.loads(text.decode("utf-8")))


class _ProblemRunner:
    """Exact and approximate runners for one (graph, problem)."""

    def __init__(self, spec: GraphSpec, graph: CsrGraph, problem: str,
                 cfg: RunConfig):
        self.spec = spec
        self.graph = graph
        self.problem = problem
        self.cfg = cfg
        self.view = degree_order(graph)
        self.split = None
        if problem == "linkpred":
            self.split = make_link_prediction_split(graph, cfg.lp_fraction,
                                                    cfg.lp_seed)

    @property
    def sketch_source(self) -> str:
        return "directed" if self.problem == "4clique" else "undirected"

    @property
    def sketch_graph(self) -> CsrGraph:
        # link prediction scores pairs on the sparse graph
        return self.split.sparse_graph if self.problem == "linkpred" \
            else self.graph

    def run(self, kind: EstimatorKind, sketched, threads: int) -> float:
        if kind in (EstimatorKind.EXACT_MERGE, EstimatorKind.EXACT_GALLOP):
            provider = make_provider(
                kind, graph=self.sketch_graph,
                view=self.view if self.problem in ("tc", "4clique") else None)
        else:
            provider = make_provider(kind, sketched=sketched)
        if self.problem == "tc":
            if provider.is_exact:
                return float(triangle_count(self.view, provider, threads))
            return tc_estimate(self.graph, sketched, kind, threads)
        if self.problem == "4clique":
            return float(four_clique_count(self.view, provider, threads))
        if self.problem == "cluster":
            res = jarvis_patrick_cluster(self.sketch_graph, provider,
                                         self.cfg.tau, threads)
            return float(res.cluster_count)
        return float(link_prediction_eval(
            self.graph, self.split, SimilarityMeasure(self.cfg.lp_measure),
            provider, self.cfg.lp_top))


def _cells(cfg: RunConfig):
    """All (estimator, s, b) combinations of the configured grid."""
    for kind in cfg.estimators:
        if kind in (EstimatorKind.EXACT_MERGE, EstimatorKind.EXACT_GALLOP):
            yield kind, 0.0, 0
        elif _SKETCH_FOR[kind] is SketchKind.BLOOM:
            for s in cfg.budgets:
                for b in cfg.bf_b:
                    yield kind, s, b
        else:
            for s in cfg.budgets:
                yield kind, s, 1


def _run_cells(cfg: RunConfig, specs, mode: str, thread_counts,
               out_path=None) -> list[BenchRecord]:
    records: list[BenchRecord] = []
    sink = None
    if out_path is not None:
        write_records([], out_path)  # header
        sink = open(out_path, "a", encoding="utf-8", newline="")

    def emit(rec: BenchRecord):
        records.append(rec)
        if sink is not None:
            _write_row(sink, rec)

    try:
        for spec in specs:
            graph = spec.load()
            stats = degree_stats(graph)
            footprint_bits = (graph.n + 2 * graph.m) * 64
            for problem in cfg.problems:
                if problem == "4clique" and stats.sum_d2 > cfg.sum_d2_cap:
                    emit(BenchRecord(spec.name, problem, "-", mode,
                                     skip_reason=f"sum_d2={stats.sum_d2} "
                                     f"exceeds cap {cfg.sum_d2_cap}"))
                    continue
                runner = _ProblemRunner(spec, graph, problem, cfg)
                for threads in thread_counts:
                    exact_value, exact_time = _timed_protocol(
                        cfg, lambda: runner.run(EstimatorKind.EXACT_MERGE,
                                                None, threads))
                    for kind, s, b in _cells(cfg):
                        for seed in cfg.seeds:
                            _run_one_cell(cfg, runner, kind, s, b, seed,
                                          threads, mode, exact_value,
                                          exact_time, footprint_bits, emit)
    finally:
        if sink is not None:
            sink.close()
    return records


def _timed_protocol(cfg: RunConfig, fn):
    """Warm-up runs then one measured run; returns (value, seconds)."""
    for _ in range(cfg.warmup_runs):
        fn()
    t0 = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - t0


def _run_one_cell(cfg, runner, kind, s, b, seed, threads, mode,
                  exact_value, exact_time, footprint_bits, emit):
    spec, problem = runner.spec, runner.problem
    is_exact = kind in (EstimatorKind.EXACT_MERGE, EstimatorKind.EXACT_GALLOP)
    sketched = None
    construction_time = 0.0
    b_or_k = b if is_exact or _SKETCH_FOR.get(kind) is SketchKind.BLOOM else 0
    if not is_exact:
        try:
            t0 = time.perf_counter()
            sketched = build_sketched_graph(
                runner.sketch_graph, _SKETCH_FOR[kind], s, b, seed,
                source=runner.sketch_source,
                view=runner.view if runner.sketch_source == "directed"
                else None)
            construction_time = time.perf_counter() - t0
        except BudgetError as exc:
            emit(BenchRecord(spec.name, problem, kind.value, mode, s, b,
                             seed, 0, threads, skip_reason=str(exc)))
            return
        b_or_k = (b if sketched.kind is SketchKind.BLOOM
                  else sketched.capacity)
    extra_bytes = sketched.extra_bytes_used() if sketched else 0
    extra_fraction = (sketched.extra_bits_used() / footprint_bits
                      if sketched else 0.0)

    try:
        for _ in range(cfg.warmup_runs):
            runner.run(kind, sketched, threads)
        times = []
        values = []
        for _ in range(cfg.repetitions):
            t0 = time.perf_counter()
            value = runner.run(kind, sketched, threads)
            times.append(time.perf_counter() - t0)
            values.append(value)
    except UnsupportedCombinationError as exc:
        emit(BenchRecord(spec.name, problem, kind.value, mode, s, b_or_k,
                         seed, 0, threads, skip_reason=str(exc)))
        return
    mean_time = float(np.mean(times))
    ci_lo, ci_hi = bootstrap_ci(times)
    for rep, (value, t) in enumerate(zip(values, times)):
        accuracy = (abs(value - exact_value) / exact_value
                    if exact_value != 0 else None)
        emit(BenchRecord(spec.name, problem, kind.value, mode, s, b_or_k,
                         seed, rep, threads, exact_value, value, accuracy,
                         exact_time, t, construction_time, mean_time,
                         ci_lo, ci_hi, extra_bytes, extra_fraction))
    # one exact-baseline record per cell (cached measurement)
    accuracy = 0.0 if exact_value != 0 else None
    emit(BenchRecord(spec.name, problem, "exact_merge", mode, s, b_or_k,
                     seed, 0, threads, exact_value, exact_value, accuracy,
                     exact_time, exact_time, 0.0, exact_time, exact_time,
                     exact_time, 0, 0.0))


def run_benchmark(cfg: RunConfig, out_path=None) -> list[BenchRecord]:
    """Execute the full configuration cross-product; see module docs."""
    if not cfg.inputs:
        raise ValueError("config has no inputs")
    threads = [cfg.threads[0] if cfg.threads else 1]
    return _run_cells(cfg, cfg.inputs, "fixed", threads, out_path)


def scaling_sweep(cfg: RunConfig, mode: str,
                  out_path=None) -> list[BenchRecord]:
    """Strong scaling re-runs one graph across cfg.threads; weak scaling
    grows a Kronecker input so the edge count rises at twice the thread
    rate (doubling threads quadruples edges, i.e. scale += 2)."""
    if mode not in ("strong", "weak"):
        raise ValueError("mode must be 'strong' or 'weak'")
    if not cfg.inputs:
        raise ValueError("config has no inputs")
    thread_counts = cfg.threads or [1]
    base = cfg.inputs[0]
    if mode == "strong":
        return _run_cells(cfg, [base], "strong", thread_counts, out_path)
    if not base.scale:
        raise ValueError("weak scaling needs a kronecker input spec")
    records = []
    t0 = thread_counts[0]
    for t in thread_counts:
        ratio = t / t0
        extra = int(round(2 * math.log2(ratio))) if ratio > 0 else 0
        spec = GraphSpec(name=f"{base.name}-w{t}", scale=base.scale + extra,
                         edge_factor=base.edge_factor, seed=base.seed)
        records.extend(_run_cells(cfg, [spec], "weak", [t], None))
    if out_path is not None:
        write_records(records, out_path)
    return records


def emit_plot_data(records_path, out_path, kind: str = "scatter") -> int:
    """Aggregate records to plot-ready rows; returns the row count.

    ``scatter`` groups by (graph, problem, estimator), ``bars`` by
    (problem, estimator) across graphs. Speedup is mean exact time over
    mean approximate time.
    """
    if kind not in ("scatter", "bars"):
        raise ValueError("kind must be 'scatter' or 'bars'")
    records = [r for r in read_records(records_path) if not r.skip_reason
               and r.estimator != "-"]
    groups: dict[tuple, list[BenchRecord]] = {}
    for r in records:
        key = (r.graph, r.problem, r.estimator) if kind == "scatter" \
            else (r.problem, r.estimator)
        groups.setdefault(key, []).append(r)
    header = (["graph", "problem", "estimator"] if kind == "scatter"
              else ["problem", "estimator"])
    header += ["speedup", "accuracy", "memory_fraction"]
    rows = []
    for key in sorted(groups):
        recs = groups[key]
        exact_t = float(np.mean([r.exact_time for r in recs]))
        approx_t = float(np.mean([r.approx_time for r in recs]))
        speedup = exact_t / approx_t if approx_t > 0 else 0.0
        defined = [r.accuracy for r in recs if r.accuracy is not None]
        accuracy = float(np.mean(defined)) if defined else None
        mem = float(np.mean([r.extra_memory_fraction for r in recs]))
        rows.append(list(key) + [repr(speedup),
                                 _UNDEFINED if accuracy is None
                                 else repr(accuracy), repr(mem)])
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(x) for x in row) + "\n")
    return len(rows)
