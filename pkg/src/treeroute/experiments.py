"""Experiment orchestration: repeated routing runs over graph families,
failure models, and rates, with CSV reporting.

Protocol per run: provision a graph (fresh draw for random families, the
fixed ingested graph otherwise), draw s != d uniformly, build structures and
rules for every configured scheme on that same flow, then for each rate draw
ONE failure scenario shared by all schemes and simulate each of them.  The
EDP baseline is always simulated (even when not reported) because hop
aggregation conditions on its outcome.

All randomness derives from base_seed through structured keys, so results are
reproducible run by run and independent of worker scheduling.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from . import failures as fl
from .graph import (Graph, gen_erdos_renyi, gen_erdos_renyi_lcc,
                    gen_random_regular, edge_connectivity, load_graphml_file)
from .rng import derive, spawn
from .routing import compile_rules, simulate
from .structures import (MODE_EDP, MODES, build_structures, structure_stats)

_TAG_GRAPH = 21
_TAG_PAIR = 22
_TAG_FAIL = 23

CONNECT_RESAMPLE = "resample"
CONNECT_LCC = "lcc"

AGGREGATE_HEADER = "scheme,rate,resilience,avg_hops_edp_success,mean_precompute_ms,runs"
RECORDS_HEADER = ("run,scheme,rate,delivered,hops,edp_delivered,edp_hops,"
                  "precompute_ms,nodes,edges,units,structure_edges,trees")
TIMING_HEADER = "scheme,n,run,links,trees,ms"
TIMING_BINNED_HEADER = "scheme,links_lo,links_hi,mean_ms,samples"


@dataclass
class GraphFamily:
    kind: str                      # "er" | "regular" | "graphml"
    n: int = 0
    p: float = 0.0
    delta: int = 0
    path: str | None = None
    connect: str = CONNECT_RESAMPLE
    graph: Graph | None = None     # loaded lazily for graphml

    def describe(self) -> str:
        if self.kind == "er":
            tail = " (largest component)" if self.connect == CONNECT_LCC else ""
            return f"G({self.n}, {self.p}){tail}"
        if self.kind == "regular":
            return f"{self.delta}-regular, n={self.n}"
        return f"graphml {self.path}"


@dataclass
class ExperimentConfig:
    family: GraphFamily
    schemes: list[str]
    failure_model: str
    rates: list[float]
    runs: int
    base_seed: int
    pf_delta: float = 0.3
    decay: str = fl.DECAY_MULTIPLICATIVE
    jobs: int = 1


@dataclass
class RunRecord:
    run: int
    scheme: str
    rate: float
    delivered: bool
    hops: int | None
    edp_delivered: bool
    edp_hops: int | None
    precompute_ms: float
    nodes: int
    edges: int
    units: int
    structure_edges: int
    trees: int


@dataclass
class MetricsTable:
    rows: list[dict]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(AGGREGATE_HEADER.split(","))
        for r in self.rows:
            w.writerow([
                r["scheme"], _fmt(r["rate"]), _fmt(r["resilience"]),
                "" if r["avg_hops_edp_success"] is None
                else _fmt(r["avg_hops_edp_success"]),
                _fmt(r["mean_precompute_ms"]), r["runs"]])
        return buf.getvalue()

    def summary_text(self) -> str:
        cols = AGGREGATE_HEADER.split(",")
        table = [cols]
        for r in self.rows:
            table.append([
                r["scheme"], _fmt(r["rate"]), f"{r['resilience']:.4f}",
                "-" if r["avg_hops_edp_success"] is None
                else f"{r['avg_hops_edp_success']:.3f}",
                f"{r['mean_precompute_ms']:.3f}", str(r["runs"])])
        widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
        return "\n".join(
            "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row))
            for row in table)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[RunRecord]
    metrics: MetricsTable
    generation_retries: int = 0
    loop_diagnostics: list[tuple[int, str, float]] = field(default_factory=list)


def _fmt(x: float) -> str:
    return repr(float(x))


def validate_config(cfg: ExperimentConfig) -> list[str]:
    errors = []
    fam = cfg.family
    if fam.kind not in ("er", "regular", "graphml"):
        errors.append(f"unknown graph family kind {fam.kind!r}")
    elif fam.kind == "er":
        if fam.n < 2:
            errors.append(f"er family needs n >= 2, got {fam.n}")
        if not 0 <= fam.p <= 1:
            errors.append(f"er family needs p in [0, 1], got {fam.p}")
        if fam.connect not in (CONNECT_RESAMPLE, CONNECT_LCC):
            errors.append(f"unknown connect policy {fam.connect!r}")
    elif fam.kind == "regular":
        if fam.n < 2:
            errors.append(f"regular family needs n >= 2, got {fam.n}")
        if fam.delta < 1 or fam.delta >= max(fam.n, 1):
            errors.append(f"regular family needs 1 <= delta < n, "
                          f"got delta={fam.delta}")
        elif (fam.n * fam.delta) % 2 != 0:
            errors.append("regular family needs n * delta even")
    elif fam.kind == "graphml" and fam.graph is None and fam.path is None:
        errors.append("graphml family needs a path")
    if not cfg.schemes:
        errors.append("no schemes configured")
    for s in cfg.schemes:
        if s not in MODES:
            errors.append(f"unknown scheme {s!r} (expected one of {MODES})")
    if len(set(cfg.schemes)) != len(cfg.schemes):
        errors.append("duplicate schemes configured")
    if cfg.failure_model not in fl.MODELS:
        errors.append(f"unknown failure model {cfg.failure_model!r}")
    if not cfg.rates:
        errors.append("rate grid is empty")
    for r in cfg.rates:
        if not 0 <= r <= 1:
            errors.append(f"failure rate {r} outside [0, 1]")
    if cfg.runs < 1:
        errors.append(f"runs must be >= 1, got {cfg.runs}")
    if not 0 <= cfg.pf_delta <= 1:
        errors.append(f"pf_delta must be in [0, 1], got {cfg.pf_delta}")
    if cfg.decay not in (fl.DECAY_MULTIPLICATIVE, fl.DECAY_SUBTRACTIVE):
        errors.append(f"unknown decay {cfg.decay!r}")
    if cfg.jobs < 1:
        errors.append(f"jobs must be >= 1, got {cfg.jobs}")
    return errors


def _provision(cfg: ExperimentConfig, run: int) -> tuple[Graph, int]:
    fam = cfg.family
    stats: dict = {}
    if fam.kind == "er":
        seed = derive(cfg.base_seed, _TAG_GRAPH, run)
        if fam.connect == CONNECT_LCC:
            g = gen_erdos_renyi_lcc(fam.n, fam.p, seed, stats=stats)
        else:
            g = gen_erdos_renyi(fam.n, fam.p, seed, stats=stats)
    elif fam.kind == "regular":
        g = gen_random_regular(fam.n, fam.delta,
                               derive(cfg.base_seed, _TAG_GRAPH, run),
                               stats=stats)
    else:
        if fam.graph is None:
            fam.graph = load_graphml_file(fam.path)
        g = fam.graph
    return g, stats.get("attempts", 1) - 1


def time_precompute(g: Graph, s: int, d: int, scheme: str):
    """(structures, wall-clock milliseconds) for one structure build,
    single-threaded."""
    t0 = time.perf_counter_ns()
    rs = build_structures(g, s, d, scheme)
    ms = (time.perf_counter_ns() - t0) / 1e6
    return rs, ms


def _run_one(cfg: ExperimentConfig, run: int):
    g, retries = _provision(cfg, run)
    rng = spawn(cfg.base_seed, _TAG_PAIR, run)
    s = int(rng.integers(g.n))
    d = int(rng.integers(g.n - 1))
    if d >= s:
        d += 1

    built = {}
    for scheme in cfg.schemes:
        rs, ms = time_precompute(g, s, d, scheme)
        built[scheme] = (compile_rules(rs), ms, structure_stats(rs))
    if MODE_EDP in built:
        edp_table = built[MODE_EDP][0]
    else:
        edp_table = compile_rules(build_structures(g, s, d, MODE_EDP))

    k = edge_connectivity(g) if cfg.failure_model == fl.MODEL_RANDOM else 0
    records = []
    loops = []
    for ri, rate in enumerate(cfg.rates):
        seed = derive(cfg.base_seed, _TAG_FAIL, run, ri)
        if cfg.failure_model == fl.MODEL_RANDOM:
            scenario = fl.random_failures(g, rate, k, seed)
        else:
            scenario = fl.clustered_failures(g, d, rate, seed,
                                             pf_delta=cfg.pf_delta,
                                             decay=cfg.decay)
        edp_trace = simulate(g, edp_table, scenario)
        if edp_trace.reason == "loop":
            loops.append((run, MODE_EDP, rate))
        for scheme in cfg.schemes:
            table, ms, (units, sedges, trees) = built[scheme]
            trace = edp_trace if scheme == MODE_EDP \
                else simulate(g, table, scenario)
            if trace.reason == "loop":
                loops.append((run, scheme, rate))
            records.append(RunRecord(
                run=run, scheme=scheme, rate=rate,
                delivered=trace.delivered,
                hops=trace.hop_count if trace.delivered else None,
                edp_delivered=edp_trace.delivered,
                edp_hops=edp_trace.hop_count if edp_trace.delivered else None,
                precompute_ms=ms, nodes=g.n, edges=g.m,
                units=units, structure_edges=sedges, trees=trees))
    return records, retries, loops


def _run_one_star(args):
    return _run_one(*args)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    errors = validate_config(cfg)
    if errors:
        raise ValueError("invalid experiment config: " + "; ".join(errors))
    if cfg.family.kind == "graphml" and cfg.family.graph is None:
        cfg = replace(cfg, family=replace(
            cfg.family, graph=load_graphml_file(cfg.family.path)))

    per_run = []
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            per_run = list(pool.map(_run_one_star,
                                    [(cfg, r) for r in range(cfg.runs)],
                                    chunksize=max(1, cfg.runs // (8 * cfg.jobs))))
    else:
        per_run = [_run_one(cfg, r) for r in range(cfg.runs)]

    records = []
    retries = 0
    loops = []
    for recs, rt, lp in per_run:        # reduce ordered by run index
        records.extend(recs)
        retries += rt
        loops.extend(lp)
    metrics = aggregate_records(records, cfg.schemes, cfg.rates)
    return ExperimentResult(cfg, records, metrics, retries, loops)


def aggregate_records(records: list[RunRecord], schemes: list[str],
                      rates: list[float]) -> MetricsTable:
    rows = []
    for scheme in schemes:
        for rate in rates:
            group = [r for r in records
                     if r.scheme == scheme and r.rate == rate]
            if not group:
                continue
            delivered = sum(1 for r in group if r.delivered)
            cond = [r.hops for r in group
                    if r.edp_delivered and r.hops is not None]
            rows.append({
                "scheme": scheme,
                "rate": rate,
                "resilience": delivered / len(group),
                "avg_hops_edp_success":
                    sum(cond) / len(cond) if cond else None,
                "mean_precompute_ms":
                    sum(r.precompute_ms for r in group) / len(group),
                "runs": len(group),
            })
    return MetricsTable(rows)


def config_to_json(cfg: ExperimentConfig) -> dict:
    fam = cfg.family
    family: dict = {"kind": fam.kind}
    if fam.kind == "er":
        family.update(n=fam.n, p=fam.p, connect=fam.connect)
    elif fam.kind == "regular":
        family.update(n=fam.n, delta=fam.delta)
    else:
        family.update(path=fam.path)
    return {"family": family, "schemes": list(cfg.schemes),
            "failure_model": cfg.failure_model, "rates": list(cfg.rates),
            "runs": cfg.runs, "base_seed": cfg.base_seed,
            "pf_delta": cfg.pf_delta, "decay": cfg.decay, "jobs": cfg.jobs}


def config_from_json(doc: dict) -> ExperimentConfig:
    fam = doc.get("family", {})
    family = GraphFamily(kind=fam.get("kind", ""), n=int(fam.get("n", 0)),
                         p=float(fam.get("p", 0.0)),
                         delta=int(fam.get("delta", 0)),
                         path=fam.get("path"),
                         connect=fam.get("connect", CONNECT_RESAMPLE))
    return ExperimentConfig(
        family=family,
        schemes=list(doc.get("schemes", list(MODES))),
        failure_model=doc.get("failure_model", fl.MODEL_CLUSTERED),
        rates=[float(r) for r in doc.get("rates", [])],
        runs=int(doc.get("runs", 0)),
        base_seed=int(doc.get("base_seed", 0)),
        pf_delta=float(doc.get("pf_delta", 0.3)),
        decay=doc.get("decay", fl.DECAY_MULTIPLICATIVE),
        jobs=int(doc.get("jobs", 1)))


# -- CSV plumbing -----------------------------------------------------------


def records_to_csv(records: list[RunRecord], schemes: list[str],
                   rates: list[float]) -> str:
    """Raw per-run records, rows ordered by (scheme, rate, run)."""
    sidx = {s: i for i, s in enumerate(schemes)}
    ridx = {r: i for i, r in enumerate(rates)}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORDS_HEADER.split(","))
    for r in sorted(records, key=lambda r: (sidx[r.scheme], ridx[r.rate], r.run)):
        w.writerow([
            r.run, r.scheme, _fmt(r.rate),
            "true" if r.delivered else "false",
            "" if r.hops is None else r.hops,
            "true" if r.edp_delivered else "false",
            "" if r.edp_hops is None else r.edp_hops,
            _fmt(r.precompute_ms), r.nodes, r.edges, r.units,
            r.structure_edges, r.trees])
    return buf.getvalue()


def records_from_csv(text: str) -> list[RunRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != RECORDS_HEADER.split(","):
        raise ValueError("unexpected records CSV header")
    out = []
    for row in rows[1:]:
        (run, scheme, rate, delivered, hops, edp_delivered, edp_hops,
         ms, nodes, edges, units, sedges, trees) = row
        out.append(RunRecord(
            run=int(run), scheme=scheme, rate=float(rate),
            delivered=delivered == "true",
            hops=None if hops == "" else int(hops),
            edp_delivered=edp_delivered == "true",
            edp_hops=None if edp_hops == "" else int(edp_hops),
            precompute_ms=float(ms), nodes=int(nodes), edges=int(edges),
            units=int(units), structure_edges=int(sedges), trees=int(trees)))
    return out


def emit_csv(result: ExperimentResult, aggregate_path,
             records_path=None) -> None:
    _write(aggregate_path, result.metrics.to_csv())
    if records_path is not None:
        _write(records_path, records_to_csv(
            result.records, result.config.schemes, result.config.rates))


def _write(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise RuntimeError(f"cannot write {path}: {exc}") from exc


# -- runtime grid (precompute benchmark) ------------------------------------


@dataclass
class TimingRecord:
    scheme: str
    n: int
    run: int
    links: int
    trees: int
    ms: float


def runtime_grid(ns: list[int], p: float, runs: int, base_seed: int,
                 schemes: list[str] = list(MODES)) -> list[TimingRecord]:
    """Precompute-time measurements over fresh ER draws, one flow per run."""
    out = []
    for n in ns:
        for run in range(runs):
            g = gen_erdos_renyi(n, p, derive(base_seed, _TAG_GRAPH, n, run))
            rng = spawn(base_seed, _TAG_PAIR, n, run)
            s = int(rng.integers(g.n))
            d = int(rng.integers(g.n - 1))
            if d >= s:
                d += 1
            for scheme in schemes:
                rs, ms = time_precompute(g, s, d, scheme)
                out.append(TimingRecord(scheme, n, run, g.m,
                                        structure_stats(rs)[2], ms))
    return out


def timings_to_csv(records: list[TimingRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TIMING_HEADER.split(","))
    for r in records:
        w.writerow([r.scheme, r.n, r.run, r.links, r.trees, _fmt(r.ms)])
    return buf.getvalue()


def bin_timings(records: list[TimingRecord], width: int = 5,
                schemes: list[str] = list(MODES)) -> list[dict]:
    """Mean runtime per (scheme, link-count bin); bins span `width` links."""
    groups: dict[tuple[str, int], list[float]] = {}
    for r in records:
        lo = (r.links // width) * width
        groups.setdefault((r.scheme, lo), []).append(r.ms)
    sidx = {s: i for i, s in enumerate(schemes)}
    rows = []
    for (scheme, lo), vals in sorted(
            groups.items(), key=lambda kv: (sidx.get(kv[0][0], 99), kv[0][1])):
        rows.append({"scheme": scheme, "links_lo": lo,
                     "links_hi": lo + width - 1,
                     "mean_ms": sum(vals) / len(vals),
                     "samples": len(vals)})
    return rows


def binned_timings_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TIMING_BINNED_HEADER.split(","))
    for r in rows:
        w.writerow([r["scheme"], r["links_lo"], r["links_hi"],
                    _fmt(r["mean_ms"]), r["samples"]])
    return buf.getvalue()
