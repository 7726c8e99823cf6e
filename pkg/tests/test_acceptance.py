"""Release gate: ten numbered end-to-end checks at full scale.

Each gate is one test carrying its number in the name, so ``pytest -v``
prints exactly one PASS/FAIL line per gate. Heavy inputs are produced once
in session fixtures and shared between gates:

* a 360-instance corpus over five graph families with 30 failure draws each
  (10,800 scenarios) drives the behavioural gates 1, 2, 4 and 6,
* 1,000 structure builds drive gate 3,
* >= 100,000 toggled-failure probes drive the locality gate 5,
* 1,000-run failure sweeps over three random-graph families and two
  real-world topologies drive the statistical gates 7 and 8, 200-run sweeps
  over degree-8 regular graphs drive gate 9, and a pure-vs-compiled timing
  grid drives gate 10.

The statistical gates combine magnitude bands with one-sided 95% confidence
readings, so they are stable under reseeding at these run counts. The sweep
fixtures also write the aggregate and timing CSVs under results/ that the
plotting package renders.
"""

import csv
import io
import os
import subprocess
import sys
from dataclasses import dataclass

import numpy as np
import pytest

import treeroute as tr
from treeroute.experiments import (ExperimentConfig, GraphFamily,
                                   TimingRecord, bin_timings,
                                   binned_timings_to_csv, emit_csv,
                                   run_experiment, runtime_grid,
                                   timings_to_csv)
from treeroute.rng import derive
from treeroute.structures import PathUnit, Tree

from conftest import (abilene_path, adjacency, brute_sd_cut, nsfnet_path,
                      path_edges, scenario_corpus, spearman)

MODES = list(tr.MODES)
TREE_MODES = ["one-tree", "multiple-trees"]
CORPUS_SEED = 808
SWEEP_SEED = 20260815
R9 = [round(0.1 * i, 1) for i in range(1, 10)]
R10 = [round(0.1 * i, 1) for i in range(10)]
Z95 = 1.645  # one-sided 95%

ER_FAMILIES = [(25, 0.4, "resample"), (50, 0.1, "resample"), (100, 0.02, "lcc")]


def _report(num, name, problems, detail):
    status = "FAIL" if problems else "PASS"
    line = f"criterion {num:02d} {name}: {status} ({detail})"
    print(line)
    assert not problems, line + " :: " + "; ".join(str(p) for p in problems[:5])


def _mean_se(values):
    a = np.asarray(values, dtype=float)
    if len(a) < 2:
        return float(a.mean()) if len(a) else 0.0, 0.0
    return float(a.mean()), float(a.std(ddof=1) / np.sqrt(len(a)))


def _gain_by_rate(records, scheme):
    """Per-rate paired delivery differences (scheme minus baseline), as
    (mean, se) in delivery-probability units."""
    by_rate = {}
    for r in records:
        if r.scheme == scheme:
            by_rate.setdefault(r.rate, []).append(int(r.delivered) - int(r.edp_delivered))
    return {rate: _mean_se(diffs) for rate, diffs in sorted(by_rate.items())}


def _hop_overhead(records):
    """Paired extra hops of multiple-trees over the baseline on runs where
    both delivered and at least one failure was drawn."""
    return [r.hops - r.edp_hops for r in records
            if r.scheme == "multiple-trees" and r.rate > 0
            and r.edp_delivered and r.delivered]


@dataclass
class Instance:
    g: tr.Graph
    s: int
    d: int
    k: int
    tables: dict


def _tables(g, s, d):
    return {m: tr.compile_rules(tr.build_structures(g, s, d, m)) for m in MODES}


def _pick_pair(rng, n):
    s = int(rng.integers(n))
    d = int(rng.integers(n - 1))
    if d >= s:
        d += 1
    return s, d


@pytest.fixture(scope="session")
def results_dir():
    path = os.path.join(os.path.dirname(__file__), "..", "results")
    os.makedirs(path, exist_ok=True)
    return os.path.abspath(path)


@pytest.fixture(scope="session")
def corpus():
    """360 (graph, s, d) instances with compiled tables for every scheme."""
    rng = np.random.default_rng(CORPUS_SEED)
    insts = []

    def add(g):
        s, d = _pick_pair(rng, g.n)
        insts.append(Instance(g, s, d, tr.edge_connectivity(g), _tables(g, s, d)))

    made = 0
    while made < 100:  # mid-density ER
        n = int(rng.integers(16, 41))
        p = float(rng.uniform(0.15, 0.45))
        try:
            g = tr.gen_erdos_renyi(n, p, int(rng.integers(1 << 30)), max_attempts=60)
        except tr.GenerationError:
            continue
        add(g)
        made += 1
    for _ in range(60):  # sparse ER, largest component
        g = tr.gen_erdos_renyi_lcc(100, 0.02, int(rng.integers(1 << 30)))
        add(g)
    made = 0
    while made < 60:  # regular
        n = int(rng.integers(16, 49))
        delta = int(rng.choice([4, 6, 8]))
        if (n * delta) % 2:
            n += 1
        try:
            g = tr.gen_random_regular(n, delta, int(rng.integers(1 << 30)), max_attempts=60)
        except tr.GenerationError:
            continue
        add(g)
        made += 1
    made = 0
    while made < 80:  # small dense, brute-force friendly
        n = int(rng.integers(6, 13))
        try:
            g = tr.gen_erdos_renyi(n, 0.55, int(rng.integers(1 << 30)), max_attempts=60)
        except tr.GenerationError:
            continue
        add(g)
        made += 1
    for path in (abilene_path(), nsfnet_path()):
        g = tr.load_graphml_file(path)
        pairs = [(s, d) for s in range(g.n) for d in range(g.n) if s != d]
        for i in rng.choice(len(pairs), size=30, replace=False):
            s, d = pairs[int(i)]
            insts.append(Instance(g, s, d, tr.edge_connectivity(g), _tables(g, s, d)))
    return insts


@pytest.fixture(scope="session")
def corpus_sims(corpus):
    """30 failure draws per instance, simulated under every scheme."""
    sims = []
    for idx, inst in enumerate(corpus):
        for j in range(30):
            rate = R9[j % 9]
            seed = derive(CORPUS_SEED, 11, idx, j)
            if j % 2:
                fs = tr.random_failures(inst.g, rate, inst.k, seed)
            else:
                decay = "multiplicative" if (j // 2) % 2 else "subtractive"
                fs = tr.clustered_failures(inst.g, inst.d, rate, seed, decay=decay)
            traces = {m: tr.simulate(inst.g, inst.tables[m], fs.failed) for m in MODES}
            sims.append((idx, fs, traces))
    return sims


@pytest.fixture(scope="session")
def clustered_sweeps(results_dir):
    """1000-run clustered sweeps: three ER families under both decays."""
    out = {}
    for n, p, connect in ER_FAMILIES:
        for decay in ("multiplicative", "subtractive"):
            cfg = ExperimentConfig(GraphFamily("er", n=n, p=p, connect=connect),
                                   MODES, "clustered", R9, 1000, SWEEP_SEED,
                                   decay=decay)
            res = run_experiment(cfg)
            tag = f"er_n{n}_p{p:g}_clustered_{decay[:3]}"
            emit_csv(res, os.path.join(results_dir, tag + ".csv"))
            out[(n, p, decay)] = res
    return out


@pytest.fixture(scope="session")
def random_sweeps(results_dir):
    """1000-run uniform-random sweeps over the same ER families."""
    out = {}
    for n, p, connect in ER_FAMILIES:
        cfg = ExperimentConfig(GraphFamily("er", n=n, p=p, connect=connect),
                               MODES, "random", R10, 1000, 313)
        res = run_experiment(cfg)
        emit_csv(res, os.path.join(results_dir, f"er_n{n}_p{p:g}_random.csv"))
        out[(n, p)] = res
    return out


@pytest.fixture(scope="session")
def zoo_sweeps(results_dir):
    """1000-run sweeps on the fixed real-world topologies, both models."""
    out = {}
    for name, path in (("abilene", abilene_path()), ("nsfnet", nsfnet_path())):
        for model in ("random", "clustered"):
            cfg = ExperimentConfig(GraphFamily("graphml", path=path),
                                   MODES, model, R10, 1000, 313)
            res = run_experiment(cfg)
            emit_csv(res, os.path.join(results_dir, f"zoo_{name}_{model}.csv"))
            out[(name, model)] = res
    return out


@pytest.fixture(scope="session")
def regular_sweeps(results_dir):
    """200-run clustered sweeps on degree-8 regular graphs."""
    out = {}
    for n in (25, 50, 100):
        cfg = ExperimentConfig(GraphFamily("regular", n=n, delta=8),
                               MODES, "clustered", R9, 200, 555)
        res = run_experiment(cfg)
        emit_csv(res, os.path.join(results_dir, f"regular_n{n}_clustered.csv"))
        out[n] = res
    return out


def test_criterion_01_tree_schemes_dominate_baseline(corpus, corpus_sims):
    problems = []
    for idx, fs, traces in corpus_sims:
        if not traces["edp"].delivered:
            continue
        for mode in TREE_MODES:
            if not traces[mode].delivered:
                problems.append((idx, fs.model, fs.rate, fs.seed, mode))
    detail = f"{len(corpus_sims)} scenarios, {len(problems)} dominance violations"
    if len(corpus_sims) < 10000:
        problems.append(f"only {len(corpus_sims)} scenarios")
    _report(1, "tree schemes deliver whenever the path baseline does", problems, detail)


def test_criterion_02_one_tree_preserves_baseline_hops(corpus_sims):
    checked = 0
    problems = []
    for idx, fs, traces in corpus_sims:
        if not traces["edp"].delivered:
            continue
        checked += 1
        eh = len(traces["edp"].hops)
        oh = len(traces["one-tree"].hops)
        if oh != eh:
            problems.append((idx, fs.model, fs.rate, eh, oh))
    _report(2, "one-tree hop counts equal the baseline on shared successes",
            problems, f"{checked} delivered scenarios, {len(problems)} mismatches")


def test_criterion_03_structure_invariants(corpus):
    extra = scenario_corpus(640, derive(CORPUS_SEED, 3))
    triples = [(i.g, i.s, i.d) for i in corpus] + [(g, s, d) for g, s, d, _ in extra]
    problems = []
    builds = 0
    brute_checked = 0

    for g, s, d in triples:
        adj = adjacency(g)
        gedges = {frozenset(e) for e in g.edges()}
        rs_ot = tr.build_structures(g, s, d, "one-tree")
        rs_mt = tr.build_structures(g, s, d, "multiple-trees")
        builds += 1
        paths = rs_ot.edps.paths

        seen = set()
        for p in paths:
            if p[0] != s or p[-1] != d or len(set(p)) != len(p):
                problems.append(("path shape", g.n, s, d, p))
            for e in path_edges(p):
                if e not in gedges:
                    problems.append(("path edge missing", g.n, s, d, e))
                if e in seen:
                    problems.append(("paths share edge", g.n, s, d, e))
                seen.add(e)
        if g.n <= 12:
            brute_checked += 1
            if len(paths) != brute_sd_cut(g.n, g.edges(), s, d):
                problems.append(("path count vs min cut", g.n, s, d, len(paths)))

        for rs in (rs_ot, rs_mt):
            for unit in rs.units:
                if not isinstance(unit, Tree):
                    continue
                t = unit
                if d in t.nodes:
                    problems.append(("destination inside tree", g.n, s, d))
                children = {v: [] for v in t.nodes}
                for v, pv in t.parent.items():
                    children[pv].append(v)
                    if frozenset((v, pv)) not in gedges:
                        problems.append(("tree edge missing", g.n, s, d, (v, pv)))
                for v in t.nodes:
                    if not children[v] and d not in adj[v]:
                        problems.append(("leaf not next to destination", g.n, s, d, v))
                spine = t.origin[:-1]
                if t.priority_path and t.priority_path != spine:
                    problems.append(("spine mismatch", g.n, s, d))
                for a, b in zip(spine, spine[1:]):
                    if b not in t.parent or t.parent[b] != a:
                        problems.append(("spine not contained", g.n, s, d, (a, b)))

        tree_edges = set()
        for t in rs_mt.units:
            for v, pv in t.parent.items():
                e = frozenset((v, pv))
                if e in tree_edges:
                    problems.append(("trees share edge", g.n, s, d, tuple(e)))
                tree_edges.add(e)

    detail = (f"{builds} builds, {brute_checked} brute-force cut checks, "
              f"{len(problems)} violations")
    if builds < 1000:
        problems.append(f"only {builds} builds")
    if brute_checked < 150:
        problems.append(f"only {brute_checked} brute checks")
    _report(3, "structure invariants hold across builds", problems, detail)


def test_criterion_04_termination_bound(corpus, corpus_sims, clustered_sweeps,
                                        random_sweeps, zoo_sweeps, regular_sweeps):
    problems = []
    for idx, fs, traces in corpus_sims:
        limit = 4 * corpus[idx].g.m
        for mode, trace in traces.items():
            if trace.reason == "loop":
                problems.append(("loop", idx, mode, fs.model, fs.rate))
            if len(trace.hops) > limit:
                problems.append(("over budget", idx, mode, len(trace.hops), limit))
    sweeps = (list(clustered_sweeps.values()) + list(random_sweeps.values())
              + list(zoo_sweeps.values()) + list(regular_sweeps.values()))
    sweep_runs = sum(len(res.records) for res in sweeps)
    for res in sweeps:
        if res.loop_diagnostics:
            problems.append(("sweep loops", res.config.family.describe(),
                             len(res.loop_diagnostics)))
    detail = (f"{len(corpus_sims)} corpus scenarios within 4m hops, "
              f"{sweep_runs} sweep records loop-free, {len(problems)} violations")
    _report(4, "every walk ends within four hops per link", problems, detail)


def test_criterion_05_decision_locality(corpus):
    rng = np.random.default_rng(derive(CORPUS_SEED, 5))
    tables = []
    for i in rng.choice(len(corpus), size=40, replace=False):
        inst = corpus[int(i)]
        tables.extend((inst, inst.tables[m]) for m in MODES)

    target = 102_000
    checked = 0
    mismatches = 0
    ti = 0
    while checked < target:
        inst, t = tables[ti % len(tables)]
        ti += 1
        edges = inst.g.edges()
        m = len(edges)
        if rng.random() < 0.2:
            ctx = tr.PortContext(t.source, None, int(rng.integers(t.nunits)))
        else:
            u, v = edges[int(rng.integers(m))]
            if rng.random() < 0.5:
                u, v = v, u
            ctx = tr.PortContext(v, (u, v), int(rng.integers(t.nunits)))
        size = int(rng.integers(0, max(2, m // 3)))
        base = {edges[int(i)] for i in rng.choice(m, size=size, replace=False)}
        toggle = None
        for _ in range(20):
            e = edges[int(rng.integers(m))]
            if ctx.node not in e:
                toggle = e
                break
        if toggle is None:
            continue
        if tr.lookup(t, ctx, base) != tr.lookup(t, ctx, base ^ {toggle}):
            mismatches += 1
        checked += 1
    problems = [f"{mismatches} non-local decisions"] if mismatches else []
    if checked < 100_000:
        problems.append(f"only {checked} probes")
    _report(5, "decisions ignore failures away from the current node",
            problems, f"{checked} probes over {len(tables)} tables, {mismatches} mismatches")


def test_criterion_06_zero_failure_baseline(corpus):
    problems = []
    for idx, inst in enumerate(corpus):
        want = len(inst.tables["edp"].structures.edps.paths[0]) - 1
        for mode in MODES:
            trace = tr.simulate(inst.g, inst.tables[mode], [])
            if not trace.delivered:
                problems.append(("not delivered", idx, mode))
            elif len(trace.hops) != want:
                problems.append(("hops", idx, mode, len(trace.hops), want))
    _report(6, "no failures means delivery along the shortest path",
            problems, f"{len(corpus)} instances x {len(MODES)} schemes, "
                      f"{len(problems)} violations")


def test_criterion_07_clustered_resilience_gains(clustered_sweeps):
    problems = []
    peaks = {"one-tree": 0.0, "multiple-trees": 0.0}
    for (n, p, decay), res in clustered_sweeps.items():
        for scheme in TREE_MODES:
            stats = _gain_by_rate(res.records, scheme)
            rate, (mean, se) = max(stats.items(), key=lambda kv: kv[1][0])
            peaks[scheme] = max(peaks[scheme], mean)
            if mean - Z95 * se <= 0:
                problems.append((f"gain not significant: er({n},{p}) {decay}",
                                 scheme, rate, round(mean * 100, 2)))
    ot_pp = peaks["one-tree"] * 100
    mt_pp = peaks["multiple-trees"] * 100
    if not 4.7 <= ot_pp <= 20.7:
        problems.append(f"one-tree peak {ot_pp:.1f}pp outside [4.7, 20.7]")
    if not 16.0 <= mt_pp <= 32.0:
        problems.append(f"multiple-trees peak {mt_pp:.1f}pp outside [16, 32]")
    detail = (f"{len(clustered_sweeps)} sweeps x 1000 runs; peak gains "
              f"one-tree {ot_pp:.1f}pp, multiple-trees {mt_pp:.1f}pp")
    _report(7, "clustered failures: trees beat the baseline by the expected margins",
            problems, detail)


def test_criterion_08_hop_overhead_bands(clustered_sweeps, random_sweeps, zoo_sweeps):
    pools = {
        ("er", "clustered", 4.0): [d for res in clustered_sweeps.values()
                                   for d in _hop_overhead(res.records)],
        ("er", "random", 4.0): [d for res in random_sweeps.values()
                                for d in _hop_overhead(res.records)],
        ("zoo", "clustered", 2.0): _hop_overhead(zoo_sweeps[("abilene", "clustered")].records)
                                   + _hop_overhead(zoo_sweeps[("nsfnet", "clustered")].records),
        ("zoo", "random", 2.0): _hop_overhead(zoo_sweeps[("abilene", "random")].records)
                                + _hop_overhead(zoo_sweeps[("nsfnet", "random")].records),
    }
    problems = []
    parts = []
    for (fam, model, hi), diffs in pools.items():
        mean, se = _mean_se(diffs)
        parts.append(f"{fam}/{model} {mean:+.3f}")
        if not diffs:
            problems.append((fam, model, "empty pool"))
            continue
        if mean > hi:
            problems.append((fam, model, f"mean {mean:.3f} above {hi}"))
        if mean < -Z95 * se:
            problems.append((fam, model, f"mean {mean:.4f} significantly negative"))
    _report(8, "multiple-trees extra hops stay small and non-negative",
            problems, "mean extra hops " + ", ".join(parts))


def test_criterion_09_regular_degree_families(regular_sweeps):
    problems = []
    parts = []
    for n, res in regular_sweeps.items():
        mt = _gain_by_rate(res.records, "multiple-trees")
        high = {r: v for r, v in mt.items() if r >= 0.5}
        rate, (mean, se) = max(high.items(), key=lambda kv: kv[1][0])
        parts.append(f"n={n} mt {mean * 100:.1f}pp@{rate}")
        if mean - Z95 * se <= 0:
            problems.append((n, "multiple-trees gain not significant", rate))
        for r, (m_ot, _) in _gain_by_rate(res.records, "one-tree").items():
            if not -0.02 <= m_ot <= 0.08:
                problems.append((n, "one-tree gain outside [-2, 8]pp", r,
                                 round(m_ot * 100, 2)))
    _report(9, "degree-8 regular graphs: trees help at high clustered rates",
            problems, "; ".join(parts))


def test_criterion_10_precompute_runtime_profile(results_dir):
    ns = list(range(25, 106, 10))

    def stats(records):
        means = {s: float(np.mean([r.ms for r in records if r.scheme == s]))
                 for s in MODES}
        mt = [r for r in records if r.scheme == "multiple-trees"]
        rho = spearman([r.links * r.trees for r in mt], [r.ms for r in mt])
        return means, rho

    compiled = runtime_grid(ns, 0.15, 30, 99)
    c_means, c_rho = stats(compiled)

    code = ("import sys\n"
            "from treeroute.experiments import runtime_grid, timings_to_csv\n"
            f"rs = runtime_grid({ns!r}, 0.15, 30, 99)\n"
            "sys.stdout.write(timings_to_csv(rs))\n")
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True,
                          text=True, timeout=600,
                          env={**os.environ, "TREEROUTE_BACKEND": "pure"})
    assert proc.returncode == 0, proc.stderr
    rows = list(csv.DictReader(io.StringIO(proc.stdout)))
    pure = [TimingRecord(r["scheme"], int(r["n"]), int(r["run"]), int(r["links"]),
                         int(r["trees"]), float(r["ms"])) for r in rows]
    p_means, p_rho = stats(pure)
    ratio = p_means["one-tree"] / p_means["edp"]

    with open(os.path.join(results_dir, "timing.csv"), "w") as fh:
        fh.write(proc.stdout)
    with open(os.path.join(results_dir, "timing_binned.csv"), "w") as fh:
        fh.write(binned_timings_to_csv(bin_timings(pure)))

    problems = []
    for means, rho, tag in ((c_means, c_rho, "compiled"), (p_means, p_rho, "pure")):
        if not means["edp"] <= means["one-tree"] < means["multiple-trees"]:
            problems.append((tag, "ordering", means))
        if rho <= 0.8:
            problems.append((tag, f"spearman {rho:.2f} <= 0.8"))
    if ratio > 1.5:
        problems.append(f"pure one-tree/edp ratio {ratio:.2f} above 1.5")
    detail = (f"pure ms edp {p_means['edp']:.2f} <= one-tree {p_means['one-tree']:.2f}"
              f" (x{ratio:.2f}) < multiple-trees {p_means['multiple-trees']:.2f}; "
              f"spearman pure {p_rho:.2f} compiled {c_rho:.2f}")
    _report(10, "precompute cost ordering and scaling", problems, detail)
