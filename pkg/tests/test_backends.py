"""Pure-Python and compiled kernels must be bit-for-bit interchangeable."""

import os
import subprocess
import sys

import numpy as np
import pytest

import treeroute as tr
import treeroute.routing as rt
from treeroute._core import available_backends, get_backend

from conftest import scenario_corpus

HAVE_COMPILED = "compiled" in available_backends()
needs_compiled = pytest.mark.skipif(not HAVE_COMPILED,
                                    reason="compiled backend not built")

pure = get_backend("pure")
comp = get_backend("compiled") if HAVE_COMPILED else None


def test_backend_registry():
    assert tr.BACKEND in available_backends()
    assert "pure" in available_backends()
    with pytest.raises(ValueError):
        get_backend("hardware")


@needs_compiled
class TestKernelParity:
    def test_bfs_distances(self):
        for g, s, d, _ in scenario_corpus(20, seed=71):
            da = np.full(g.n, -1, np.int32)
            db = np.full(g.n, -1, np.int32)
            ra = pure.bfs_distances(g.indptr, g.nbr_node, s, da)
            rb = comp.bfs_distances(g.indptr, g.nbr_node, s, db)
            assert ra == rb
            assert np.array_equal(da, db)

    def test_maxflow_paths(self):
        for g, s, d, _ in scenario_corpus(40, seed=73):
            pa = pure.maxflow_paths(g.indptr, g.nbr_node, g.nbr_rev, s, d)
            pb = comp.maxflow_paths(g.indptr, g.nbr_node, g.nbr_rev, s, d)
            assert pa == pb

    def test_grow_node_exclusive(self):
        for g, s, d, _ in scenario_corpus(25, seed=79):
            edps = tr.compute_edps(g, s, d)
            if not edps.paths:
                continue
            seed = edps.paths[-1][:-1]
            blocked = np.zeros(g.n, np.uint8)
            for p in edps.paths[:-1]:
                for v in p[1:-1]:
                    blocked[v] = 1
            states = []
            for mod in (pure, comp):
                order = list(seed)
                in_tree = np.zeros(g.n, np.uint8)
                in_tree[seed] = 1
                pn = np.full(g.n, -1, np.int32)
                pe = np.full(g.n, -1, np.int32)
                mod.grow_node_exclusive(g.indptr, g.nbr_node, g.nbr_edge,
                                        order, in_tree, blocked.copy(), d,
                                        pn, pe)
                states.append((order, in_tree.tolist(), pn.tolist(),
                               pe.tolist()))
            assert states[0] == states[1]

    def test_grow_edge_exclusive(self):
        for g, s, d, _ in scenario_corpus(25, seed=83):
            edps = tr.compute_edps(g, s, d)
            if not edps.paths:
                continue
            marks = np.zeros(g.m, np.uint8)
            for p in edps.paths:
                for a, b in zip(p, p[1:]):
                    marks[g.edge_id(a, b)] = 1
            seed = edps.paths[-1][:-1]
            states = []
            for mod in (pure, comp):
                order = list(seed)
                in_tree = np.zeros(g.n, np.uint8)
                in_tree[seed] = 1
                pn = np.full(g.n, -1, np.int32)
                pe = np.full(g.n, -1, np.int32)
                mod.grow_edge_exclusive(g.indptr, g.nbr_node, g.nbr_edge,
                                        order, in_tree, marks.copy(), d,
                                        pn, pe)
                states.append((order, in_tree.tolist(), pn.tolist(),
                               pe.tolist()))
            assert states[0] == states[1]

    def test_mark_kept_branches(self):
        for g, s, d, _ in scenario_corpus(25, seed=89):
            edps = tr.compute_edps(g, s, d)
            if not edps.paths:
                continue
            t = tr.extend_one_tree(g, edps)
            pn = np.full(g.n, -1, np.int32)
            for v, p in t.parent.items():
                pn[v] = p
            adj_d = np.zeros(g.n, np.uint8)
            for v in t.nodes:
                if g.has_edge(v, d):
                    adj_d[v] = 1
            keeps = []
            for mod in (pure, comp):
                keep = np.zeros(g.n, np.uint8)
                mod.mark_kept_branches(list(t.nodes), pn, adj_d, t.root, keep)
                keeps.append(keep.tolist())
            assert keeps[0] == keeps[1]

    def test_run_forwarding(self):
        for g, s, d, fseed in scenario_corpus(30, seed=97):
            rng = np.random.default_rng(fseed)
            failed = np.zeros(g.m, np.uint8)
            failed[rng.choice(g.m, size=g.m // 3, replace=False)] = 1
            for mode in tr.MODES:
                t = rt.compile_rules(tr.build_structures(g, s, d, mode))
                outs = []
                ttl = 4 * g.m
                for mod in (pure, comp):
                    ou = np.zeros(ttl, np.int32)
                    ov = np.zeros(ttl, np.int32)
                    ounit = np.zeros(ttl, np.int32)
                    status, hops = mod.run_forwarding(
                        t.unit_off, t.slot_node, t.cand_off, t.cand_edge,
                        t.cand_to_slot, t.parent_slot, t.resume_at,
                        t.destination, failed, ttl, ou, ov, ounit)
                    outs.append((status, hops, ou[:hops].tolist(),
                                 ov[:hops].tolist(), ounit[:hops].tolist()))
                assert outs[0] == outs[1]


@needs_compiled
class TestEndToEndParity:
    def test_trace_and_csv_identical(self, tmp_path):
        script = (
            "import treeroute as tr, treeroute.experiments as ex, dataclasses\n"
            "cfg = ex.ExperimentConfig(\n"
            "    family=ex.GraphFamily(kind='er', n=14, p=0.35),\n"
            "    schemes=list(tr.MODES), failure_model='clustered',\n"
            "    rates=[0.0, 0.5], runs=4, base_seed=17)\n"
            "res = ex.run_experiment(cfg)\n"
            "recs = [dataclasses.replace(r, precompute_ms=0.0)"
            " for r in res.records]\n"
            "print(tr.BACKEND)\n"
            "print(ex.records_to_csv(recs, cfg.schemes, cfg.rates))\n"
        )
        outs = {}
        for backend in ("pure", "compiled"):
            env = dict(os.environ, TREEROUTE_BACKEND=backend)
            proc = subprocess.run([sys.executable, "-c", script],
                                  capture_output=True, text=True, env=env)
            assert proc.returncode == 0, proc.stderr
            head, _, rest = proc.stdout.partition("\n")
            assert head == backend
            outs[backend] = rest
        assert outs["pure"] == outs["compiled"]

    def test_invalid_backend_env(self):
        env = dict(os.environ, TREEROUTE_BACKEND="quantum")
        proc = subprocess.run([sys.executable, "-c", "import treeroute"],
                              capture_output=True, text=True, env=env)
        assert proc.returncode != 0
        assert "quantum" in proc.stderr


def test_bench_asserts_parity():
    rows = tr.bench_backends(n=24, p=0.25, flows=4, repeats=2, seed=3)
    backends = {r.backend for r in rows}
    assert "pure" in backends
    if HAVE_COMPILED:
        assert "compiled" in backends
    text = tr.bench_table(rows)
    assert "speedup" in text
