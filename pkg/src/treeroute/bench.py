"""Side-by-side timing of the pure-Python and compiled kernel backends.

Prepares identical inputs (graphs, seeded tree states, compiled rule arrays,
failure masks) and times each backend's kernel functions over them, so the
reported speedups reflect the kernels alone.  Also asserts the two backends
return identical results on the benchmark inputs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ._core import available_backends, get_backend
from .failures import clustered_failures
from .graph import gen_erdos_renyi
from .rng import derive, spawn
from .routing import compile_rules, _edge_ids
from .structures import MODE_MULTIPLE_TREES, build_structures, compute_edps

_TAG_BENCH = 31


@dataclass
class BenchRow:
    kernel: str
    backend: str
    mean_ms: float
    calls: int


def _flows(n: int, p: float, count: int, seed: int):
    flows = []
    for i in range(count):
        g = gen_erdos_renyi(n, p, derive(seed, _TAG_BENCH, i))
        rng = spawn(seed, _TAG_BENCH, i)
        s = int(rng.integers(g.n))
        d = int(rng.integers(g.n - 1))
        if d >= s:
            d += 1
        flows.append((g, s, d))
    return flows


def bench_backends(n: int = 60, p: float = 0.15, flows: int = 20,
                   repeats: int = 5, seed: int = 0) -> list[BenchRow]:
    prepared = _flows(n, p, flows, seed)

    tables = []
    for i, (g, s, d) in enumerate(prepared):
        t = compile_rules(build_structures(g, s, d, MODE_MULTIPLE_TREES))
        sc = clustered_failures(g, d, 0.6, derive(seed, _TAG_BENCH, 100 + i))
        mask = np.zeros(g.m, np.uint8)
        for eid in _edge_ids(g, sc):
            mask[eid] = 1
        tables.append((g, t, mask))

    seeds = []
    for g, s, d in prepared:
        edps = compute_edps(g, s, d)
        used = np.zeros(g.m, np.uint8)
        for path in edps.paths:
            for a, b in zip(path, path[1:]):
                used[g.edge_id(a, b)] = 1
        seeds.append((g, edps.paths[-1], used, d))

    rows = []
    expected: dict[tuple[str, str], list] = {}
    for backend in available_backends():
        k = get_backend(backend)

        def timed(name, fn, calls):
            t0 = time.perf_counter_ns()
            out = []
            for _ in range(repeats):
                out = fn()
            ms = (time.perf_counter_ns() - t0) / 1e6 / repeats
            rows.append(BenchRow(name, backend, ms / calls, calls))
            key = (name, backend)
            expected[key] = out
            return out

        def do_maxflow():
            return [k.maxflow_paths(g.indptr, g.nbr_node, g.nbr_rev, s, d)
                    for g, s, d in prepared]

        def do_grow():
            out = []
            for g, path, used, d in seeds:
                order = list(path[:-1])
                in_tree = np.zeros(g.n, np.uint8)
                for v in order:
                    in_tree[v] = 1
                pn = np.full(g.n, -1, np.int32)
                pe = np.full(g.n, -1, np.int32)
                k.grow_edge_exclusive(g.indptr, g.nbr_node, g.nbr_edge,
                                      order, in_tree, used.copy(), d, pn, pe)
                out.append(order)
            return out

        def do_route():
            out = []
            for g, t, mask in tables:
                ttl = 4 * g.m
                ou = np.empty(ttl, np.int32)
                ov = np.empty(ttl, np.int32)
                ow = np.empty(ttl, np.int32)
                st, hp = k.run_forwarding(
                    t.unit_off, t.slot_node, t.cand_off, t.cand_edge,
                    t.cand_to_slot, t.parent_slot, t.resume_at,
                    t.destination, mask, ttl, ou, ov, ow)
                out.append((int(st), int(hp)))
            return out

        timed("maxflow_paths", do_maxflow, len(prepared))
        timed("grow_edge_exclusive", do_grow, len(seeds))
        timed("run_forwarding", do_route, len(tables))

    kernels_seen = {r.kernel for r in rows}
    backends = available_backends()
    if len(backends) > 1:
        for name in kernels_seen:
            ref = expected[(name, backends[0])]
            for b in backends[1:]:
                if expected[(name, b)] != ref:
                    raise AssertionError(
                        f"backend results differ for {name}: "
                        f"{backends[0]} vs {b}")
    return rows


def bench_table(rows: list[BenchRow]) -> str:
    by_kernel: dict[str, dict[str, float]] = {}
    for r in rows:
        by_kernel.setdefault(r.kernel, {})[r.backend] = r.mean_ms
    lines = [f"{'kernel':24} {'backend':10} {'ms/call':>10} {'speedup':>8}"]
    for kernel, per in by_kernel.items():
        base = per.get("pure")
        for backend, ms in per.items():
            speed = f"{base / ms:7.1f}x" if base and backend != "pure" else "       -"
            lines.append(f"{kernel:24} {backend:10} {ms:10.4f} {speed}")
    return "\n".join(lines)
