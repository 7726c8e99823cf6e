"""Undirected graph model and providers.

Graphs are simple (no self-loops, no parallel edges), connected, with dense
integer node ids.  Internally everything lives in CSR-style int32 arrays so
the kernels can run over them directly: ``indptr``/``nbr_node``/``nbr_edge``
describe 2*m directed arcs (neighbors in ascending order), ``nbr_rev`` maps
each arc to its reverse, and ``edge_u``/``edge_v`` list the canonical
endpoints (u < v) of each edge in lexicographic order, which fixes edge ids.

Providers: G(n, p) and delta-regular random graphs (resampled until connected,
bounded attempts), GraphML ingestion (largest connected component, parallel
edges collapsed, original labels kept), and a plain edge-list format for
fixtures.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Iterable, Sequence

import numpy as np

from ._core import kernels
from .rng import spawn

_TAG_ER = 1
_TAG_REGULAR = 2


class GraphError(ValueError):
    """Invalid graph construction input."""


class GenerationError(RuntimeError):
    """A random provider exhausted its attempt budget."""


class FormatError(ValueError):
    """Malformed graph file content."""


class Graph:
    """Immutable simple connected undirected graph."""

    __slots__ = ("n", "m", "indptr", "nbr_node", "nbr_edge", "nbr_rev",
                 "edge_u", "edge_v", "labels", "_edge_index")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]],
                 labels: Sequence[str] | None = None,
                 require_connected: bool = True):
        if n < 1:
            raise GraphError(f"need at least one node, got n={n}")
        if n > 46340:
            # arc keys below use u*n+v in int32
            raise GraphError(f"graph too large (n={n})")
        canon = set()
        for u, v in edges:
            u = int(u)
            v = int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if u > v:
                u, v = v, u
            if (u, v) in canon:
                raise GraphError(f"duplicate edge ({u}, {v})")
            canon.add((u, v))
        ordered = sorted(canon)
        m = len(ordered)

        self.n = n
        self.m = m
        self.edge_u = np.fromiter((e[0] for e in ordered), np.int32, m)
        self.edge_v = np.fromiter((e[1] for e in ordered), np.int32, m)
        tails = np.concatenate([self.edge_u, self.edge_v])
        heads = np.concatenate([self.edge_v, self.edge_u])
        eids = np.concatenate([np.arange(m, dtype=np.int32)] * 2) \
            if m else np.empty(0, np.int32)
        order = np.lexsort((heads, tails))
        tails = tails[order]
        heads = heads[order]
        self.nbr_node = np.ascontiguousarray(heads, np.int32)
        self.nbr_edge = np.ascontiguousarray(eids[order], np.int32)
        counts = np.bincount(tails, minlength=n)
        self.indptr = np.zeros(n + 1, np.int32)
        np.cumsum(counts, out=self.indptr[1:])
        key = tails.astype(np.int64) * n + heads
        rev_key = heads.astype(np.int64) * n + tails
        self.nbr_rev = np.searchsorted(key, rev_key).astype(np.int32)

        if labels is not None:
            if len(labels) != n:
                raise GraphError(
                    f"expected {n} labels, got {len(labels)}")
            self.labels = [str(x) for x in labels]
        else:
            self.labels = None
        self._edge_index = None

        if require_connected and not self.is_connected():
            raise GraphError(
                f"graph is not connected (n={n}, m={m})")

    # -- queries ----------------------------------------------------------

    def is_connected(self) -> bool:
        dist = np.empty(self.n, np.int32)
        reached = kernels.bfs_distances(self.indptr, self.nbr_node, 0, dist)
        return int(reached) == self.n

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        """Neighbor node ids of v, ascending."""
        return self.nbr_node[self.indptr[v]:self.indptr[v + 1]]

    def edge_endpoints(self, e: int) -> tuple[int, int]:
        return int(self.edge_u[e]), int(self.edge_v[e])

    def edges(self) -> list[tuple[int, int]]:
        """All edges as (u, v) with u < v, lexicographic (edge-id) order."""
        return list(zip(self.edge_u.tolist(), self.edge_v.tolist()))

    def _index(self) -> dict[tuple[int, int], int]:
        if self._edge_index is None:
            self._edge_index = {
                (int(u), int(v)): i
                for i, (u, v) in enumerate(zip(self.edge_u, self.edge_v))}
        return self._edge_index

    def edge_id(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        try:
            return self._index()[(u, v)]
        except KeyError:
            raise GraphError(f"no edge ({u}, {v})") from None

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self._index()

    def label_of(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def node_by_label(self, label: str) -> int:
        if self.labels is not None and label in self.labels:
            return self.labels.index(label)
        try:
            v = int(label)
        except ValueError:
            raise GraphError(f"unknown node {label!r}") from None
        if not (0 <= v < self.n):
            raise GraphError(f"node id {v} out of range")
        return v

    def hop_distances(self, src: int) -> np.ndarray:
        """BFS hop count from src to every node (-1 if unreachable)."""
        dist = np.empty(self.n, np.int32)
        kernels.bfs_distances(self.indptr, self.nbr_node, src, dist)
        return dist

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# -- random providers ------------------------------------------------------


def _sample_er(n: int, p: float, rng) -> Graph:
    iu, iv = np.triu_indices(n, 1)
    mask = rng.random(iu.shape[0]) < p
    return Graph(n, zip(iu[mask].tolist(), iv[mask].tolist()),
                 require_connected=False)


def gen_erdos_renyi(n: int, p: float, seed: int, max_attempts: int = 1000,
                    stats: dict | None = None) -> Graph:
    """Connected G(n, p): sample, retry with a fresh derived stream if the
    draw is disconnected, give up after max_attempts.  When given, stats
    receives the attempt count under "attempts"."""
    if n < 2:
        raise GraphError(f"need n >= 2, got {n}")
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"edge probability must be in [0, 1], got {p}")
    for attempt in range(max_attempts):
        g = _sample_er(n, p, spawn(seed, _TAG_ER, attempt))
        if g.is_connected():
            if stats is not None:
                stats["attempts"] = attempt + 1
            return g
    raise GenerationError(
        f"no connected G({n}, {p}) draw in {max_attempts} attempts")


def gen_erdos_renyi_lcc(n: int, p: float, seed: int, max_attempts: int = 1000,
                        stats: dict | None = None) -> Graph:
    """Largest connected component of a G(n, p) draw.

    For families too sparse to ever come out connected; resamples only when
    the component is a single node."""
    if n < 2:
        raise GraphError(f"need n >= 2, got {n}")
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"edge probability must be in [0, 1], got {p}")
    for attempt in range(max_attempts):
        g = largest_component(_sample_er(n, p, spawn(seed, _TAG_ER, attempt)))
        if g.n >= 2:
            if stats is not None:
                stats["attempts"] = attempt + 1
            return g
    raise GenerationError(
        f"no G({n}, {p}) draw with a non-trivial component "
        f"in {max_attempts} attempts")


def gen_random_regular(n: int, delta: int, seed: int,
                       max_attempts: int = 200,
                       stats: dict | None = None) -> Graph:
    """Connected simple delta-regular graph via stub matching.

    Pairs stubs uniformly at random, rejecting self-loops and repeat edges;
    when a pairing strands stubs with no legal match left the whole attempt
    restarts, as does a disconnected result.
    """
    if n < 2:
        raise GraphError(f"need n >= 2, got {n}")
    if delta < 1 or delta >= n:
        raise GraphError(f"degree must satisfy 1 <= delta < n, got {delta}")
    if (n * delta) % 2 != 0:
        raise GraphError(f"n * delta must be even, got n={n}, delta={delta}")

    for attempt in range(max_attempts):
        rng = spawn(seed, _TAG_REGULAR, attempt)
        edges = _stub_matching(n, delta, rng)
        if edges is None:
            continue
        g = Graph(n, edges, require_connected=False)
        if g.is_connected():
            if stats is not None:
                stats["attempts"] = attempt + 1
            return g
    raise GenerationError(
        f"no connected simple {delta}-regular graph on {n} nodes "
        f"in {max_attempts} attempts")


def _stub_matching(n: int, delta: int, rng) -> list[tuple[int, int]] | None:
    stubs = np.repeat(np.arange(n, dtype=np.int32), delta)
    size = stubs.shape[0]
    present: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    streak = 0
    while size > 0:
        i = int(rng.integers(size))
        j = int(rng.integers(size - 1))
        if j >= i:
            j += 1
        u = int(stubs[i])
        v = int(stubs[j])
        if u > v:
            u, v = v, u
        if u == v or (u, v) in present:
            streak += 1
            if streak > 200:
                if _has_legal_pair(stubs[:size], present):
                    streak = 0
                    continue
                return None
            continue
        streak = 0
        present.add((u, v))
        edges.append((u, v))
        for idx in sorted((i, j), reverse=True):
            stubs[idx] = stubs[size - 1]
            size -= 1
    return edges


def _has_legal_pair(stubs: np.ndarray, present: set) -> bool:
    values = sorted(set(int(x) for x in stubs))
    for a in range(len(values)):
        for b in range(a + 1, len(values)):
            if (values[a], values[b]) not in present:
                return True
    return False


# -- connectivity ----------------------------------------------------------


def largest_component(g: Graph) -> Graph:
    """The largest connected component of g as a new Graph.

    Nodes are relabeled densely in ascending original-id order (ties between
    equal-sized components go to the one containing the smallest id); labels
    carry over.
    """
    comp = np.full(g.n, -1, np.int32)
    sizes = []
    for start in range(g.n):
        if comp[start] >= 0:
            continue
        cid = len(sizes)
        dist = g.hop_distances(start)
        members = np.nonzero(dist >= 0)[0]
        fresh = members[comp[members] < 0]
        comp[fresh] = cid
        sizes.append(len(fresh))
    best = int(np.argmax(sizes))
    keep = np.nonzero(comp == best)[0]
    index = {int(v): i for i, v in enumerate(keep)}
    edges = [(index[u], index[v]) for u, v in g.edges()
             if u in index and v in index]
    labels = [g.label_of(int(v)) for v in keep] if g.labels is not None else None
    return Graph(len(keep), edges, labels=labels)


def edge_connectivity(g: Graph) -> int:
    """Global edge connectivity: min over targets of max edge-disjoint
    0-target path count (Menger)."""
    if g.n < 2:
        return 0
    best = g.m + 1
    for v in range(1, g.n):
        paths = kernels.maxflow_paths(g.indptr, g.nbr_node, g.nbr_rev, 0, v)
        best = min(best, len(paths))
        if best == 0:
            break
    return best


# -- edge-list format ------------------------------------------------------


def load_edge_list(text: str, require_connected: bool = True) -> Graph:
    """Parse the fixture format: one 'u v' pair per line, '#' comments."""
    edges = []
    hi = -1
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(
                f"line {lineno}: expected 'u v', got {raw.strip()!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(
                f"line {lineno}: non-integer node id in {raw.strip()!r}"
            ) from None
        if u < 0 or v < 0:
            raise FormatError(f"line {lineno}: negative node id")
        edges.append((u, v))
        hi = max(hi, u, v)
    if not edges:
        raise FormatError("no edges found")
    try:
        return Graph(hi + 1, edges, require_connected=require_connected)
    except GraphError as exc:
        raise FormatError(str(exc)) from None


def dump_edge_list(g: Graph) -> str:
    lines = [f"# nodes={g.n} edges={g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


# -- GraphML ingestion -----------------------------------------------------


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def load_graphml(source: str | bytes) -> Graph:
    """Build a Graph from GraphML content.

    Reduces to the largest connected component, collapses parallel edges,
    drops self-loops, ignores edge direction, and keeps the original node
    labels (a node data field named 'label' when declared, else the node id)
    in Graph.labels.
    """
    if isinstance(source, str):
        source = source.encode("utf-8")
    try:
        root = ET.fromstring(source)
    except ET.ParseError as exc:
        raise FormatError(f"invalid GraphML: {exc}") from None

    label_keys = set()
    for el in root.iter():
        if _local(el.tag) == "key" and el.get("attr.name") == "label" \
                and el.get("for", "node") == "node":
            label_keys.add(el.get("id"))

    node_order: list[str] = []
    node_label: dict[str, str] = {}
    raw_edges: list[tuple[str, str]] = []
    for el in root.iter():
        tag = _local(el.tag)
        if tag == "node":
            nid = el.get("id")
            if nid is None:
                raise FormatError("node without id attribute")
            if nid in node_label:
                raise FormatError(f"duplicate node id {nid!r}")
            label = nid
            for data in el:
                if _local(data.tag) == "data" \
                        and data.get("key") in label_keys \
                        and data.text is not None:
                    label = data.text.strip()
            node_order.append(nid)
            node_label[nid] = label
        elif tag == "edge":
            src = el.get("source")
            dst = el.get("target")
            if src is None or dst is None:
                raise FormatError("edge without source/target")
            raw_edges.append((src, dst))

    if not node_order:
        raise FormatError("no nodes found")
    for src, dst in raw_edges:
        if src not in node_label or dst not in node_label:
            raise FormatError(
                f"edge references unknown node ({src!r}, {dst!r})")

    adj: dict[str, set[str]] = {nid: set() for nid in node_order}
    for src, dst in raw_edges:
        if src == dst:
            continue
        adj[src].add(dst)
        adj[dst].add(src)

    # largest connected component, earliest in document order on ties
    seen: set[str] = set()
    best: list[str] = []
    for start in node_order:
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        i = 0
        while i < len(comp):
            for w in sorted(adj[comp[i]]):
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
            i += 1
        if len(comp) > len(best):
            best = comp

    keep = set(best)
    kept = [nid for nid in node_order if nid in keep]
    index = {nid: i for i, nid in enumerate(kept)}
    edges = {(min(index[a], index[b]), max(index[a], index[b]))
             for a, b in raw_edges
             if a != b and a in keep and b in keep}
    return Graph(len(kept), sorted(edges),
                 labels=[node_label[nid] for nid in kept])


def load_graphml_file(path) -> Graph:
    with open(path, "rb") as fh:
        return load_graphml(fh.read())


def write_graphml(g: Graph) -> str:
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
           '  <key id="d0" for="node" attr.name="label" attr.type="string"/>',
           '  <graph id="G" edgedefault="undirected">']
    for v in range(g.n):
        out.append(f'    <node id="n{v}">')
        out.append(f'      <data key="d0">{_xml_escape(g.label_of(v))}</data>')
        out.append('    </node>')
    for u, v in g.edges():
        out.append(f'    <edge source="n{u}" target="n{v}"/>')
    out.append('  </graph>')
    out.append('</graphml>')
    return "\n".join(out) + "\n"


def _xml_escape(s: str) -> str:
    return (s.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))
