"""Routing structures: edge-disjoint paths and their tree extensions.

Pipeline (build_structures): compute a maximum set of edge-disjoint s-d paths,
extend them into trees (either one tree grown from the longest path, or one
tree per path), truncate branches that cannot reach the destination, rank the
remaining branches per node, and assemble the units in ascending order of the
originating path length.

Ordering rules, fixed for determinism:
  - canonical path order is ascending (length, then node sequence);
  - the one-tree variant extends the path that sorts last (longest, ties by
    lexicographically largest sequence) so the tree occupies the final unit;
  - the multiple-trees variant constructs trees in descending canonical order
    (longest first) while claiming edges, then reports units ascending;
  - branch ranking is ascending (min hops to a leaf in the child's subtree,
    then child id); the one-tree priority child always ranks first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._core import kernels
from .graph import Graph, GraphError

MODE_EDP = "edp"
MODE_ONE_TREE = "one-tree"
MODE_MULTIPLE_TREES = "multiple-trees"
MODES = (MODE_EDP, MODE_ONE_TREE, MODE_MULTIPLE_TREES)


@dataclass
class EdpSet:
    """Maximum set of pairwise edge-disjoint s-d paths, canonically ordered."""
    source: int
    destination: int
    paths: list[list[int]]


@dataclass
class PathUnit:
    """A plain path routing unit; nodes run from s to d inclusive."""
    nodes: list[int]

    @property
    def origin(self) -> list[int]:
        return self.nodes

    def edge_pairs(self) -> list[tuple[int, int]]:
        return [_norm(self.nodes[i], self.nodes[i + 1])
                for i in range(len(self.nodes) - 1)]


@dataclass
class Tree:
    """Tree routing unit rooted at s; never contains d.

    nodes is the insertion order (root first, every parent before its
    children), which later stages rely on.  children_order is populated by
    rank_branches; priority_path marks the backbone of the one-tree variant.
    """
    root: int
    nodes: list[int]
    parent: dict[int, int]
    parent_edge: dict[int, int]
    origin: list[int]
    children_order: dict[int, list[int]] = field(default_factory=dict)
    priority_path: list[int] | None = None

    def edge_pairs(self) -> list[tuple[int, int]]:
        return [_norm(self.parent[v], v) for v in self.nodes[1:]]

    def tree_edges(self) -> set[int]:
        return set(self.parent_edge.values())

    def children(self) -> dict[int, list[int]]:
        """Tree children per node in insertion order."""
        out: dict[int, list[int]] = {v: [] for v in self.nodes}
        for v in self.nodes[1:]:
            out[self.parent[v]].append(v)
        return out


Unit = PathUnit | Tree


@dataclass
class RoutingStructures:
    graph: Graph
    source: int
    destination: int
    mode: str
    units: list[Unit]
    edps: EdpSet


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def compute_edps(g: Graph, s: int, d: int) -> EdpSet:
    """Maximum-cardinality edge-disjoint s-d paths via unit-capacity max-flow
    (BFS augmentation, ascending neighbor scan) plus flow decomposition."""
    if not (0 <= s < g.n and 0 <= d < g.n):
        raise GraphError(f"s={s}, d={d} out of range for n={g.n}")
    if s == d:
        raise GraphError("source and destination must differ")
    paths = kernels.maxflow_paths(g.indptr, g.nbr_node, g.nbr_rev, s, d)
    paths.sort(key=lambda p: (len(p), p))
    return EdpSet(s, d, paths)


def _seed_tree(g: Graph, path: list[int]) -> tuple[list[int], np.ndarray,
                                                   np.ndarray, np.ndarray]:
    """Tree state seeded with the path minus its last node (the destination)."""
    seed = path[:-1]
    in_tree = np.zeros(g.n, np.uint8)
    parent_node = np.full(g.n, -1, np.int32)
    parent_edge = np.full(g.n, -1, np.int32)
    for i, v in enumerate(seed):
        in_tree[v] = 1
        if i > 0:
            parent_node[v] = seed[i - 1]
            parent_edge[v] = g.edge_id(seed[i - 1], v)
    return list(seed), in_tree, parent_node, parent_edge


def _to_tree(order: list[int], parent_node: np.ndarray,
             parent_edge: np.ndarray, origin: list[int],
             priority: list[int] | None) -> Tree:
    parent = {v: int(parent_node[v]) for v in order[1:]}
    pedge = {v: int(parent_edge[v]) for v in order[1:]}
    return Tree(root=order[0], nodes=list(order), parent=parent,
                parent_edge=pedge, origin=list(origin),
                priority_path=priority)


def extend_one_tree(g: Graph, edps: EdpSet) -> Tree:
    """Grow one tree from the last canonical path (longest, lexicographically
    largest on ties): frontier expansion that attaches a neighbor unless it is
    the destination, already in the tree, or a node of any other path."""
    if not edps.paths:
        raise ValueError("no paths to extend")
    ext = edps.paths[-1]
    blocked = np.zeros(g.n, np.uint8)
    for p in edps.paths[:-1]:
        for v in p:
            blocked[v] = 1
    order, in_tree, parent_node, parent_edge = _seed_tree(g, ext)
    kernels.grow_node_exclusive(g.indptr, g.nbr_node, g.nbr_edge, order,
                                in_tree, blocked, edps.destination,
                                parent_node, parent_edge)
    return _to_tree(order, parent_node, parent_edge, ext, ext[:-1])


def extend_multiple_trees(g: Graph, edps: EdpSet) -> list[Tree]:
    """Grow one tree per path, longest first, under a shared edge budget: an
    edge may only attach a node while unclaimed, and every path edge starts
    claimed, which keeps the trees pairwise edge-disjoint."""
    if not edps.paths:
        raise ValueError("no paths to extend")
    edge_used = np.zeros(g.m, np.uint8)
    for p in edps.paths:
        for i in range(len(p) - 1):
            edge_used[g.edge_id(p[i], p[i + 1])] = 1
    trees = []
    for p in reversed(edps.paths):
        order, in_tree, parent_node, parent_edge = _seed_tree(g, p)
        kernels.grow_edge_exclusive(g.indptr, g.nbr_node, g.nbr_edge, order,
                                    in_tree, edge_used, edps.destination,
                                    parent_node, parent_edge)
        trees.append(_to_tree(order, parent_node, parent_edge, p, None))
    return trees


def truncate_tree(g: Graph, t: Tree, d: int) -> Tree:
    """Drop every branch that cannot end next to d: the result keeps exactly
    the nodes on root-to-x tree paths for tree nodes x adjacent to d (plus
    always the root, possibly as a degenerate bare-root unit)."""
    parent_node = np.full(g.n, -1, np.int32)
    parent_edge = np.full(g.n, -1, np.int32)
    for v, p in t.parent.items():
        parent_node[v] = p
        parent_edge[v] = t.parent_edge[v]
    adj_d = np.zeros(g.n, np.uint8)
    for v in t.nodes:
        if g.has_edge(v, d):
            adj_d[v] = 1
    keep = np.zeros(g.n, np.uint8)
    kernels.mark_kept_branches(t.nodes, parent_node, adj_d, t.root, keep)
    kept = [v for v in t.nodes if keep[v]]
    return Tree(root=t.root, nodes=kept,
                parent={v: t.parent[v] for v in kept[1:]},
                parent_edge={v: t.parent_edge[v] for v in kept[1:]},
                origin=list(t.origin),
                priority_path=list(t.priority_path)
                if t.priority_path is not None else None)


def rank_branches(g: Graph, t: Tree, d: int) -> Tree:
    """Order each node's children ascending by (min hops from the child to a
    leaf of its subtree, child id); the priority child, when present, is
    forced to the front at every node along the priority path."""
    children = t.children()
    min_leaf: dict[int, int] = {}
    for v in reversed(t.nodes):
        kids = children[v]
        min_leaf[v] = 0 if not kids else 1 + min(min_leaf[c] for c in kids)
    order = {v: sorted(children[v], key=lambda c: (min_leaf[c], c))
             for v in t.nodes}
    if t.priority_path is not None:
        for u, w in zip(t.priority_path, t.priority_path[1:]):
            kids = order[u]
            kids.insert(0, kids.pop(kids.index(w)))
    return Tree(root=t.root, nodes=list(t.nodes), parent=dict(t.parent),
                parent_edge=dict(t.parent_edge), origin=list(t.origin),
                children_order=order,
                priority_path=list(t.priority_path)
                if t.priority_path is not None else None)


def build_structures(g: Graph, s: int, d: int, mode: str) -> RoutingStructures:
    """Full pipeline; units come out ascending by originating path length
    (ties lexicographic), the order routing attempts them in."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    edps = compute_edps(g, s, d)
    units: list[Unit]
    if mode == MODE_EDP:
        units = [PathUnit(list(p)) for p in edps.paths]
    elif mode == MODE_ONE_TREE:
        tree = rank_branches(g, truncate_tree(g, extend_one_tree(g, edps), d), d)
        units = [PathUnit(list(p)) for p in edps.paths[:-1]]
        units.append(tree)
    else:
        trees = [rank_branches(g, truncate_tree(g, t, d), d)
                 for t in extend_multiple_trees(g, edps)]
        trees.sort(key=lambda t: (len(t.origin), t.origin))
        units = list(trees)
    return RoutingStructures(g, s, d, mode, units, edps)


def structures_to_json(rs: RoutingStructures) -> dict:
    """JSON-ready document for inspection and golden tests."""
    units = []
    for u in rs.units:
        if isinstance(u, PathUnit):
            units.append({"kind": "path", "nodes": list(u.nodes)})
        else:
            units.append({
                "kind": "tree",
                "root": u.root,
                "nodes": list(u.nodes),
                "edges": [list(e) for e in u.edge_pairs()],
                "children_order": {str(v): list(cs)
                                   for v, cs in sorted(u.children_order.items())
                                   if cs},
                "priority_path": list(u.priority_path)
                if u.priority_path is not None else None,
                "origin": list(u.origin),
            })
    return {"source": rs.source, "destination": rs.destination,
            "mode": rs.mode, "edps": [list(p) for p in rs.edps.paths],
            "units": units}


def structure_stats(rs: RoutingStructures) -> tuple[int, int, int]:
    """(unit count, total structure edges, tree count)."""
    units = len(rs.units)
    edges = sum(len(u.edge_pairs()) for u in rs.units)
    trees = sum(1 for u in rs.units if isinstance(u, Tree))
    return units, edges, trees
