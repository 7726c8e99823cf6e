"""Shared fixtures and independently coded oracles.

The oracles deliberately avoid the package's own algorithms: cuts are found
by exhaustive bipartition search, components by union-find, tree expansion by
a dict/set frontier walk, truncation by a declarative keep-set comprehension,
and ranking by brute-force subtree scans.
"""

import itertools
import os

import pytest

import treeroute as tr

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture
def detour_graph():
    """Two EDPs (one short, one long) plus expansion nodes around d=2.

    s=0, d=2; EDPs [0,1,2] and [0,3,4,2]; nodes 5,6 hang off the long path
    next to d, node 7 hangs off the short path next to d.
    """
    return tr.Graph(8, [(0, 1), (1, 2), (0, 3), (3, 4), (4, 2), (4, 5),
                        (5, 2), (5, 6), (6, 2), (1, 7), (7, 2)])


@pytest.fixture
def four_cycle():
    """s=0, a=1, d=2, b=3."""
    return tr.Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])


def abilene_path():
    return os.path.join(DATA, "abilene.graphml")


def nsfnet_path():
    return os.path.join(DATA, "nsfnet.graphml")


# -- oracles ----------------------------------------------------------------


def brute_sd_cut(n, edges, s, d):
    """Minimum s-d edge cut by exhaustive bipartition (n <= ~16)."""
    others = [v for v in range(n) if v not in (s, d)]
    best = len(edges)
    for bits in range(1 << len(others)):
        side = {s}
        for i, v in enumerate(others):
            if bits >> i & 1:
                side.add(v)
        cross = sum(1 for u, v in edges if (u in side) != (v in side))
        best = min(best, cross)
    return best


def brute_global_cut(n, edges):
    """Global minimum edge cut by exhaustive bipartition (n <= ~14)."""
    best = len(edges)
    for bits in range(1 << (n - 1)):          # node 0 always on one side
        side = {0}
        for v in range(1, n):
            if bits >> (v - 1) & 1:
                side.add(v)
        if len(side) == n:
            continue
        cross = sum(1 for u, v in edges if (u in side) != (v in side))
        best = min(best, cross)
    return best


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def uf_component_sizes(nodes, edges):
    uf = UnionFind(nodes)
    for u, v in edges:
        uf.union(u, v)
    sizes = {}
    for x in nodes:
        r = uf.find(x)
        sizes[r] = sizes.get(r, 0) + 1
    return sorted(sizes.values(), reverse=True)


def oracle_expand(adj, seed, d, blocked_nodes=None, used_edges=None):
    """Frontier expansion oracle.

    adj: node -> sorted neighbor list.  Scans the growing node list in
    order; attaches a neighbor w of v unless w == d, w already in the tree,
    w is blocked (node-exclusive variant), or edge {v,w} is used
    (edge-exclusive variant; attaching consumes the edge).
    Returns (node order, parent map).
    """
    order = list(seed)
    members = set(seed)
    parent = {}
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for w in adj[v]:
            if w == d or w in members:
                continue
            if blocked_nodes is not None and w in blocked_nodes:
                continue
            if used_edges is not None:
                e = frozenset((v, w))
                if e in used_edges:
                    continue
                used_edges.add(e)
            members.add(w)
            parent[w] = v
            order.append(w)
    return order, parent


def oracle_keep_set(order, parent, root, adj_d_nodes):
    """Declarative truncation oracle: nodes on a root-to-x path for some
    tree node x adjacent to d, plus the root."""
    keep = {root}
    for x in order:
        if x in adj_d_nodes:
            v = x
            while v != root:
                keep.add(v)
                v = parent[v]
    return keep


def oracle_min_leaf_depth(tree, node):
    """Brute-force min distance from node to a leaf of its subtree."""
    kids = tree.children()
    subtree = [node]
    depth = {node: 0}
    i = 0
    while i < len(subtree):
        v = subtree[i]
        i += 1
        for c in kids[v]:
            depth[c] = depth[v] + 1
            subtree.append(c)
    return min(depth[v] for v in subtree if not kids[v])


def spearman(xs, ys):
    def ranks(vals):
        order = sorted(range(len(vals)), key=lambda i: vals[i])
        r = [0.0] * len(vals)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and vals[order[j + 1]] == vals[order[i]]:
                j += 1
            avg = (i + j) / 2 + 1
            for k in range(i, j + 1):
                r[order[k]] = avg
            i = j + 1
        return r

    rx, ry = ranks(xs), ranks(ys)
    n = len(xs)
    mx = sum(rx) / n
    my = sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    return cov / (vx * vy) ** 0.5


def all_simple_paths(adj, s, d, limit=None):
    """Exhaustive simple s-d path enumeration for tiny graphs."""
    out = []
    stack = [(s, [s])]
    while stack:
        v, path = stack.pop()
        if v == d:
            out.append(path)
            continue
        if limit is not None and len(path) > limit:
            continue
        for w in adj[v]:
            if w not in path:
                stack.append((w, path + [w]))
    return out


def adjacency(g):
    return {v: [int(w) for w in g.neighbors(v)] for v in range(g.n)}


def path_edges(nodes):
    return {frozenset((a, b)) for a, b in zip(nodes, nodes[1:])}


def scenario_corpus(count, seed, n_lo=8, n_hi=28):
    """Random (graph, s, d) instances across ER and regular families."""
    import numpy as np
    rng = np.random.default_rng(seed)
    out = []
    made = 0
    while made < count:
        kind = made % 3
        ds = int(rng.integers(1 << 30))
        if kind == 0:
            n = int(rng.integers(n_lo, n_hi))
            p = float(rng.uniform(0.15, 0.5))
            try:
                g = tr.gen_erdos_renyi(n, p, ds, max_attempts=60)
            except tr.GenerationError:
                continue
        elif kind == 1:
            n = int(rng.integers(n_lo, n_hi))
            delta = int(rng.integers(3, 7))
            if delta >= n:
                continue
            if (n * delta) % 2:
                n += 1
            try:
                g = tr.gen_random_regular(n, delta, ds, max_attempts=60)
            except tr.GenerationError:
                continue
        else:
            n = int(rng.integers(n_lo, min(n_hi, 16)))
            try:
                g = tr.gen_erdos_renyi(n, 0.35, ds, max_attempts=60)
            except tr.GenerationError:
                continue
        s = int(rng.integers(g.n))
        d = int(rng.integers(g.n - 1))
        if d >= s:
            d += 1
        out.append((g, s, d, int(rng.integers(1 << 30))))
        made += 1
    return out
