"""Hot kernels shared by the pure-Python and compiled backends.

This module is plain Python that also compiles as a Cython extension (see
setup.py, which builds it under the name ``treeroute._core._compiled``).  The
``cython`` import is optional so the file keeps working as-is when Cython is
not installed.  Annotations are declarations only; ``from __future__ import
annotations`` keeps them unevaluated at runtime in pure mode.

Conventions: graphs arrive as CSR arrays (indptr, nbr_node, nbr_edge, nbr_rev,
all int32) over 2*m directed arcs; masks are uint8.  All arithmetic stays well
inside int32.
"""

from __future__ import annotations

import numpy as np

try:
    import cython
except ImportError:
    cython = None


def bfs_distances(indptr: cython.int[:], nbr_node: cython.int[:],
                  src: cython.int, dist: cython.int[:]) -> cython.int:
    """Fill dist with hop counts from src (-1 = unreachable); return #reached."""
    n: cython.int
    i: cython.int
    head: cython.int
    tail: cython.int
    u: cython.int
    v: cython.int
    a: cython.int
    du: cython.int

    n = dist.shape[0]
    for i in range(n):
        dist[i] = -1
    q: cython.int[:] = np.empty(n, dtype=np.int32)
    head = 0
    tail = 0
    q[tail] = src
    tail += 1
    dist[src] = 0
    while head < tail:
        u = q[head]
        head += 1
        du = dist[u]
        for a in range(indptr[u], indptr[u + 1]):
            v = nbr_node[a]
            if dist[v] < 0:
                dist[v] = du + 1
                q[tail] = v
                tail += 1
    return tail


def maxflow_paths(indptr: cython.int[:], nbr_node: cython.int[:],
                  nbr_rev: cython.int[:], s: cython.int, d: cython.int) -> list:
    """Max set of pairwise edge-disjoint s-d paths on a unit-capacity graph.

    Shortest-augmenting-path max-flow over the arc arrays, then a path
    decomposition that walks lowest-numbered flow arcs first and excises any
    flow cycles.  Returns a list of node lists, each starting at s and ending
    at d; the set size equals the s-d edge connectivity.
    """
    n: cython.int
    narcs: cython.int
    i: cython.int
    head: cython.int
    tail: cython.int
    found: cython.int
    u: cython.int
    v: cython.int
    a: cython.int
    r: cython.int
    value: cython.int
    k: cython.int
    sel: cython.int
    j: cython.int

    n = indptr.shape[0] - 1
    narcs = nbr_node.shape[0]
    flow: cython.uchar[:] = np.zeros(narcs, dtype=np.uint8)
    seen: cython.uchar[:] = np.empty(n, dtype=np.uint8)
    pred: cython.int[:] = np.empty(n, dtype=np.int32)
    q: cython.int[:] = np.empty(n, dtype=np.int32)

    value = 0
    while True:
        for i in range(n):
            seen[i] = 0
        head = 0
        tail = 0
        q[tail] = s
        tail += 1
        seen[s] = 1
        found = 0
        while head < tail and found == 0:
            u = q[head]
            head += 1
            for a in range(indptr[u], indptr[u + 1]):
                if flow[a] != 0:
                    continue
                v = nbr_node[a]
                if seen[v] != 0:
                    continue
                seen[v] = 1
                pred[v] = a
                if v == d:
                    found = 1
                    break
                q[tail] = v
                tail += 1
        if found == 0:
            break
        v = d
        while v != s:
            a = pred[v]
            r = nbr_rev[a]
            if flow[r] == 1:
                flow[r] = 0
            else:
                flow[a] = 1
            v = nbr_node[r]
        value += 1

    onpath: cython.int[:] = np.empty(n, dtype=np.int32)
    for i in range(n):
        onpath[i] = -1
    paths = []
    for k in range(value):
        path = [int(s)]
        onpath[s] = 0
        u = s
        while u != d:
            sel = -1
            for a in range(indptr[u], indptr[u + 1]):
                if flow[a] == 1:
                    sel = a
                    break
            flow[sel] = 0
            v = nbr_node[sel]
            if v == d:
                path.append(int(d))
                break
            if onpath[v] >= 0:
                # walked into a flow cycle: drop the loop segment
                j = len(path) - 1
                while j > onpath[v]:
                    onpath[path[j]] = -1
                    path.pop()
                    j -= 1
                u = v
            else:
                onpath[v] = len(path)
                path.append(int(v))
                u = v
        for j in range(len(path) - 1):
            onpath[path[j]] = -1
        paths.append(path)
    return paths


def grow_node_exclusive(indptr: cython.int[:], nbr_node: cython.int[:],
                        nbr_edge: cython.int[:], order: list,
                        in_tree: cython.uchar[:], blocked: cython.uchar[:],
                        d: cython.int, parent_node: cython.int[:],
                        parent_edge: cython.int[:]) -> None:
    """Expand a tree by attaching every reachable node not blocked and not d.

    order arrives holding the seed nodes (in_tree set accordingly) and is
    extended in place; nodes are scanned first-in-first-out with neighbors in
    ascending id order, so insertion order is deterministic and parents always
    precede children.
    """
    it: cython.int
    u: cython.int
    v: cython.int
    a: cython.int

    it = 0
    while it < len(order):
        u = order[it]
        it += 1
        for a in range(indptr[u], indptr[u + 1]):
            v = nbr_node[a]
            if v == d:
                continue
            if in_tree[v] != 0 or blocked[v] != 0:
                continue
            in_tree[v] = 1
            parent_node[v] = u
            parent_edge[v] = nbr_edge[a]
            order.append(int(v))


def grow_edge_exclusive(indptr: cython.int[:], nbr_node: cython.int[:],
                        nbr_edge: cython.int[:], order: list,
                        in_tree: cython.uchar[:], edge_used: cython.uchar[:],
                        d: cython.int, parent_node: cython.int[:],
                        parent_edge: cython.int[:]) -> None:
    """Expand a tree over edges not yet claimed by any other unit.

    Same scan discipline as grow_node_exclusive, but eligibility is per edge:
    an edge is consumed (marked in edge_used) only when it attaches a new
    node, which keeps the trees grown under one shared edge_used mask
    pairwise edge-disjoint.
    """
    it: cython.int
    u: cython.int
    v: cython.int
    a: cython.int
    e: cython.int

    it = 0
    while it < len(order):
        u = order[it]
        it += 1
        for a in range(indptr[u], indptr[u + 1]):
            e = nbr_edge[a]
            if edge_used[e] != 0:
                continue
            v = nbr_node[a]
            if v == d:
                continue
            if in_tree[v] != 0:
                continue
            in_tree[v] = 1
            edge_used[e] = 1
            parent_node[v] = u
            parent_edge[v] = nbr_edge[a]
            order.append(int(v))


def mark_kept_branches(order: list, parent_node: cython.int[:],
                       adj_d: cython.uchar[:], root: cython.int,
                       keep: cython.uchar[:]) -> None:
    """Keep the root plus every node on a root-to-(neighbor of d) branch.

    adj_d flags tree members adjacent to the destination; each flagged node
    climbs its parent chain until it meets an already-kept node, so the pass
    is linear in the tree size.
    """
    i: cython.int
    v: cython.int
    x: cython.int

    keep[root] = 1
    for i in range(len(order)):
        v = order[i]
        if adj_d[v] != 0:
            x = v
            while keep[x] == 0:
                keep[x] = 1
                x = parent_node[x]


def run_forwarding(unit_off: cython.int[:], slot_node: cython.int[:],
                   cand_off: cython.int[:], cand_edge: cython.int[:],
                   cand_to_slot: cython.int[:], parent_slot: cython.int[:],
                   resume_at: cython.int[:],
                   dest: cython.int, failed: cython.uchar[:], ttl: cython.int,
                   out_u: cython.int[:], out_v: cython.int[:],
                   out_unit: cython.int[:]) -> tuple:
    """Route one packet through precompiled per-unit forwarding rules.

    Depth-first over each unit in order: at a slot, try candidates from the
    current scan position; traverse the first one whose edge is alive
    (delivery when cand_to_slot is -1), otherwise backtrack to the parent and
    resume the parent's scan just past the edge we returned over.  A unit
    exhausted at its root hands over to the next unit.

    Returns (status, hops) with status 1 = delivered, 0 = all units
    exhausted, 2 = ttl exceeded.  out_u/out_v/out_unit (length >= ttl)
    receive one record per hop.
    """
    nunits: cython.int
    unit: cython.int
    slot: cython.int
    ci: cython.int
    limit: cython.int
    hops: cython.int
    e: cython.int
    to: cython.int
    moved: cython.int
    p: cython.int
    nci: cython.int

    nunits = unit_off.shape[0] - 1
    hops = 0
    unit = 0
    while unit < nunits:
        slot = unit_off[unit]
        ci = cand_off[slot]
        while True:
            limit = cand_off[slot + 1]
            moved = 0
            while ci < limit:
                e = cand_edge[ci]
                if failed[e] == 0:
                    if hops >= ttl:
                        return (2, int(hops))
                    to = cand_to_slot[ci]
                    out_u[hops] = slot_node[slot]
                    out_unit[hops] = unit
                    if to < 0:
                        out_v[hops] = dest
                        hops += 1
                        return (1, int(hops))
                    out_v[hops] = slot_node[to]
                    hops += 1
                    slot = to
                    ci = cand_off[slot]
                    moved = 1
                    break
                ci += 1
            if moved == 1:
                continue
            p = parent_slot[slot]
            if p < 0:
                break
            if hops >= ttl:
                return (2, int(hops))
            out_u[hops] = slot_node[slot]
            out_v[hops] = slot_node[p]
            out_unit[hops] = unit
            hops += 1
            nci = resume_at[slot]
            slot = p
            ci = nci
        unit += 1
    return (0, int(hops))
