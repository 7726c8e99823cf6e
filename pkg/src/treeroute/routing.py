"""Static local forwarding rules and packet simulation.

compile_rules flattens routing structures into per-unit candidate tables:
each structure node gets an ordered list of outgoing candidates (the direct
edge to d first where it exists, then tree children in ranked order; on the
one-tree priority path the priority child comes before the delivery edge so
the packet replays the original path hop for hop).  A rule is addressed by
(node, incoming edge); the incoming edge identifies the unit everywhere
except at the source, where an explicit unit counter applies.

simulate executes the rules depth-first: take the first alive candidate,
backtrack to the parent when none is left (resuming the parent's scan just
past the returning edge), move to the next unit when a unit exhausts at the
source, and fail after the last unit.  Every traversal, including
backtracking, counts as one hop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._core import kernels
from .graph import Graph, GraphError
from .structures import PathUnit, RoutingStructures, Tree

ORIGIN = None

FORWARD = "FORWARD"
BACKTRACK = "BACKTRACK"
NEXT_UNIT = "NEXT-UNIT"
FAIL = "FAIL"
DELIVERED = "DELIVERED"


@dataclass(frozen=True)
class PortContext:
    """Where a packet sits: at node, having arrived over incoming_edge
    (ORIGIN means injected at the source; unit then selects the rule set)."""
    node: int
    incoming_edge: tuple[int, int] | None = ORIGIN
    unit: int = 0


@dataclass(frozen=True)
class Action:
    kind: str
    edge: tuple[int, int] | None = None   # directed (from, to) for moves
    unit: int | None = None


@dataclass
class PacketTrace:
    hops: list[tuple[int, int]]
    units: list[int]
    delivered: bool
    reason: str | None = None             # "exhausted" or "loop" when not delivered

    @property
    def hop_count(self) -> int:
        return len(self.hops)


class ForwardingTable:
    """Immutable compiled rules for one (s, d) flow and one scheme."""

    def __init__(self, rs: RoutingStructures):
        g = rs.graph
        self.graph = g
        self.structures = rs
        self.source = rs.source
        self.destination = rs.destination

        unit_off = [0]
        slot_node: list[int] = []
        cand_off = [0]
        cand_edge: list[int] = []
        cand_to_slot: list[int] = []
        parent_slot: list[int] = []
        resume_at: list[int] = []
        edge_owner: dict[int, tuple[int, int]] = {}

        for ui, unit in enumerate(rs.units):
            base = len(slot_node)
            if isinstance(unit, PathUnit):
                nodes = unit.nodes[:-1]
                slot_of = {v: base + i for i, v in enumerate(nodes)}
                for i, v in enumerate(nodes):
                    slot_node.append(v)
                    parent_slot.append(base + i - 1 if i > 0 else -1)
                    resume_at.append(0)
                    nxt = unit.nodes[i + 1]
                    eid = g.edge_id(v, nxt)
                    if nxt == rs.destination:
                        cand_edge.append(eid)
                        cand_to_slot.append(-1)
                    else:
                        cand_edge.append(eid)
                        cand_to_slot.append(slot_of[nxt])
                        edge_owner[eid] = (ui, slot_of[nxt])
                    cand_off.append(len(cand_edge))
                # a path slot has one candidate, so a backtracking packet
                # resumes at the parent's list end and keeps backtracking
                for i in range(1, len(nodes)):
                    resume_at[base + i] = cand_off[base + i]
            else:
                self._emit_tree(g, rs, ui, unit, base, slot_node, cand_off,
                                cand_edge, cand_to_slot, parent_slot,
                                resume_at, edge_owner)
            unit_off.append(len(slot_node))

        self.nunits = len(rs.units)
        self.unit_off = np.asarray(unit_off, np.int32)
        self.slot_node = np.asarray(slot_node, np.int32)
        self.cand_off = np.asarray(cand_off, np.int32)
        self.cand_edge = np.asarray(cand_edge, np.int32)
        self.cand_to_slot = np.asarray(cand_to_slot, np.int32)
        self.parent_slot = np.asarray(parent_slot, np.int32)
        self.resume_at = np.asarray(resume_at, np.int32)
        self.edge_owner = edge_owner

    @staticmethod
    def _emit_tree(g, rs, ui, tree: Tree, base, slot_node, cand_off,
                   cand_edge, cand_to_slot, parent_slot, resume_at,
                   edge_owner):
        slot_of = {v: base + i for i, v in enumerate(tree.nodes)}
        priority_next: dict[int, int] = {}
        if tree.priority_path is not None:
            priority_next = dict(zip(tree.priority_path,
                                     tree.priority_path[1:]))
        resume_fix: dict[int, int] = {}
        for v in tree.nodes:
            slot_node.append(v)
            if v == tree.root:
                parent_slot.append(-1)
            else:
                parent_slot.append(slot_of[tree.parent[v]])
            resume_at.append(0)

            kids = list(tree.children_order.get(v, []))
            head: list[int] = []
            if v in priority_next:
                # replay the original path before trying a delivery shortcut
                head = [kids.pop(kids.index(priority_next[v]))]
            emit = head + ([rs.destination] if g.has_edge(v, rs.destination)
                           else []) + kids
            for w in emit:
                if w == rs.destination:
                    cand_edge.append(g.edge_id(v, rs.destination))
                    cand_to_slot.append(-1)
                else:
                    eid = tree.parent_edge[w]
                    resume_fix[slot_of[w]] = len(cand_edge) + 1
                    cand_edge.append(eid)
                    cand_to_slot.append(slot_of[w])
                    edge_owner[eid] = (ui, slot_of[w])
            cand_off.append(len(cand_edge))
        for slot, pos in resume_fix.items():
            resume_at[slot] = pos

    # -- rule inspection ---------------------------------------------------

    def candidates(self, unit: int, node: int) -> list[tuple[tuple[int, int], bool]]:
        """Ordered ((from, to) edge, is_delivery) pairs for a structure node."""
        slot = self._slot(unit, node)
        out = []
        for ci in range(self.cand_off[slot], self.cand_off[slot + 1]):
            to = int(self.cand_to_slot[ci])
            if to < 0:
                out.append(((node, self.destination), True))
            else:
                out.append(((node, int(self.slot_node[to])), False))
        return out

    def _slot(self, unit: int, node: int) -> int:
        for s in range(self.unit_off[unit], self.unit_off[unit + 1]):
            if self.slot_node[s] == node:
                return int(s)
        raise KeyError(f"node {node} not in unit {unit}")


def compile_rules(rs: RoutingStructures) -> ForwardingTable:
    return ForwardingTable(rs)


def _edge_ids(g: Graph, failures) -> set[int]:
    if hasattr(failures, "failed"):
        failures = failures.failed
    out = set()
    for u, v in failures:
        try:
            out.add(g.edge_id(int(u), int(v)))
        except GraphError:
            raise ValueError(f"failure ({u}, {v}) is not a graph edge") from None
    return out


def lookup(t: ForwardingTable, ctx: PortContext, incident_failures) -> Action:
    """Resolve one forwarding decision.

    Pure function of (flow, node, incoming edge, unit, failures incident to
    the node); failures elsewhere cannot change the outcome because only
    candidate edges, all incident to the node, are consulted.
    """
    g = t.graph
    failed = _edge_ids(g, incident_failures)
    if ctx.incoming_edge is ORIGIN:
        if ctx.node != t.source or not (0 <= ctx.unit < t.nunits):
            return Action(FAIL)
        unit = ctx.unit
        slot = int(t.unit_off[unit])
        start = int(t.cand_off[slot])
    else:
        a, b = ctx.incoming_edge
        try:
            eid = g.edge_id(int(a), int(b))
        except GraphError:
            return Action(FAIL)
        owner = t.edge_owner.get(eid)
        if owner is None:
            return Action(FAIL)
        unit, child_slot = owner
        pslot = int(t.parent_slot[child_slot])
        if ctx.node == int(t.slot_node[child_slot]):
            slot = child_slot
            start = int(t.cand_off[slot])
        elif pslot >= 0 and ctx.node == int(t.slot_node[pslot]):
            slot = pslot
            start = int(t.resume_at[child_slot])
        else:
            return Action(FAIL)

    node = int(t.slot_node[slot])
    for ci in range(start, int(t.cand_off[slot + 1])):
        if int(t.cand_edge[ci]) in failed:
            continue
        to = int(t.cand_to_slot[ci])
        if to < 0:
            return Action(DELIVERED, (node, t.destination), unit)
        return Action(FORWARD, (node, int(t.slot_node[to])), unit)
    pslot = int(t.parent_slot[slot])
    if pslot < 0:
        if unit + 1 < t.nunits:
            return Action(NEXT_UNIT, None, unit + 1)
        return Action(FAIL)
    return Action(BACKTRACK, (node, int(t.slot_node[pslot])), unit)


def simulate(g: Graph, t: ForwardingTable, failures, ttl: int | None = None) -> PacketTrace:
    """Route one packet from s toward d under a static failure set.

    ttl defaults to 4*|E|, the safe structural bound (each structure edge is
    traversed at most twice per unit); smaller values are rejected.  A trace
    that hits ttl carries reason "loop", which signals a rule bug and must
    never happen.
    """
    bound = 4 * g.m
    if ttl is None:
        ttl = bound
    elif ttl < bound:
        raise ValueError(f"ttl {ttl} below the safe bound {bound} (= 4*|E|)")
    mask = np.zeros(g.m, np.uint8)
    for eid in _edge_ids(g, failures):
        mask[eid] = 1
    out_u = np.empty(ttl, np.int32)
    out_v = np.empty(ttl, np.int32)
    out_unit = np.empty(ttl, np.int32)
    status, hops = kernels.run_forwarding(
        t.unit_off, t.slot_node, t.cand_off, t.cand_edge, t.cand_to_slot,
        t.parent_slot, t.resume_at, t.destination, mask, ttl,
        out_u, out_v, out_unit)
    status = int(status)
    hops = int(hops)
    pairs = list(zip(out_u[:hops].tolist(), out_v[:hops].tolist()))
    units = out_unit[:hops].tolist()
    if status == 1:
        return PacketTrace(pairs, units, True)
    return PacketTrace(pairs, units, False,
                       "loop" if status == 2 else "exhausted")


def format_trace(trace: PacketTrace) -> str:
    lines = [f"unit={u} {a}->{b}"
             for (a, b), u in zip(trace.hops, trace.units)]
    if trace.delivered:
        lines.append(f"DELIVERED hops={trace.hop_count}")
    else:
        lines.append(f"FAILED reason={trace.reason}")
    return "\n".join(lines) + "\n"
