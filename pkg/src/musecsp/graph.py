"""Segment DAGs: many partially shared CSP instances in one structure.

A directed acyclic graph over the CSP's nodes, plus designated start and end
nodes, stands for the whole family of instances: every start-to-end path is one
instance ("segment").  The family itself is never materialized by the engines;
only tests and solution extraction enumerate it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .core import CspInstance

# Dummy boundary markers used in adjacency and support sets.  They are reserved
# identifiers, never real nodes.
START = -1
END = -2


def dummy_name(x: int) -> str:
    return {START: "start", END: "end"}.get(x, str(x))


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class MuseInstance:
    """A CSP together with the segment DAG over its nodes.

    ``e_pairs`` is the derived symmetric set of node pairs that co-occur on at
    least one segment; the contained CSP's arcs are always exactly e_pairs.
    """

    csp: CspInstance
    edges: frozenset[tuple[int, int]]
    starts: frozenset[int]
    ends: frozenset[int]
    e_pairs: frozenset[tuple[int, int]]
    preds: tuple[tuple[int, ...], ...] = field(repr=False)
    succs: tuple[tuple[int, ...], ...] = field(repr=False)
    topo_pos: tuple[int, ...] = field(repr=False)

    @property
    def n(self) -> int:
        return self.csp.n

    def prev_edge(self, i: int) -> set[tuple[int, int]]:
        """Incoming adjacency of i, as (j, i) pairs, plus (start, i) for start nodes."""
        out = {(j, i) for j in self.preds[i]}
        if i in self.starts:
            out.add((START, i))
        return out

    def next_edge(self, i: int) -> set[tuple[int, int]]:
        """Outgoing adjacency of i, as (i, j) pairs, plus (i, end) for end nodes."""
        out = {(i, j) for j in self.succs[i]}
        if i in self.ends:
            out.add((i, END))
        return out

    def with_csp(self, csp: CspInstance) -> "MuseInstance":
        return MuseInstance(csp, self.edges, self.starts, self.ends, self.e_pairs,
                            self.preds, self.succs, self.topo_pos)


def _toposort(n: int, succs: dict[int, set[int]]) -> list[int]:
    indeg = [0] * n
    for u, vs in succs.items():
        for v in vs:
            indeg[v] += 1
    ready = [u for u in range(n) if indeg[u] == 0]
    order: list[int] = []
    while ready:
        u = ready.pop()
        order.append(u)
        for v in succs.get(u, ()):
            indeg[v] -= 1
            if indeg[v] == 0:
                ready.append(v)
    if len(order) != n:
        raise GraphError("segment graph contains a cycle")
    return order


def build_muse(
    csp: CspInstance,
    edges: Iterable[tuple[int, int]],
    starts: Iterable[int],
    ends: Iterable[int],
) -> MuseInstance:
    """Derive the constraint-pair set and adjacency for a segment DAG.

    Two nodes share a segment exactly when one reaches the other, given that
    every node lies on some start-to-end path; nodes that do not are rejected
    rather than silently dropped.
    """
    n = csp.n
    edges = frozenset((int(i), int(j)) for i, j in edges)
    starts = frozenset(int(i) for i in starts)
    ends = frozenset(int(i) for i in ends)
    if not starts or not ends:
        raise GraphError("at least one start node and one end node are required")
    for i, j in edges:
        if i == j:
            raise GraphError(f"self edge on node {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge ({i}, {j}) leaves the node range")
    for i in starts | ends:
        if not 0 <= i < n:
            raise GraphError(f"boundary node {i} out of range")

    succs: dict[int, set[int]] = {}
    preds: dict[int, set[int]] = {}
    for i, j in edges:
        succs.setdefault(i, set()).add(j)
        preds.setdefault(j, set()).add(i)
    order = _toposort(n, succs)

    # Reachability as bitmasks, including each node itself.
    reach = [0] * n
    for u in reversed(order):
        mask = 1 << u
        for v in succs.get(u, ()):
            mask |= reach[v]
        reach[u] = mask

    from_start = 0
    for s in starts:
        from_start |= reach[s]
    co_end = 0
    rev_reach = [0] * n
    for u in order:
        mask = 1 << u
        for p in preds.get(u, ()):
            mask |= rev_reach[p]
        rev_reach[u] = mask
    for e in ends:
        co_end |= rev_reach[e]
    for u in range(n):
        if not (from_start >> u) & 1:
            raise GraphError(f"node {u} is unreachable from every start node")
        if not (co_end >> u) & 1:
            raise GraphError(f"node {u} cannot reach any end node")

    e_pairs = set()
    for i in range(n):
        for j in range(n):
            if i != j and ((reach[i] >> j) & 1 or (reach[j] >> i) & 1):
                e_pairs.add((i, j))

    topo_pos = [0] * n
    for pos, u in enumerate(order):
        topo_pos[u] = pos

    return MuseInstance(
        csp.with_arcs(e_pairs) if e_pairs else csp.with_arcs([]),
        edges,
        starts,
        ends,
        frozenset(e_pairs),
        tuple(tuple(sorted(preds.get(i, ()))) for i in range(n)),
        tuple(tuple(sorted(succs.get(i, ()))) for i in range(n)),
        tuple(topo_pos),
    )


def chain_muse(csp: CspInstance) -> MuseInstance:
    """Single-segment instance: nodes 0..n-1 in a chain."""
    n = csp.n
    return build_muse(csp, [(i, i + 1) for i in range(n - 1)], [0], [n - 1])


def enumerate_segments(m: MuseInstance) -> frozenset[frozenset[int]]:
    """Node sets of all start-to-end paths; exponential, test and desk scale only."""
    out: set[frozenset[int]] = set()

    def walk(u: int, acc: list[int]):
        acc.append(u)
        if u in m.ends:
            out.add(frozenset(acc))
        for v in m.succs[u]:
            walk(v, acc)
        acc.pop()

    for s in sorted(m.starts):
        walk(s, [])
    return frozenset(out)


def segment_order(m: MuseInstance, segment: Iterable[int]) -> list[int]:
    """Nodes of a segment in path order.

    Segment nodes are pairwise comparable under reachability, so any global
    topological position sorts them into the order the path visits them.
    """
    return sorted(segment, key=lambda u: m.topo_pos[u])


def is_segment(m: MuseInstance, segment: Iterable[int]) -> bool:
    """Cheap membership test: the set must trace one start-to-end path exactly."""
    nodes = list(segment)
    if not nodes or len(set(nodes)) != len(nodes):
        return False
    path = segment_order(m, nodes)
    if len(path) != len(nodes):
        return False
    if path[0] not in m.starts or path[-1] not in m.ends:
        return False
    return all(b in m.succs[a] for a, b in zip(path, path[1:]))
