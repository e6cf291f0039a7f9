"""Merging a family of labeled CSPs into one segment DAG without spurious paths.

Nodes carrying the same name across input CSPs may become one DAG node, but
only when their domains and constraints agree and only when the sharing does
not manufacture start-to-end paths that correspond to no input segment.  The
merge first reorders each segment so widely shared nodes drift to the front,
then builds the DAG position by position, cloning a node under a new
apostrophed name whenever its follower set differs from the copy already
placed.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import CspInstance
from .graph import MuseInstance, build_muse, enumerate_segments

START_NAME = "__start__"
END_NAME = "__end__"


class MergeError(ValueError):
    pass


@dataclass(frozen=True)
class NamedCsp:
    """One input CSP with a name per node; names are the sharing identity."""

    csp: CspInstance
    names: tuple[str, ...]

    def __post_init__(self):
        if len(self.names) != self.csp.n:
            raise MergeError("one name per node required")
        if len(set(self.names)) != len(self.names):
            raise MergeError("names within one instance must be distinct")

    def node_of(self, name: str) -> int:
        return self.names.index(name)


@dataclass
class MergeCompatibility:
    """Per shared name, whether domains, unary and binary constraints agree."""

    domains_equal: dict[str, bool] = field(default_factory=dict)
    unary_equal: dict[str, bool] = field(default_factory=dict)
    binary_equal: dict[str, bool] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_mergeable(csps: Sequence[NamedCsp]) -> MergeCompatibility:
    """Verify the three sharing conditions for every name used more than once."""
    out = MergeCompatibility()
    owners: dict[str, list[int]] = {}
    for k, nc in enumerate(csps):
        for name in nc.names:
            owners.setdefault(name, []).append(k)
    for name, ks in sorted(owners.items()):
        if len(ks) < 2:
            continue
        first = csps[ks[0]]
        i0 = first.node_of(name)
        dom0 = first.csp.domains[i0]
        out.domains_equal[name] = True
        out.unary_equal[name] = True
        out.binary_equal[name] = True
        for k in ks[1:]:
            other = csps[k]
            i1 = other.node_of(name)
            if other.csp.domains[i1] != dom0:
                out.domains_equal[name] = False
                out.violations.append(f"{name}: domains differ (condition 1)")
            if any(
                first.csp.r1_ok(i0, a) != other.csp.r1_ok(i1, a)
                for a in sorted(dom0 & other.csp.domains[i1], key=str)
            ):
                out.unary_equal[name] = False
                out.violations.append(f"{name}: unary constraints differ (condition 2)")
            shared = set(first.names) & set(other.names) - {name}
            for third in sorted(shared):
                j0, j1 = first.node_of(third), other.node_of(third)
                mismatch = any(
                    first.csp.r2_ok(i0, a, j0, b) != other.csp.r2_ok(i1, a, j1, b)
                    for a in sorted(dom0 & other.csp.domains[i1], key=str)
                    for b in sorted(
                        first.csp.domains[j0] & other.csp.domains[j1], key=str
                    )
                )
                if mismatch:
                    out.binary_equal[name] = False
                    out.violations.append(
                        f"{name}: binary constraint against {third} differs (condition 3)"
                    )
    return out


# ---------------------------------------------------------------------------
# Segment ordering


@dataclass
class _Node:
    name: str
    next: frozenset[str] | None = None


def _node_order(segments: Sequence[Sequence[str]]):
    """Total order for ORDER-SIGMA: start greatest, end least, otherwise more
    segment occurrences first, ties by first appearance."""
    count = Counter()
    first_seen: dict[str, int] = {}
    tick = 0
    for seg in segments:
        for name in seg:
            if name not in first_seen:
                first_seen[name] = tick
                tick += 1
        for name in set(seg):
            count[name] += 1

    def key(name: str):
        if name == START_NAME:
            return (2, 0, 0)
        if name == END_NAME:
            return (0, 0, 0)
        return (1, count[name], -first_seen[name])

    return key


def order_sigma(
    segments: Sequence[Sequence[str]], j: str = START_NAME, _steps: list[int] | None = None
) -> list[list[str]]:
    """Reorder each segment so the most widely shared nodes tend earlier.

    Segments are augmented with start/end markers if absent; the markers stay
    in the output (create_dag strips them at the end).  Recursive grouping:
    the most common node smaller than j moves directly after j in all
    segments containing it, then those segments are ordered below it.
    """
    work: list[list[str]] = []
    for seg in segments:
        seg = list(seg)
        if not seg or seg[0] != START_NAME:
            seg = [START_NAME] + seg
        if seg[-1] != END_NAME:
            seg = seg + [END_NAME]
        work.append(seg)
    key = _node_order(work)
    steps = _steps if _steps is not None else []

    def put_after(seg: list[str], i: str, j: str) -> None:
        seg.remove(i)
        seg.insert(seg.index(j) + 1, i)

    def rec(z: list[list[str]], j: str) -> None:
        u: set[str] = set()
        while z:
            r = set().union(*z)
            steps.append(1)
            pool = (r - u) if (r - u) else r
            candidates = [x for x in pool if key(x) < key(j)]
            if not candidates:
                candidates = [x for x in r if key(x) < key(j)]
            i = max(candidates, key=key)
            s = [seg for seg in z if i in seg]
            z = [seg for seg in z if i not in seg]
            if i != END_NAME:
                for seg in s:
                    put_after(seg, i, j)
                    u.update(seg)
                    steps.append(len(seg))
                rec(s, i)

    rec(list(work), j)
    return work


# ---------------------------------------------------------------------------
# DAG construction


@dataclass
class DagResult:
    """Merged DAG over node names, with clones mapped back to their originals."""

    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    starts: frozenset[str]
    ends: frozenset[str]
    base_name: dict[str, str]
    steps: int = 0
    fallback: bool = False


def _strip(name: str) -> str:
    return name.rstrip("'")


def _paths(succs, starts, ends, cap: int) -> frozenset[frozenset[str]] | None:
    """Path name-set family, or None when cyclic or larger than ``cap``."""
    out: set[frozenset[str]] = set()
    stack: list[tuple[str, tuple[str, ...]]] = [(s, ()) for s in sorted(starts)]
    budget = 10000
    while stack:
        u, acc = stack.pop()
        if u in acc:
            return None
        budget -= 1
        if budget < 0:
            return None
        acc = acc + (u,)
        if u in ends:
            out.add(frozenset(acc))
            if len(out) > cap:
                return None
        for v in sorted(succs.get(u, ())):
            stack.append((v, acc))
    return frozenset(out)


def _merge_pass(ordered: list[list[str]], steps: list[int]) -> DagResult:
    segs = [[_Node(name) for name in seg] for seg in ordered]
    placed: dict[str, _Node] = {}
    g: set[tuple[str, str]] = set()
    max_len = max(len(s) for s in segs)

    for pos in range(1, max_len):
        pool = [s for s in segs if len(s) > pos]
        while pool:
            seg = pool[0]
            steps.append(1)
            if seg[pos].name == END_NAME:
                g.add((seg[pos - 1].name, END_NAME))
                pool.remove(seg)
                continue
            same_edge = [
                t for t in pool
                if len(t) > pos
                and t[pos - 1].name == seg[pos - 1].name
                and t[pos].name == seg[pos].name
            ]
            next_set = frozenset(t[pos + 1].name for t in same_edge)
            pool = [t for t in pool if t not in same_edge]
            steps.append(len(same_edge))
            name = seg[pos].name
            if name not in placed:
                node = _Node(name, next_set)
                placed[name] = node
                g.add((seg[pos - 1].name, name))
                for t in same_edge:
                    t[pos] = node
            else:
                node = placed[name]
                if node.next == next_set:
                    g.add((seg[pos - 1].name, name))
                    for t in same_edge:
                        t[pos] = node
                else:
                    new_name = name + "'"
                    existing = placed.get(new_name)
                    while existing is not None and existing.next != next_set:
                        new_name += "'"
                        existing = placed.get(new_name)
                        steps.append(1)
                    if existing is None:
                        new_node = _Node(new_name, next_set)
                        placed[new_name] = new_node
                    else:
                        new_node = existing
                        new_node.next = next_set
                    prev = placed.get(seg[pos - 1].name)
                    if prev is not None and prev.next is not None:
                        prev.next = frozenset(
                            new_name if x == name else x for x in prev.next
                        )
                    g.add((seg[pos - 1].name, new_node.name))
                    for t in same_edge:
                        t[pos] = new_node

    names = sorted({n for e in g for n in e} - {START_NAME, END_NAME})
    starts = frozenset(v for (u, v) in g if u == START_NAME)
    ends = frozenset(u for (u, v) in g if v == END_NAME)
    edges = frozenset(
        (u, v) for (u, v) in g if u != START_NAME and v != END_NAME
    )
    return DagResult(
        tuple(names), edges, starts, ends,
        {n: _strip(n) for n in names},
    )


def _fallback_dag(segments: Sequence[Sequence[str]]) -> DagResult:
    """Share nothing: every occurrence becomes a fresh clone; trivially exact."""
    used: Counter = Counter()
    nodes: list[str] = []
    edges: set[tuple[str, str]] = set()
    starts: set[str] = set()
    ends: set[str] = set()
    for seg in segments:
        prev = None
        for name in seg:
            clone = name + "'" * used[name]
            used[name] += 1
            nodes.append(clone)
            if prev is None:
                starts.add(clone)
            else:
                edges.add((prev, clone))
            prev = clone
        ends.add(prev)
    return DagResult(
        tuple(nodes), frozenset(edges), frozenset(starts), frozenset(ends),
        {n: _strip(n) for n in nodes}, fallback=True,
    )


def create_dag(segments: Sequence[Sequence[str]]) -> DagResult:
    """Build a DAG whose start-to-end path name-sets equal the input family.

    Runs the ordering pass then the position-wise merge; if the result's path
    family differs from the input under clone canonicalization (the routine is
    only expected, not guaranteed, to avoid spurious paths), falls back to the
    share-nothing DAG, which is exact by construction.
    """
    segments = [list(s) for s in segments]
    if not segments or any(not s for s in segments):
        raise MergeError("segments must be nonempty")
    for seg in segments:
        if len(set(seg)) != len(seg):
            raise MergeError(f"segment {seg} repeats a name")
    steps: list[int] = []
    ordered = order_sigma(segments, _steps=steps)
    result = _merge_pass(ordered, steps)
    result.steps = sum(steps)

    want = {frozenset(seg) for seg in segments}
    succs: dict[str, set[str]] = {}
    for u, v in result.edges:
        succs.setdefault(u, set()).add(v)
    paths = _paths(succs, result.starts, result.ends, cap=len(want))
    got = None
    if paths is not None:
        got = {frozenset(result.base_name[n] for n in path) for path in paths}
    if got != want:
        fb = _fallback_dag(segments)
        fb.steps = sum(steps)
        return fb
    return result


def assemble_muse(csps: Sequence[NamedCsp], dag: DagResult) -> MuseInstance:
    """Instantiate the merged DAG with the (merge-compatible) per-name CSP data.

    Clones share their original's domain and constraints but are distinct
    variables.  Binary tables come from any input that constrains both base
    names; the compatibility check guarantees the choice does not matter.
    """
    compat = check_mergeable(csps)
    if not compat.ok:
        raise MergeError("; ".join(compat.violations))

    node_ids = {name: k for k, name in enumerate(dag.nodes)}
    source: dict[str, tuple[NamedCsp, int]] = {}
    for nc in csps:
        for i, name in enumerate(nc.names):
            source.setdefault(name, (nc, i))

    label_set: list = []
    for name in dag.nodes:
        nc, i = source[dag.base_name[name]]
        for a in sorted(nc.csp.domains[i], key=str):
            if a not in label_set:
                label_set.append(a)
    lidx = {a: k for k, a in enumerate(label_set)}
    l = len(label_set)

    n = len(dag.nodes)
    domains = []
    r1 = np.ones((n, l), dtype=bool)
    for k, name in enumerate(dag.nodes):
        nc, i = source[dag.base_name[name]]
        domains.append(nc.csp.domains[i])
        for a in nc.csp.domains[i]:
            r1[k, lidx[a]] = nc.csp.r1_ok(i, a)

    r2: dict[tuple[int, int], np.ndarray] = {}
    for ka, name_a in enumerate(dag.nodes):
        for kb in range(ka + 1, n):
            name_b = dag.nodes[kb]
            base_a, base_b = dag.base_name[name_a], dag.base_name[name_b]
            holder = None
            for nc in csps:
                if base_a in nc.names and base_b in nc.names:
                    holder = nc
                    break
            if holder is None:
                continue
            ia, ib = holder.node_of(base_a), holder.node_of(base_b)
            tab = np.ones((l, l), dtype=bool)
            for a in holder.csp.domains[ia]:
                for b in holder.csp.domains[ib]:
                    tab[lidx[a], lidx[b]] = holder.csp.r2_ok(ia, a, ib, b)
            r2[(ka, kb)] = tab

    csp = CspInstance(tuple(label_set), tuple(domains), r1, r2, frozenset())
    edges = [(node_ids[u], node_ids[v]) for u, v in dag.edges]
    starts = [node_ids[s] for s in dag.starts]
    ends = [node_ids[e] for e in dag.ends]
    return build_muse(csp, edges, starts, ends)
