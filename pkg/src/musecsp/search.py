"""Backtracking solution extraction, optionally guided by support sets.

A solution is an assignment to one segment that satisfies every unary and
pairwise constraint inside it.  After arc consistency over the DAG, the
support state knows which labels are still viable toward which neighbours, so
the search can skip labels that only belong to other segments before paying
for a descent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .arc import SupportState
from .core import Label
from .graph import END, MuseInstance, enumerate_segments, is_segment, segment_order


@dataclass(frozen=True)
class Assignment:
    """One segment's nodes, in path order, with a chosen label per node."""

    nodes: tuple[int, ...]
    binding: tuple[tuple[int, Label], ...]

    @classmethod
    def make(cls, nodes: Iterable[int], binding: dict[int, Label]) -> "Assignment":
        nodes = tuple(nodes)
        return cls(nodes, tuple((u, binding[u]) for u in sorted(binding)))

    @property
    def segment(self) -> frozenset[int]:
        return frozenset(self.nodes)

    def label_of(self, u: int) -> Label:
        return dict(self.binding)[u]

    def items(self):
        return self.binding


def verify_solution(m: MuseInstance, a: Assignment) -> bool:
    """True iff the nodes form a segment and the binding satisfies R1 and all R2."""
    csp = m.csp
    bound = dict(a.binding)
    if set(a.nodes) != set(bound):
        return False
    if not is_segment(m, a.nodes):
        return False
    for u, lab in bound.items():
        if lab not in csp.domains[u] or not csp.r1_ok(u, lab):
            return False
    items = list(bound.items())
    for k, (u, lu) in enumerate(items):
        for v, lv in items[k + 1:]:
            if not csp.r2_ok(u, lu, v, lv):
                return False
    return True


def _label_order(m: MuseInstance, u: int) -> list[Label]:
    # Deterministic value order: global label index, i.e. insertion order into
    # the instance's label universe.
    idx = m.csp.label_index
    return sorted(m.csp.domains[u], key=idx.__getitem__)


class _Lookup:
    """Index-based domain and relation access for the search inner loops."""

    def __init__(self, m: MuseInstance):
        csp = m.csp
        self.labels = csp.labels
        self.dom_idx = [csp.dom_indices(u) for u in range(csp.n)]
        self.r1 = csp.r1
        self._tables: dict[tuple[int, int], object] = {}
        self._csp = csp

    def table(self, u: int, v: int):
        key = (u, v)
        tab = self._tables.get(key)
        if tab is None:
            tab = self._csp.r2_table(u, v)
            self._tables[key] = tab
        return tab


def _guided_ok(state: SupportState, u: int, a_idx: int, nxt: int, after: int) -> bool:
    """Support-set filter between consecutive segment nodes.

    ``nxt`` is the segment node after u (or END); ``after`` the one after that.
    The label is viable only if its local successor set still holds nxt and,
    one step further, the (u, nxt) pair's next-support still holds ``after``.
    """
    if nxt == END:
        return True
    ln = state.local_next.get((u, a_idx))
    if ln is not None and nxt not in ln:
        return False
    ns = state.next_support.get((u, nxt, a_idx))
    if ns is not None and after not in ns:
        return False
    return True


def extract_one(
    m: MuseInstance,
    state: SupportState | None = None,
    segment: Iterable[int] | None = None,
    guided: bool = True,
    stats: dict | None = None,
) -> Assignment | None:
    """Depth-first search for one verified assignment on the given segment.

    Nodes are visited in path order, labels in domain order.  With a support
    state, labels are skipped when the support sets show them to be valid only
    for segments other than the requested one; the filter never skips a label
    that is part of a solution on this segment.
    """
    if segment is None:
        segs = sorted(enumerate_segments(m), key=lambda s: sorted(s))
        if not segs:
            return None
        segment = segs[0]
    nodes = segment_order(m, segment)
    if not nodes or not is_segment(m, nodes):
        raise ValueError(f"{sorted(segment)} is not a segment of this instance")

    csp = m.csp
    look = _Lookup(m)
    labels = csp.labels
    use_state = state if (state is not None and guided) else None
    if stats is not None:
        stats.setdefault("visited", 0)

    chain = nodes + [END, END]

    def rec(t: int, chosen: list[int]) -> Assignment | None:
        if t == len(nodes):
            a = Assignment.make(nodes, {u: labels[k] for u, k in zip(nodes, chosen)})
            return a if verify_solution(m, a) else None
        u = nodes[t]
        for ai in look.dom_idx[u]:
            if stats is not None:
                stats["visited"] += 1
            if not look.r1[u, ai]:
                continue
            if use_state is not None and not _guided_ok(
                use_state, u, ai, chain[t + 1], chain[t + 2]
            ):
                continue
            if any(not look.table(u, nodes[s])[ai, chosen[s]] for s in range(t)):
                continue
            chosen.append(ai)
            found = rec(t + 1, chosen)
            if found is not None:
                return found
            chosen.pop()
        return None

    return rec(0, [])


def extract_all(
    m: MuseInstance,
    state: SupportState | None = None,
    guided: bool = True,
    stats: dict | None = None,
) -> set[Assignment]:
    """All verified assignments over all segments, deduplicated.

    Walks the DAG directly so that wiped-out branches are abandoned early; the
    support-set filter from extract_one is applied as each extension step makes
    the needed lookahead node known.
    """
    csp = m.csp
    look = _Lookup(m)
    labels = csp.labels
    use_state = state if (state is not None and guided) else None
    if stats is not None:
        stats.setdefault("visited", 0)
    out: set[Assignment] = set()

    def extend_ok(seq: list[int], chosen: list[int], v: int) -> bool:
        # v is the next node (or END).  Check u's local set toward v, and the
        # (B, u) pair's next-support toward v for the previous node B.
        if use_state is None:
            return True
        u = seq[-1]
        if v != END:
            ln = use_state.local_next.get((u, chosen[-1]))
            if ln is not None and v not in ln:
                return False
        if len(seq) >= 2:
            ns = use_state.next_support.get((seq[-2], u, chosen[-2]))
            if ns is not None and v not in ns:
                return False
        return True

    def close(seq: list[int], chosen: list[int]):
        a = Assignment.make(seq, {u: labels[k] for u, k in zip(seq, chosen)})
        if verify_solution(m, a):
            out.add(a)

    def visit(u: int, seq: list[int], chosen: list[int]):
        r1 = look.r1
        for ai in look.dom_idx[u]:
            if stats is not None:
                stats["visited"] += 1
            if not r1[u, ai]:
                continue
            ok = True
            for s, w in enumerate(seq):
                if not look.table(u, w)[ai, chosen[s]]:
                    ok = False
                    break
            if not ok:
                continue
            seq.append(u)
            chosen.append(ai)
            if u in m.ends and extend_ok(seq, chosen, END):
                close(seq, chosen)
            for v in m.succs[u]:
                if extend_ok(seq, chosen, v):
                    visit(v, seq, chosen)
            seq.pop()
            chosen.pop()

    for s in sorted(m.starts):
        visit(s, [], [])
    return out


def solution_labels(m: MuseInstance, assignments: Iterable[Assignment]) -> set[tuple[int, Label]]:
    """The (node, label) pairs used by at least one assignment."""
    used: set[tuple[int, Label]] = set()
    for a in assignments:
        used.update(a.binding)
    return used
