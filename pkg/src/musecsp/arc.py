"""Arc consistency over a segment DAG.

A label survives when at least one segment's nodes all offer it support, so a
zero support counter for a node pair no longer kills the label outright; it
only marks the label dead *for the segments containing that pair*.  Deadness
then spreads along the DAG through four families of support sets:

* prev/next support, per (pair, label): which neighbours of the far node still
  sustain the pair's support; emptiness kills the label for all segments
  through the pair;
* local prev/next support, per (node, label): which immediate DAG neighbours
  of the node are still compatible; emptiness proves the label dead in every
  segment and removes it from the domain.

Dummy (i, start) / (i, end) members keep boundary nodes from starving.  The
sets are seeded from DAG connectivity alone and only ever shrink.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import CspInstance, Label
from .graph import END, START, MuseInstance, dummy_name, enumerate_segments


class SeedError(ValueError):
    pass


@dataclass
class SupportState:
    """Mutable bookkeeping for one propagation run.

    Support-set members (i, x) are stored as the bare far endpoint x, with the
    reserved values START/END for the dummies; keys use global label indices.
    ``counter[(i, j)]`` is indexed by the label index of labels of i.
    """

    muse: MuseInstance
    order: str
    dom: list[set[int]]
    init_dom: tuple[tuple[int, ...], ...]
    partners: tuple[tuple[int, ...], ...]
    counter: dict[tuple[int, int], np.ndarray]
    m: dict[tuple[int, int], np.ndarray]
    worklist: deque
    prev_support: dict[tuple[int, int, int], set[int]]
    next_support: dict[tuple[int, int, int], set[int]]
    local_prev: dict[tuple[int, int], set[int]]
    local_next: dict[tuple[int, int], set[int]]
    trace: list[str] | None = None
    pops: int = 0
    decrements: int = 0
    support_removals: int = 0
    local_removals: int = 0

    # -- label-keyed views used by tests and by guided search ---------------

    def _aidx(self, a: Label) -> int:
        return self.muse.csp.label_index[a]

    def supporters(self, i: int, j: int, a: Label) -> frozenset[tuple[int, Label]]:
        """The (j, b) pairs whose admissibility label a at i co-sustains."""
        tab = self.muse.csp.r2_table(i, j)
        ai = self._aidx(a)
        labels = self.muse.csp.labels
        return frozenset((j, labels[b]) for b in self.init_dom[j] if tab[ai, b])

    def _pairs(self, table, key, i):
        xs = table.get(key)
        if xs is None:
            return frozenset()
        return frozenset((i, dummy_name(x) if x < 0 else x) for x in xs)

    def prev_support_set(self, i: int, j: int, a: Label):
        return self._pairs(self.prev_support, (i, j, self._aidx(a)), i)

    def next_support_set(self, i: int, j: int, a: Label):
        return self._pairs(self.next_support, (i, j, self._aidx(a)), i)

    def local_prev_set(self, i: int, a: Label):
        return self._pairs(self.local_prev, (i, self._aidx(a)), i)

    def local_next_set(self, i: int, a: Label):
        return self._pairs(self.local_next, (i, self._aidx(a)), i)

    def counter_value(self, i: int, j: int, a: Label) -> int:
        return int(self.counter[(i, j)][self._aidx(a)])

    def marked(self, i: int, j: int, a: Label) -> bool:
        return bool(self.m[(i, j)][self._aidx(a)])

    def domains(self) -> tuple[frozenset[Label], ...]:
        labels = self.muse.csp.labels
        return tuple(frozenset(labels[a] for a in d) for d in self.dom)


def initialize(m: MuseInstance, order: str = "fifo", trace: list[str] | None = None) -> SupportState:
    """Build counters and support sets; queue every (pair, label) with no support."""
    if order not in ("fifo", "lifo"):
        raise ValueError(f"unknown worklist order {order!r}")
    csp = m.csp
    n = csp.n
    e = m.e_pairs
    dom = [set(csp.dom_indices(i)) for i in range(n)]
    init_dom = tuple(tuple(sorted(d)) for d in dom)
    edges = m.edges

    partners: list[list[int]] = [[] for _ in range(n)]
    for (i, j) in sorted(e):
        partners[i].append(j)
    state = SupportState(
        muse=m, order=order, dom=dom, init_dom=init_dom,
        partners=tuple(tuple(p) for p in partners),
        counter={}, m={}, worklist=deque(),
        prev_support={}, next_support={}, local_prev={}, local_next={},
        trace=trace,
    )

    for (i, j) in sorted(e):
        tab = csp.r2_table(i, j)
        di, dj = init_dom[i], init_dom[j]
        cnt = np.zeros(len(csp.labels), dtype=np.int64)
        if di and dj:
            sub = tab[np.ix_(di, dj)]
            cnt[list(di)] = sub.sum(axis=1)
        mark = np.zeros(len(csp.labels), dtype=bool)
        state.counter[(i, j)] = cnt
        state.m[(i, j)] = mark
        for a in di:
            if cnt[a] == 0:
                state.worklist.append(((i, j), a))
                mark[a] = True

        # Support-set seeds depend only on connectivity, one template per pair.
        prev_base = {x for x in m.preds[j] if (i, x) in e}
        if (i, j) in edges:
            prev_base.add(j)
        if j in m.starts:
            prev_base.add(START)
        next_base = {x for x in m.succs[j] if (i, x) in e}
        if (j, i) in edges:
            next_base.add(j)
        if j in m.ends:
            next_base.add(END)
        for a in di:
            state.prev_support[(i, j, a)] = set(prev_base)
            state.next_support[(i, j, a)] = set(next_base)

    for i in range(n):
        lp = {x for x in m.preds[i] if (i, x) in e}
        if i in m.starts:
            lp.add(START)
        ln = {x for x in m.succs[i] if (i, x) in e}
        if i in m.ends:
            ln.add(END)
        for a in init_dom[i]:
            state.local_prev[(i, a)] = set(lp)
            state.local_next[(i, a)] = set(ln)
    return state


def _enqueue(state: SupportState, i: int, j: int, a: int) -> None:
    state.worklist.append(((i, j), a))
    state.m[(i, j)][a] = True


def _remove_label(state: SupportState, i: int, a: int) -> None:
    """Delete a from the domain and withdraw its support everywhere.

    Counters count supporters in the current domains, so they are decremented
    here, on actual removal, and nowhere else.  A (pair, label) that merely
    became dead for the segments through one pair keeps supporting its
    neighbours elsewhere; eroding counters on those events would prune below
    the largest domain-closure fixpoint.
    """
    if a not in state.dom[i]:
        return
    state.dom[i].discard(a)
    if state.trace is not None:
        state.trace.append(f"DEL {i} {state.muse.csp.labels[a]}")
    csp = state.muse.csp
    for j in state.partners[i]:
        tab = csp.r2_table(i, j)
        row = tab[a]
        cnt_ji = state.counter[(j, i)]
        m_ji = state.m[(j, i)]
        for b in state.init_dom[j]:
            if row[b]:
                cnt_ji[b] -= 1
                state.decrements += 1
                if cnt_ji[b] == 0 and not m_ji[b]:
                    _enqueue(state, j, i, b)


def _update_support_sets(state: SupportState, i: int, j: int, a: int) -> None:
    """Spread the death of [(i, j), a] through the support sets.

    Mirrors the five elimination triggers: counter exhaustion is handled by the
    caller; here emptied next/prev supports enqueue further pairs and emptied
    local sets delete the label itself.  Both local purge loops always run, in
    order, with no early exit.
    """
    prev = state.prev_support[(i, j, a)]
    for x in [x for x in prev if x != j and x != START]:
        prev.discard(x)
        ns = state.next_support[(i, x, a)]
        ns.discard(j)
        state.support_removals += 2
        if not ns and not state.m[(i, x)][a]:
            _enqueue(state, i, x, a)

    nxt = state.next_support[(i, j, a)]
    for x in [x for x in nxt if x != j and x != END]:
        nxt.discard(x)
        ps = state.prev_support[(i, x, a)]
        ps.discard(j)
        state.support_removals += 2
        if not ps and not state.m[(i, x)][a]:
            _enqueue(state, i, x, a)

    local_prev = state.local_prev[(i, a)]
    local_next = state.local_next[(i, a)]
    if (j, i) in state.muse.edges:
        local_prev.discard(j)
        state.local_removals += 1
    if not local_prev:
        _remove_label(state, i, a)
        for x in [x for x in local_next if x != j and x != END]:
            local_next.discard(x)
            state.local_removals += 1
            if not state.m[(i, x)][a]:
                _enqueue(state, i, x, a)

    if (i, j) in state.muse.edges:
        local_next.discard(j)
        state.local_removals += 1
    if not local_next:
        _remove_label(state, i, a)
        for x in [x for x in local_prev if x != j and x != START]:
            local_prev.discard(x)
            state.local_removals += 1
            if not state.m[(i, x)][a]:
                _enqueue(state, i, x, a)


def propagate(state: SupportState) -> SupportState:
    """Run the worklist to a fixpoint.

    A popped item [(i, j), a] says label a at i is unsupported in every
    segment through both i and j; the support sets spread that along the DAG,
    and any resulting domain removals (inside the update) withdraw support,
    which can zero further counters.
    """
    work = state.worklist
    pop = work.popleft if state.order == "fifo" else work.pop
    labels = state.muse.csp.labels
    while work:
        (i, j), a = pop()
        state.pops += 1
        if state.trace is not None:
            state.trace.append(f"POP ({i},{j}) {labels[a]}")
        _update_support_sets(state, i, j, a)
    return state


def muse_ac1(
    m: MuseInstance, order: str = "fifo", trace: list[str] | None = None
) -> tuple[MuseInstance, SupportState]:
    """Prune every label with no fully supportive segment; returns state for search."""
    state = propagate(initialize(m, order=order, trace=trace))
    pruned = m.with_csp(m.csp.with_domains(state.domains()))
    return pruned, state


def propagate_from(
    seeds: Sequence[tuple[tuple[int, int], Label]], state: SupportState
) -> SupportState:
    """Inject dead (pair, label) seeds into an initialized state and propagate."""
    csp = state.muse.csp
    for (i, j), a in seeds:
        if (i, j) not in state.muse.e_pairs:
            raise SeedError(f"({i}, {j}) is not a constrained pair of this instance")
        ai = csp.label_index.get(a)
        if ai is None or ai not in state.init_dom[i]:
            raise SeedError(f"label {a!r} is not in the initial domain of node {i}")
        if not state.m[(i, j)][ai]:
            _enqueue(state, i, j, ai)
    return propagate(state)


def oracle_muse_arc_fixpoint(m: MuseInstance) -> MuseInstance:
    """Brute-force restatement over explicitly enumerated segments.

    Deletes (i, a) unless some segment through i supports a at every other
    segment node; repeats until stable.  Independent of the engine above.
    """
    csp = m.csp
    segments = [sorted(s) for s in enumerate_segments(m)]
    doms = [set(d) for d in csp.domains]
    changed = True
    while changed:
        changed = False
        for i in range(csp.n):
            segs_i = [s for s in segments if i in s]
            for a in list(doms[i]):
                ok = any(
                    all(
                        j == i or any(csp.r2_ok(i, a, j, b) for b in doms[j])
                        for j in seg
                    )
                    for seg in segs_i
                )
                if not ok:
                    doms[i].discard(a)
                    changed = True
    return m.with_csp(csp.with_domains(doms))
