"""Path consistency over a segment DAG.

The unit of work is a quintuple [(i, j), k, a, b]: the pair of labels (a at i,
b at j) considered against a third node k that shares segments with both.
Counters track how many labels at k still support the pair; support sets
mirror the arc-consistency ones, lifted one level, with the far node's
neighbourhood tracked around k and local sets around i per (pair, label pair).
When a local set empties, the binary relation entry itself is falsified, in
both orientations at once.

Of the enqueue sites, one writes the mirrored quintuple with the labels in
pair order ([(j, i), x, b, a]); the labels always follow their nodes here,
since attaching a's value to j would corrupt the tables.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import CspInstance, Label
from .graph import END, START, MuseInstance, dummy_name, enumerate_segments
from .arc import muse_ac1


@dataclass
class PathSupportState:
    """Mutable bookkeeping for one path-consistency run.

    Keys use global label indices; support-set members (i, x) store the bare
    endpoint x with START/END for dummies.  ``counter[(i, j, k)]`` is indexed
    [a, b]; ``s_cube[(i, j, k)][a, b, c]`` records the initial mutual
    compatibility of a at i, b at j, c at k.
    """

    muse: MuseInstance
    order: str
    counter: dict[tuple[int, int, int], np.ndarray]
    m: dict[tuple[int, int, int], np.ndarray]
    s_cube: dict[tuple[int, int, int], np.ndarray]
    worklist: deque
    prev_support: dict[tuple[int, int, int, int, int], set[int]]
    next_support: dict[tuple[int, int, int, int, int], set[int]]
    local_prev: dict[tuple[int, int, int, int], set[int]]
    local_next: dict[tuple[int, int, int, int], set[int]]
    thirds: dict[tuple[int, int], tuple[int, ...]]
    init_dom: tuple[tuple[int, ...], ...]
    trace: list[str] | None = None
    pops: int = 0
    decrements: int = 0
    support_removals: int = 0
    local_removals: int = 0
    falsified: int = 0

    def _aidx(self, a: Label) -> int:
        return self.muse.csp.label_index[a]

    def _pairs(self, table, key, i):
        xs = table.get(key)
        if xs is None:
            return frozenset()
        return frozenset((i, dummy_name(x) if x < 0 else x) for x in xs)

    def prev_support_set(self, i, j, k, a, b):
        return self._pairs(self.prev_support, (i, j, k, self._aidx(a), self._aidx(b)), i)

    def next_support_set(self, i, j, k, a, b):
        return self._pairs(self.next_support, (i, j, k, self._aidx(a), self._aidx(b)), i)

    def local_prev_set(self, i, j, a, b):
        return self._pairs(self.local_prev, (i, j, self._aidx(a), self._aidx(b)), i)

    def local_next_set(self, i, j, a, b):
        return self._pairs(self.local_next, (i, j, self._aidx(a), self._aidx(b)), i)

    def counter_value(self, i, j, k, a, b) -> int:
        return int(self.counter[(i, j, k)][self._aidx(a), self._aidx(b)])


def _initialize(m: MuseInstance, order: str, trace) -> PathSupportState:
    csp = m.csp
    n, l = csp.n, len(csp.labels)
    e = m.e_pairs
    edges = m.edges
    init_dom = tuple(tuple(sorted(csp.dom_indices(i))) for i in range(n))

    thirds = {
        (i, j): tuple(k for k in range(n) if k not in (i, j) and (i, k) in e and (j, k) in e)
        for (i, j) in e
    }

    state = PathSupportState(
        muse=m, order=order, counter={}, m={}, s_cube={}, worklist=deque(),
        prev_support={}, next_support={}, local_prev={}, local_next={},
        thirds=thirds, init_dom=init_dom, trace=trace,
    )

    # Structural templates shared by every label pair of a given node triple.
    prev_base: dict[tuple[int, int, int], set[int]] = {}
    next_base: dict[tuple[int, int, int], set[int]] = {}
    local_prev_base: dict[tuple[int, int], set[int]] = {}
    local_next_base: dict[tuple[int, int], set[int]] = {}
    for (i, j) in sorted(e):
        near_j = lambda x: x == j or (j, x) in e
        lp = {x for x in m.preds[i] if (i, x) in e and near_j(x)}
        if i in m.starts:
            lp.add(START)
        ln = {x for x in m.succs[i] if (i, x) in e and near_j(x)}
        if i in m.ends:
            ln.add(END)
        local_prev_base[(i, j)] = lp
        local_next_base[(i, j)] = ln
        for k in thirds[(i, j)]:
            pb = {x for x in m.preds[k] if (i, x) in e and near_j(x)}
            if (i, k) in edges:
                pb.add(k)
            if k in m.starts:
                pb.add(START)
            nb = {x for x in m.succs[k] if (i, x) in e and near_j(x)}
            if (k, i) in edges:
                nb.add(k)
            if k in m.ends:
                nb.add(END)
            prev_base[(i, j, k)] = pb
            next_base[(i, j, k)] = nb

    for (i, j) in sorted(e):
        tab_ij = csp.r2_table(i, j)
        di, dj = init_dom[i], init_dom[j]
        for k in thirds[(i, j)]:
            dk = init_dom[k]
            tab_ik = csp.r2_table(i, k)
            tab_kj = csp.r2_table(k, j)
            cnt = np.zeros((l, l), dtype=np.int64)
            mark = np.zeros((l, l), dtype=bool)
            cube = np.zeros((l, l, l), dtype=bool)
            state.counter[(i, j, k)] = cnt
            state.m[(i, j, k)] = mark
            state.s_cube[(i, j, k)] = cube
            for a in di:
                row_ik = tab_ik[a]
                for b in dj:
                    if not tab_ij[a, b]:
                        continue
                    total = 0
                    for c in dk:
                        if row_ik[c] and tab_kj[c, b]:
                            total += 1
                            cube[a, b, c] = True
                    cnt[a, b] = total
                    if total == 0:
                        state.worklist.append(((i, j), k, a, b))
                        mark[a, b] = True
                    state.prev_support[(i, j, k, a, b)] = set(prev_base[(i, j, k)])
                    state.next_support[(i, j, k, a, b)] = set(next_base[(i, j, k)])
        for a in di:
            for b in dj:
                if tab_ij[a, b]:
                    state.local_prev[(i, j, a, b)] = set(local_prev_base[(i, j)])
                    state.local_next[(i, j, a, b)] = set(local_next_base[(i, j)])
    return state


def _enqueue_pair(state: PathSupportState, i, j, x, a, b) -> None:
    """Queue [(i, j), x, a, b] and its mirror, flagging both."""
    state.worklist.append(((i, j), x, a, b))
    state.m[(i, j, x)][a, b] = True
    state.m[(j, i, x)][b, a] = True
    state.worklist.append(((j, i), x, b, a))


def _falsify(state: PathSupportState, csp: CspInstance, i, j, a, b) -> None:
    """Zero one relation entry and withdraw the triples it took part in.

    Counters count supporting labels against the current relation, so they
    are decremented here, when an entry actually flips, and nowhere else; a
    quintuple that is merely dead for the segments through one triple keeps
    supporting elsewhere.  The live-triple cube prevents double withdrawal
    when a triple's second leg is falsified later.
    """
    tab = csp.r2_table(i, j)
    if not tab[a, b]:
        return
    # The transposed view serves the mirrored orientation, so one write
    # falsifies both directions.
    tab[a, b] = False
    state.falsified += 1
    if state.trace is not None:
        labels = csp.labels
        state.trace.append(f"FALSIFY {i} {labels[a]} {j} {labels[b]}")
    for t in state.thirds[(i, j)]:
        cube = state.s_cube[(i, j, t)]
        alive = cube[a, b]
        for y in state.init_dom[t]:
            if not alive[y]:
                continue
            for (p, q, k, d, e, c) in (
                (i, j, t, a, b, y),
                (j, i, t, b, a, y),
                (i, t, j, a, y, b),
                (t, i, j, y, a, b),
                (j, t, i, b, y, a),
                (t, j, i, y, b, a),
            ):
                state.s_cube[(p, q, k)][d, e, c] = False
            # The dying leg joins (i, a) and (j, b); the triple's third value
            # no longer supports the two pairs that used it through t's node.
            for (p, q, k, d, e) in ((i, t, j, a, y), (j, t, i, b, y)):
                cnt = state.counter[(p, q, k)]
                cnt[d, e] -= 1
                state.counter[(q, p, k)][e, d] -= 1
                state.decrements += 2
                if cnt[d, e] == 0 and not state.m[(p, q, k)][d, e]:
                    _enqueue_pair(state, p, q, k, d, e)


def _update_support_sets(state: PathSupportState, csp, i, j, k, a, b) -> None:
    prev = state.prev_support[(i, j, k, a, b)]
    for x in [x for x in prev if x not in (j, k, START)]:
        prev.discard(x)
        ns = state.next_support[(i, j, x, a, b)]
        ns.discard(k)
        state.support_removals += 2
        if not ns and not state.m[(i, j, x)][a, b]:
            _enqueue_pair(state, i, j, x, a, b)

    nxt = state.next_support[(i, j, k, a, b)]
    for x in [x for x in nxt if x not in (j, k, END)]:
        nxt.discard(x)
        ps = state.prev_support[(i, j, x, a, b)]
        ps.discard(k)
        state.support_removals += 2
        if not ps and not state.m[(i, j, x)][a, b]:
            _enqueue_pair(state, i, j, x, a, b)

    local_prev = state.local_prev[(i, j, a, b)]
    local_next = state.local_next[(i, j, a, b)]
    if (k, i) in state.muse.edges:
        local_prev.discard(k)
        state.local_removals += 1
    if not local_prev:
        _falsify(state, csp, i, j, a, b)
        for x in [x for x in local_next if x not in (j, k, END)]:
            local_next.discard(x)
            state.local_removals += 1
            if not state.m[(i, j, x)][a, b]:
                _enqueue_pair(state, i, j, x, a, b)

    if (i, k) in state.muse.edges:
        local_next.discard(k)
        state.local_removals += 1
    if not local_next:
        _falsify(state, csp, i, j, a, b)
        for x in [x for x in local_prev if x not in (j, k, START)]:
            local_prev.discard(x)
            state.local_removals += 1
            if not state.m[(i, j, x)][a, b]:
                _enqueue_pair(state, i, j, x, a, b)


def _propagate(state: PathSupportState, csp: CspInstance) -> None:
    """Worklist loop: a popped quintuple spreads deadness through the support
    sets; any falsification inside the update withdraws the entry's triples,
    which can zero further counters."""
    work = state.worklist
    pop = work.popleft if state.order == "fifo" else work.pop
    labels = csp.labels
    while work:
        (i, j), k, a, b = pop()
        state.pops += 1
        if state.trace is not None:
            state.trace.append(f"POP ({i},{j}) {k} {labels[a]} {labels[b]}")
        _update_support_sets(state, csp, i, j, k, a, b)


def _materialized(m: MuseInstance) -> MuseInstance:
    """Working copy whose r2 tables exist for every constrained pair.

    Implicit all-true pairs must become real arrays before a falsification can
    stick.
    """
    csp = m.csp
    l = len(csp.labels)
    fresh: dict[tuple[int, int], np.ndarray] = {}
    for (i, j) in m.e_pairs:
        if i < j:
            tab = csp.r2.get((i, j))
            fresh[(i, j)] = tab.copy() if tab is not None else np.ones((l, l), dtype=bool)
    for key, tab in csp.r2.items():
        fresh.setdefault(key, tab.copy())
    return m.with_csp(
        CspInstance(csp.labels, csp.domains, csp.r1, fresh, csp.arcs, csp.label_index)
    )


def muse_pc1(
    m: MuseInstance, order: str = "fifo", trace: list[str] | None = None
) -> tuple[MuseInstance, PathSupportState]:
    """Falsify binary-relation entries unsupported in every shared segment.

    Domains are left untouched; only r2 entries are zeroed (symmetrically).
    Returns the instance with the updated relation and the final state.
    """
    if order not in ("fifo", "lifo"):
        raise ValueError(f"unknown worklist order {order!r}")
    working = _materialized(m)
    state = _initialize(working, order, trace)
    _propagate(state, working.csp)
    return working, state


def oracle_muse_path_fixpoint(m: MuseInstance) -> MuseInstance:
    """Brute-force restatement over enumerated segments; test oracle.

    An admissible (a at i, b at j) stays only if some segment holding both
    nodes supports it through every third node of that segment.  Falsification
    is symmetric; iterate until stable.  Pairs sharing no segment are vacuous.
    """
    working = _materialized(m)
    csp = working.csp
    segments = [sorted(s) for s in enumerate_segments(working)]
    doms = [sorted(csp.domains[i], key=csp.label_index.__getitem__) for i in range(csp.n)]

    def supported(i, a, j, b) -> bool:
        for seg in segments:
            if i not in seg or j not in seg:
                continue
            if all(
                k in (i, j) or any(csp.r2_ok(i, a, k, c) and csp.r2_ok(k, c, j, b) for c in doms[k])
                for k in seg
            ):
                return True
        return False

    pairs = sorted(p for p in working.e_pairs if p[0] < p[1])
    changed = True
    while changed:
        changed = False
        for (i, j) in pairs:
            tab = csp.r2_table(i, j)
            for a in doms[i]:
                ai = csp.label_index[a]
                for b in doms[j]:
                    bi = csp.label_index[b]
                    if tab[ai, bi] and not supported(i, a, j, b):
                        tab[ai, bi] = False
                        changed = True
    return working


def _domains_equal(x: MuseInstance, y: MuseInstance) -> bool:
    return x.csp.domains == y.csp.domains


def _r2_equal(x: MuseInstance, y: MuseInstance) -> bool:
    for p in sorted(x.e_pairs):
        if not np.array_equal(x.csp.r2_table(*p), y.csp.r2_table(*p)):
            return False
    return True


def muse_ac_pc_fixpoint(m: MuseInstance, start: str = "ac") -> MuseInstance:
    """Alternate arc and path consistency until neither changes anything."""
    if start not in ("ac", "pc"):
        raise ValueError(f"unknown starting pass {start!r}")
    passes = ("ac", "pc") if start == "ac" else ("pc", "ac")
    cur = m
    while True:
        changed = False
        for which in passes:
            if which == "ac":
                nxt, _ = muse_ac1(cur)
                changed |= not _domains_equal(cur, nxt)
            else:
                nxt, _ = muse_pc1(cur)
                changed |= not _r2_equal(cur, nxt)
            cur = nxt
        if not changed:
            break
    return cur
