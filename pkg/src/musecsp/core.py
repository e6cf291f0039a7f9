"""Finite-domain binary CSPs: node consistency and support-counting arc consistency.

Instances are plain values: a global label set, one domain per node, a unary
admissibility table, and one dense label-by-label table per constrained node
pair.  The arc consistency routine keeps per-(pair, label) support counters and
a worklist of dead (node, label) pairs, which gives the usual quadratic-\
in-domain-size running time per constraint arc.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

Label = Hashable


class CspError(ValueError):
    pass


def _symmetrize(arcs: Iterable[tuple[int, int]]) -> frozenset[tuple[int, int]]:
    out = set()
    for i, j in arcs:
        if i == j:
            raise CspError(f"self arc ({i}, {i}) is not allowed")
        out.add((i, j))
        out.add((j, i))
    return frozenset(out)


@dataclass(frozen=True)
class CspInstance:
    """A binary CSP over nodes 0..n-1.

    ``r2`` maps each canonically ordered pair (i < j) to a dense bool table
    indexed by global label index; the (j, i) orientation is served by the
    transposed view so the symmetry invariant holds structurally.  Pairs with
    no stored table are implicitly all-admissible, as are unlisted entries.
    """

    labels: tuple[Label, ...]
    domains: tuple[frozenset[Label], ...]
    r1: np.ndarray
    r2: dict[tuple[int, int], np.ndarray]
    arcs: frozenset[tuple[int, int]]
    label_index: dict[Label, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.label_index:
            object.__setattr__(
                self, "label_index", {a: k for k, a in enumerate(self.labels)}
            )
        for i, dom in enumerate(self.domains):
            for a in dom:
                if a not in self.label_index:
                    raise CspError(f"domain of node {i} holds unknown label {a!r}")
        for i, j in self.r2:
            if not i < j:
                raise CspError(f"r2 tables must be keyed by ordered pairs, got {(i, j)}")

    @property
    def n(self) -> int:
        return len(self.domains)

    @property
    def nodes(self) -> range:
        return range(len(self.domains))

    @classmethod
    def build(
        cls,
        domains: Sequence[Iterable[Label]],
        arcs: Iterable[tuple[int, int]] | None = None,
        r1: Callable[[int, Label], bool] | Mapping[tuple[int, Label], bool] | None = None,
        r2: Callable[[int, Label, int, Label], bool]
        | Mapping[tuple[int, Label, int, Label], bool]
        | None = None,
        labels: Sequence[Label] | None = None,
    ) -> "CspInstance":
        """Assemble an instance from per-node domains and predicate tables.

        ``arcs`` defaults to the complete graph.  ``r1``/``r2`` accept either a
        callable or a mapping; mappings default missing entries to admissible.
        """
        doms = [tuple(d) for d in domains]
        if labels is None:
            seen: list[Label] = []
            for d in doms:
                for a in d:
                    if a not in seen:
                        seen.append(a)
            labels = tuple(seen)
        else:
            labels = tuple(labels)
        idx = {a: k for k, a in enumerate(labels)}
        n = len(doms)
        if arcs is None:
            arcs = [(i, j) for i in range(n) for j in range(n) if i != j]
        arcset = _symmetrize(arcs)

        l = len(labels)
        r1_tab = np.ones((n, l), dtype=bool)
        if r1 is not None:
            getter = r1 if callable(r1) else (lambda i, a: r1.get((i, a), True))
            for i in range(n):
                for a in doms[i]:
                    r1_tab[i, idx[a]] = bool(getter(i, a))

        r2_tabs: dict[tuple[int, int], np.ndarray] = {}
        if r2 is not None:
            getter2 = r2 if callable(r2) else (lambda i, a, j, b: r2.get((i, a, j, b), True))
            for i, j in sorted(p for p in arcset if p[0] < p[1]):
                tab = np.ones((l, l), dtype=bool)
                for a in doms[i]:
                    for b in doms[j]:
                        tab[idx[a], idx[b]] = bool(getter2(i, a, j, b))
                r2_tabs[(i, j)] = tab
        return cls(labels, tuple(frozenset(d) for d in doms), r1_tab, r2_tabs, arcset)

    # -- lookups ---------------------------------------------------------

    def r2_table(self, i: int, j: int) -> np.ndarray:
        """Dense admissibility table for the ordered pair (i, j)."""
        if i < j:
            tab = self.r2.get((i, j))
            return tab if tab is not None else np.ones((len(self.labels),) * 2, bool)
        tab = self.r2.get((j, i))
        return tab.T if tab is not None else np.ones((len(self.labels),) * 2, bool)

    def r2_ok(self, i: int, a: Label, j: int, b: Label) -> bool:
        tab = self.r2.get((i, j)) if i < j else self.r2.get((j, i))
        if tab is None:
            return True
        ia, ib = self.label_index[a], self.label_index[b]
        return bool(tab[ia, ib]) if i < j else bool(tab[ib, ia])

    def r1_ok(self, i: int, a: Label) -> bool:
        return bool(self.r1[i, self.label_index[a]])

    def dom_indices(self, i: int) -> list[int]:
        idx = self.label_index
        return sorted(idx[a] for a in self.domains[i])

    def is_wiped_out(self) -> bool:
        return any(not d for d in self.domains)

    # -- derived instances -------------------------------------------------

    def with_domains(self, domains: Sequence[Iterable[Label]]) -> "CspInstance":
        return CspInstance(
            self.labels,
            tuple(frozenset(d) for d in domains),
            self.r1,
            self.r2,
            self.arcs,
            self.label_index,
        )

    def with_arcs(self, arcs: Iterable[tuple[int, int]]) -> "CspInstance":
        return CspInstance(
            self.labels, self.domains, self.r1, self.r2, _symmetrize(arcs), self.label_index
        )

    def copy_r2(self) -> "CspInstance":
        """Clone with freshly allocated r2 tables (for algorithms that falsify entries)."""
        fresh = {p: t.copy() for p, t in self.r2.items()}
        return CspInstance(self.labels, self.domains, self.r1, fresh, self.arcs, self.label_index)

    def restrict(self, nodes: Sequence[int]) -> "CspInstance":
        """Sub-instance over ``nodes`` (renumbered, complete constraint graph)."""
        nodes = sorted(nodes)
        remap = {v: k for k, v in enumerate(nodes)}
        doms = tuple(self.domains[v] for v in nodes)
        r1 = self.r1[nodes, :]
        r2 = {}
        for u in nodes:
            for v in nodes:
                if u < v and (u, v) in self.r2:
                    key = (remap[u], remap[v])
                    tab = self.r2[(u, v)]
                    r2[key] = tab if key[0] < key[1] else tab.T
        arcs = [(remap[u], remap[v]) for u in nodes for v in nodes if u != v]
        return CspInstance(self.labels, doms, r1, r2, _symmetrize(arcs), self.label_index)


def enforce_node_consistency(csp: CspInstance) -> CspInstance:
    """Drop every label whose unary constraint fails; one pass, domains only shrink."""
    idx = csp.label_index
    new = [frozenset(a for a in dom if csp.r1[i, idx[a]]) for i, dom in enumerate(csp.domains)]
    return csp.with_domains(new)


@dataclass
class AcState:
    """Support bookkeeping for arc consistency.

    counter[(i, j)][a] is the number of labels at j compatible with a at i;
    s[(i, a)] holds the (j, b) pairs that a supports; m flags (node, label)
    pairs that were ever queued, so nothing is enqueued twice.
    """

    counter: dict[tuple[int, int], np.ndarray]
    s: dict[tuple[int, int], set[tuple[int, int]]]
    m: np.ndarray
    worklist: deque
    pops: int = 0
    decrements: int = 0


def run_ac4(csp: CspInstance, order: str = "fifo") -> tuple[CspInstance, AcState]:
    """Arc consistency by support counting; returns the pruned instance and state.

    ``order`` picks the worklist discipline (fifo or lifo); the resulting
    domains are the same either way.
    """
    if order not in ("fifo", "lifo"):
        raise ValueError(f"unknown worklist order {order!r}")
    n, l = csp.n, len(csp.labels)
    idx = csp.label_index
    dom: list[set[int]] = [set(csp.dom_indices(i)) for i in range(n)]

    counter: dict[tuple[int, int], np.ndarray] = {}
    s: dict[tuple[int, int], set[tuple[int, int]]] = {}
    m = np.zeros((n, l), dtype=bool)
    work: deque = deque()

    for (i, j) in sorted(csp.arcs):
        tab = csp.r2_table(i, j)
        cnt = np.zeros(l, dtype=np.int64)
        dj = sorted(dom[j])
        for a in sorted(dom[i]):
            total = 0
            for b in dj:
                if tab[a, b]:
                    total += 1
                    s.setdefault((j, b), set()).add((i, a))
            if total == 0 and not m[i, a]:
                dom[i].discard(a)
                work.append((i, a))
                m[i, a] = True
            cnt[a] = total
        counter[(i, j)] = cnt

    state = AcState(counter, s, m, work)
    pop = work.popleft if order == "fifo" else work.pop
    while work:
        i, a = pop()
        state.pops += 1
        for (j, b) in s.get((i, a), ()):
            cnt = counter.get((j, i))
            if cnt is None:
                continue
            cnt[b] -= 1
            state.decrements += 1
            if cnt[b] == 0 and not m[j, b]:
                dom[j].discard(b)
                work.append((j, b))
                m[j, b] = True

    labels = csp.labels
    pruned = csp.with_domains([{labels[a] for a in dom[i]} for i in range(n)])
    return pruned, state


def ac4(csp: CspInstance, order: str = "fifo") -> CspInstance:
    return run_ac4(csp, order)[0]


def oracle_arc_fixpoint(csp: CspInstance) -> CspInstance:
    """Delete labels with an unsupported constrained neighbour until none remain.

    Brute-force restatement of the arc consistency condition; intended as an
    independent check for small instances only.
    """
    doms = [set(d) for d in csp.domains]
    neighbours: dict[int, set[int]] = {}
    for i, j in csp.arcs:
        neighbours.setdefault(i, set()).add(j)
    changed = True
    while changed:
        changed = False
        for i in csp.nodes:
            for a in list(doms[i]):
                for j in neighbours.get(i, ()):
                    if not any(csp.r2_ok(i, a, j, b) for b in doms[j]):
                        doms[i].discard(a)
                        changed = True
                        break
    return csp.with_domains(doms)
