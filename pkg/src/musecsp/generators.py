"""Random segment-DAG instances: tree and lattice topologies, seeded.

Constraints are generated only for node pairs that share a segment; a pair's
relation is a single table shared by every path through the pair.  The RNG is
numpy's PCG64 via default_rng, so a seed fully determines an instance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CspInstance
from .graph import MuseInstance, build_muse, enumerate_segments


@dataclass(frozen=True)
class TopologySpec:
    """Shape and constraint parameters for one random instance family."""

    kind: str  # "tree" or "lattice"
    branching: int
    path_length: int
    labels: int
    p: float
    instances: int = 6
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("tree", "lattice"):
            raise ValueError(f"unknown topology {self.kind!r}")
        if self.branching < 1 or self.path_length < 1 or self.labels < 1:
            raise ValueError("branching, path length and labels must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("constraint probability must lie in [0, 1]")


def _tree_edges(branching: int, depth: int):
    """Complete tree: one root, every non-leaf has `branching` children,
    root-to-leaf paths have `depth` nodes."""
    edges = []
    level = [0]
    nodes = 1
    for _ in range(depth - 1):
        nxt = []
        for u in level:
            for _ in range(branching):
                v = nodes
                nodes += 1
                edges.append((u, v))
                nxt.append(v)
        level = nxt
    return nodes, edges, [0], level


def _lattice_edges(branching: int, depth: int):
    """`depth` layers of `branching` parallel nodes, fully connected layer to layer."""
    nodes = branching * depth
    edges = []
    for layer in range(depth - 1):
        for u in range(layer * branching, (layer + 1) * branching):
            for v in range((layer + 1) * branching, (layer + 2) * branching):
                edges.append((u, v))
    starts = list(range(branching))
    ends = list(range((depth - 1) * branching, nodes))
    return nodes, edges, starts, ends


def gen_random(spec: TopologySpec, index: int = 0) -> MuseInstance:
    """One random instance; ``index`` selects among the spec's instances."""
    rng = np.random.default_rng((spec.seed, index))
    if spec.kind == "tree":
        n, edges, starts, ends = _tree_edges(spec.branching, spec.path_length)
    else:
        n, edges, starts, ends = _lattice_edges(spec.branching, spec.path_length)

    labels = tuple(range(spec.labels))
    base = CspInstance.build([labels] * n, arcs=[], labels=labels)
    skeleton = build_muse(base, edges, starts, ends)

    l = spec.labels
    r2 = {}
    for (i, j) in sorted(p for p in skeleton.e_pairs if p[0] < p[1]):
        r2[(i, j)] = rng.random((l, l)) < spec.p
    csp = CspInstance(labels, base.domains, base.r1, r2, frozenset())
    return build_muse(csp, edges, starts, ends)


def random_muse(
    rng: np.random.Generator,
    max_nodes: int = 6,
    max_labels: int = 4,
    max_segments: int = 4,
    p: float = 0.5,
    chain: bool = False,
) -> MuseInstance:
    """Small random instance for oracle cross-checks.

    Draws DAG shapes by rejection until every node lies on a segment and the
    segment count stays within bounds; constraints are iid with tightness p.
    """
    while True:
        n = int(rng.integers(2, max_nodes + 1))
        l = int(rng.integers(1, max_labels + 1))
        if chain:
            edges = [(i, i + 1) for i in range(n - 1)]
            starts, ends = [0], [n - 1]
        else:
            edges = []
            for i in range(n):
                for j in range(i + 1, n):
                    if rng.random() < 0.4:
                        edges.append((i, j))
            starts = [i for i in range(n) if not any(e[1] == i for e in edges)]
            ends = [i for i in range(n) if not any(e[0] == i for e in edges)]
        labels = tuple(range(l))
        base = CspInstance.build([labels] * n, arcs=[], labels=labels)
        try:
            skeleton = build_muse(base, edges, starts, ends)
        except ValueError:
            continue
        if not chain and len(enumerate_segments(skeleton)) > max_segments:
            continue
        r2 = {}
        for (i, j) in sorted(pp for pp in skeleton.e_pairs if pp[0] < pp[1]):
            r2[(i, j)] = rng.random((l, l)) < p
        csp = CspInstance(labels, base.domains, base.r1, r2, frozenset())
        return build_muse(csp, edges, starts, ends)
