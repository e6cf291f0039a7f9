"""Desk-scale experiments: pruning profiles over constraint tightness, and
the cost of extraction with and without arc consistency over the DAG."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .arc import muse_ac1
from .cdg import build_network, builtin_grammar, full_lattice, node_consistent
from .core import ac4
from .generators import TopologySpec, gen_random
from .graph import MuseInstance, enumerate_segments, segment_order
from .search import extract_all, solution_labels

RNG_NAME = "PCG64"


@dataclass(frozen=True)
class ProfileRow:
    """Mean label counts at one constraint probability."""

    p: float
    after: float
    solution: float
    csp_ac: float
    unused: float


@dataclass(frozen=True)
class ProfileConfig:
    kind: str
    branching: int
    path_length: int
    labels: int
    instances: int = 6
    seed: int = 0
    p_values: tuple[float, ...] = tuple(round(0.05 * k, 2) for k in range(1, 20))


def _segment_solution_marks(csp, nodes: list[int]) -> set[tuple[int, object]]:
    """(node, label) pairs used by at least one full assignment of ``nodes``.

    Joint-consistency table built by successive tensor intersection; path
    lengths here are small (profile topologies have 4-node segments).
    """
    doms = [sorted(csp.domains[u], key=str) for u in nodes]
    if any(not d for d in doms):
        return set()
    k = len(nodes)
    shape = tuple(len(d) for d in doms)
    ok = np.ones(shape, dtype=bool)
    for s in range(k):
        for t in range(s + 1, k):
            tab = np.array(
                [[csp.r2_ok(nodes[s], a, nodes[t], b) for b in doms[t]] for a in doms[s]]
            )
            view = [None] * k
            view[s] = slice(None)
            view[t] = slice(None)
            ok &= tab[tuple(view)]
    used: set[tuple[int, object]] = set()
    for s in range(k):
        axes = tuple(q for q in range(k) if q != s)
        alive = ok.any(axis=axes)
        used.update((nodes[s], doms[s][q]) for q in range(len(doms[s])) if alive[q])
    return used


def profile_instance(m: MuseInstance) -> tuple[int, int, int]:
    """(labels after DAG arc consistency, labels in some solution, labels
    surviving plain arc consistency on at least one extracted segment)."""
    pruned, _ = muse_ac1(m)
    after = sum(len(d) for d in pruned.csp.domains)

    segments = [segment_order(pruned, s) for s in enumerate_segments(pruned)]
    csp_ac_marks: set[tuple[int, object]] = set()
    solution_marks: set[tuple[int, object]] = set()
    for nodes in segments:
        sub = pruned.csp.restrict(nodes)
        surv = ac4(sub)
        for local, u in enumerate(sorted(nodes)):
            csp_ac_marks.update((u, a) for a in surv.domains[local])
        solution_marks |= _segment_solution_marks(pruned.csp, nodes)
    return after, len(solution_marks), len(csp_ac_marks)


def run_profile(cfg: ProfileConfig) -> list[ProfileRow]:
    rows = []
    for p in cfg.p_values:
        spec = TopologySpec(cfg.kind, cfg.branching, cfg.path_length, cfg.labels,
                            p, cfg.instances, cfg.seed)
        after = []
        sol = []
        seg_ac = []
        for k in range(cfg.instances):
            a, s, c = profile_instance(gen_random(spec, k))
            after.append(a)
            sol.append(s)
            seg_ac.append(c)
        rows.append(ProfileRow(
            p,
            statistics.mean(after),
            statistics.mean(sol),
            statistics.mean(seg_ac),
            statistics.mean(after) - statistics.mean(seg_ac),
        ))
    return rows


def profile_csv(cfg: ProfileConfig, rows: list[ProfileRow]) -> str:
    head = [
        f"# rng={RNG_NAME} seed={cfg.seed} kind={cfg.kind} branching={cfg.branching}"
        f" path_length={cfg.path_length} labels={cfg.labels} instances={cfg.instances}",
        "p,after,solution,csp_ac,unused",
    ]
    for r in rows:
        head.append(f"{r.p},{r.after:.4f},{r.solution:.4f},{r.csp_ac:.4f},{r.unused:.4f}")
    return "\n".join(head) + "\n"


# ---------------------------------------------------------------------------
# Timing


@dataclass(frozen=True)
class TimingRow:
    n: int
    t_raw: float
    t_muse: float


def _lattice_for(language: str, n: int):
    if language == "abc":
        return full_lattice(["a", "b", "c"], 3 * n), builtin_grammar("g2")
    if language == "ww":
        return full_lattice(["a", "b", "c"], 2 * n), builtin_grammar("g3")
    raise ValueError(f"unknown language {language!r}")


def run_timing(language: str, sizes, reps: int = 5) -> list[TimingRow]:
    """Extraction cost with vs without DAG arc consistency.

    The network is built and made node consistent once per size (both paths
    need it); t_raw times plain unguided backtracking extraction, t_muse times
    arc consistency plus guided extraction.  Rows carry medians of ``reps``
    wall-clock repetitions.
    """
    rows = []
    for n in sizes:
        wg, grammar = _lattice_for(language, n)
        net = build_network(wg, grammar)
        m = node_consistent(net)
        raw_times = []
        muse_times = []
        for _ in range(reps):
            t0 = time.perf_counter()
            raw = extract_all(m, state=None)
            raw_times.append(time.perf_counter() - t0)
            t0 = time.perf_counter()
            pruned, state = muse_ac1(m)
            guided = extract_all(pruned, state)
            muse_times.append(time.perf_counter() - t0)
            assert {a.binding for a in raw} == {a.binding for a in guided}
        rows.append(TimingRow(n, statistics.median(raw_times), statistics.median(muse_times)))
    return rows


def timing_csv(language: str, rows: list[TimingRow], reps: int = 5) -> str:
    out = [f"# language={language} reps={reps} times=seconds(median)", "n,t_raw,t_muse"]
    for r in rows:
        out.append(f"{r.n},{r.t_raw:.6f},{r.t_muse:.6f}")
    return "\n".join(out) + "\n"
