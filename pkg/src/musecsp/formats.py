"""Line-oriented text formats: instances, word graphs, share maps.

Instance files:

    NODES <n>                nodes are 0..n-1
    LABELS <name>...         the global label set
    DOMAIN <i>: <name>...    default: the full label set
    R1 <i> <a>: 0|1          default 1
    R2 <i> <a> <j> <b>: 0|1  default 1; stored symmetrically
    EDGE <i> <j>             segment-DAG edge
    START <i> / END <i>      segment boundary nodes

Serialization is canonical: sections in the order above, indices ascending,
and only non-default R1/R2 entries written, so parse-serialize-parse is the
identity on canonical text.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CspInstance
from .graph import MuseInstance, build_muse
from .cdg import Word, WordGraph


class FormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_instance(text: str) -> MuseInstance:
    n = None
    labels: list[str] | None = None
    domains: dict[int, list[str]] = {}
    r1_entries: list[tuple[int, str, bool]] = []
    r2_entries: list[tuple[int, str, int, str, bool]] = []
    edges: list[tuple[int, int]] = []
    starts: list[int] = []
    ends: list[int] = []

    def bad(lineno, msg):
        raise FormatError(lineno, msg)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        try:
            if key == "NODES":
                n = int(rest)
            elif key == "LABELS":
                labels = rest.split()
            elif key == "DOMAIN":
                head, _, body = rest.partition(":")
                domains[int(head)] = body.split()
            elif key == "R1":
                head, _, val = rest.partition(":")
                i, a = head.split()
                r1_entries.append((int(i), a, bool(int(val))))
            elif key == "R2":
                head, _, val = rest.partition(":")
                i, a, j, b = head.split()
                r2_entries.append((int(i), a, int(j), b, bool(int(val))))
            elif key == "EDGE":
                i, j = rest.split()
                edges.append((int(i), int(j)))
            elif key == "START":
                starts.append(int(rest))
            elif key == "END":
                ends.append(int(rest))
            else:
                bad(lineno, f"unknown section keyword {key!r}")
        except FormatError:
            raise
        except Exception as exc:
            bad(lineno, f"malformed {key} line ({exc})")

    if n is None:
        raise FormatError(0, "missing NODES line")
    if labels is None:
        raise FormatError(0, "missing LABELS line")
    doms = [domains.get(i, list(labels)) for i in range(n)]
    for i, dom in enumerate(doms):
        for a in dom:
            if a not in labels:
                raise FormatError(0, f"domain of node {i} uses unknown label {a!r}")

    lidx = {a: k for k, a in enumerate(labels)}
    l = len(labels)
    r1 = np.ones((n, l), dtype=bool)
    for i, a, v in r1_entries:
        r1[i, lidx[a]] = v
    r2: dict[tuple[int, int], np.ndarray] = {}

    def table(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in r2:
            r2[key] = np.ones((l, l), dtype=bool)
        return r2[key] if i < j else r2[key].T

    for i, a, j, b, v in r2_entries:
        if i == j:
            raise FormatError(0, f"R2 entry with identical nodes {i}")
        table(i, j)[lidx[a], lidx[b]] = v

    csp = CspInstance(tuple(labels), tuple(frozenset(d) for d in doms), r1, r2, frozenset())
    return build_muse(csp, edges, starts, ends)


def serialize_instance(m: MuseInstance) -> str:
    csp = m.csp
    n = csp.n
    labels = csp.labels
    out = [f"NODES {n}", "LABELS " + " ".join(str(a) for a in labels)]
    for i in range(n):
        dom = sorted(csp.domains[i], key=csp.label_index.__getitem__)
        out.append(f"DOMAIN {i}: " + " ".join(str(a) for a in dom))
    for i in range(n):
        for k, a in enumerate(labels):
            if not csp.r1[i, k]:
                out.append(f"R1 {i} {a}: 0")
    for (i, j) in sorted(csp.r2):
        tab = csp.r2[(i, j)]
        for ai, a in enumerate(labels):
            for bi, b in enumerate(labels):
                if not tab[ai, bi]:
                    out.append(f"R2 {i} {a} {j} {b}: 0")
    for i, j in sorted(m.edges):
        out.append(f"EDGE {i} {j}")
    for i in sorted(m.starts):
        out.append(f"START {i}")
    for i in sorted(m.ends):
        out.append(f"END {i}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Word graphs


def parse_word_graph(text: str) -> WordGraph:
    words: list[Word] = []
    edges: list[tuple[int, int]] = []
    starts: list[int] = []
    ends: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        try:
            if key == "WORD":
                wid, form, cat, b, e = rest.split()
                words.append(Word(int(wid), form, cat, (int(b), int(e))))
            elif key == "WEDGE":
                u, v = rest.split()
                edges.append((int(u), int(v)))
            elif key == "WSTART":
                starts.append(int(rest))
            elif key == "WEND":
                ends.append(int(rest))
            else:
                raise FormatError(lineno, f"unknown section keyword {key!r}")
        except FormatError:
            raise
        except Exception as exc:
            raise FormatError(lineno, f"malformed {key} line ({exc})")
    return WordGraph(tuple(words), frozenset(edges), frozenset(starts), frozenset(ends))


def serialize_word_graph(wg: WordGraph) -> str:
    out = []
    for w in sorted(wg.words, key=lambda w: w.wid):
        out.append(f"WORD {w.wid} {w.form} {w.cat} {w.interval[0]} {w.interval[1]}")
    for u, v in sorted(wg.edges):
        out.append(f"WEDGE {u} {v}")
    for u in sorted(wg.starts):
        out.append(f"WSTART {u}")
    for u in sorted(wg.ends):
        out.append(f"WEND {u}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Share maps for merging


@dataclass(frozen=True)
class ShareMap:
    """name -> list of (file index, node id) sharing that name."""

    shares: dict[str, tuple[tuple[int, int], ...]]


def parse_share_map(text: str, n_files: int) -> ShareMap:
    shares: dict[str, tuple[tuple[int, int], ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        if key != "SHARE":
            raise FormatError(lineno, f"unknown section keyword {key!r}")
        name, _, body = rest.partition(":")
        name = name.strip()
        refs = []
        for tok in body.split():
            fidx, _, node = tok.partition(":")
            fidx, node = int(fidx), int(node)
            if not 0 <= fidx < n_files:
                raise FormatError(lineno, f"file index {fidx} out of range")
            refs.append((fidx, node))
        shares[name] = tuple(refs)
    return ShareMap(shares)
