"""Constraint dependency grammars over word graphs.

A grammar assigns each word a fixed set of roles; a role's value is a pair
``label-modifiee`` where the modifiee is the position of the word being
modified, or nil.  Grammar constraints are small prefix-notation formulas in
one variable (unary) or two (binary); a role value is inadmissible exactly
when it satisfies a formula's antecedent but not its consequent.

Word positions are intervals (b, e) with b < e so that lattice words with
overlapping spans can coexist; the order predicates relate intervals and treat
anything involving nil as incomparable (hence false).  Compiling a word graph
against a grammar yields a segment-DAG instance whose nodes are (word, role)
pairs and whose segments are the sentence hypotheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import CspInstance, enforce_node_consistency
from .graph import MuseInstance, build_muse
from .arc import muse_ac1
from .search import Assignment, extract_all

Interval = tuple[int, int]
NIL = None

LT, GT, EQ, INCOMPARABLE = "lt", "gt", "eq", "incomparable"


class GrammarError(ValueError):
    pass


def interval_compare(p: Interval | None, q: Interval | None) -> str:
    """Relate two position intervals; nil compares with nothing.

    Abutting or disjoint intervals order by their endpoints; overlapping ones
    (and any comparison involving nil) are incomparable, so the <, >, =
    predicates over them are all false.
    """
    if p is None or q is None:
        return INCOMPARABLE
    if p == q:
        return EQ
    if p[1] <= q[0]:
        return LT
    if q[1] <= p[0]:
        return GT
    return INCOMPARABLE


# ---------------------------------------------------------------------------
# Constraint formulas


_TOKEN = re.compile(r"\(|\)|[^\s()]+")

_FUNCTIONS = ("pos", "rid", "lab", "mod", "cat")
_PREDICATES = ("=", "<", ">")
_CONNECTIVES = ("and", "or", "not", "if")


def parse_sexpr(text: str):
    tokens = _TOKEN.findall(text)
    pos = 0

    def rd():
        nonlocal pos
        if pos >= len(tokens):
            raise GrammarError("unexpected end of formula")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(rd())
            if pos >= len(tokens):
                raise GrammarError("unbalanced parentheses")
            pos += 1
            return tuple(items)
        if tok == ")":
            raise GrammarError("unbalanced parentheses")
        return int(tok) if tok.lstrip("-").isdigit() else tok

    out = []
    while pos < len(tokens):
        out.append(rd())
    return out


def formula_variables(expr) -> set[str]:
    if isinstance(expr, tuple):
        return set().union(*(formula_variables(e) for e in expr)) if expr else set()
    return {expr} if expr in ("x", "y") else set()


def _check_formula(expr, symbols: set[str]):
    if not (isinstance(expr, tuple) and expr and expr[0] == "if" and len(expr) == 3):
        raise GrammarError(f"constraint must have the shape (if antecedent consequent): {expr!r}")

    def walk(e, as_term=False):
        if isinstance(e, tuple):
            if not e:
                raise GrammarError("empty subformula")
            head = e[0]
            if head in _FUNCTIONS:
                if len(e) != 2 or e[1] not in ("x", "y"):
                    raise GrammarError(f"{head} applies to a variable: {e!r}")
                return
            if as_term:
                raise GrammarError(f"expected a term, got {e!r}")
            if head in ("and", "or"):
                for sub in e[1:]:
                    walk(sub)
                return
            if head == "not":
                if len(e) != 2:
                    raise GrammarError(f"not takes one argument: {e!r}")
                walk(e[1])
                return
            if head in _PREDICATES:
                if len(e) != 3:
                    raise GrammarError(f"{head} takes two terms: {e!r}")
                walk(e[1], as_term=True)
                walk(e[2], as_term=True)
                return
            if head == "if":
                raise GrammarError("nested if is not part of the constraint language")
            raise GrammarError(f"unknown operator {head!r}")
        if not as_term:
            raise GrammarError(f"bare atom {e!r} used as a formula")
        if isinstance(e, int) or e == "nil" or e in ("x", "y"):
            if e in ("x", "y"):
                raise GrammarError("variables appear only under pos/rid/lab/mod/cat")
            return
        if e not in symbols:
            raise GrammarError(f"unknown symbol {e!r} in formula")

    walk(expr[1])
    walk(expr[2])


@dataclass(frozen=True)
class Grammar:
    """Four parts: lexical categories, role names, labels, and constraints."""

    categories: tuple[str, ...]
    roles: tuple[str, ...]
    labels: tuple[str, ...]
    constraints: tuple[tuple, ...]
    symbols: dict[str, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        names = list(dict.fromkeys((*self.categories, *self.roles, *self.labels)))
        object.__setattr__(self, "symbols", {s: k for k, s in enumerate(names)})
        for f in self.constraints:
            _check_formula(f, set(self.symbols))
            arity = len(formula_variables(f))
            if arity == 0 or arity > 2:
                raise GrammarError(f"constraint arity must be 1 or 2: {f!r}")

    @property
    def degree(self) -> int:
        return len(self.roles)

    @property
    def unary(self) -> tuple[tuple, ...]:
        return tuple(f for f in self.constraints if len(formula_variables(f)) == 1)

    @property
    def binary(self) -> tuple[tuple, ...]:
        return tuple(f for f in self.constraints if len(formula_variables(f)) == 2)


def parse_grammar(text: str) -> Grammar:
    """Read the grammar file format: header keywords, then one s-expression
    per constraint, in the notation constraints are usually written in."""
    cats: list[str] = []
    roles: list[str] = []
    labels: list[str] = []
    body: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith(";") or stripped.startswith("#"):
            continue
        head, _, rest = stripped.partition(" ")
        if head == "CATEGORIES":
            cats.extend(rest.split())
        elif head == "ROLES":
            roles.extend(rest.split())
        elif head == "LABELS":
            labels.extend(rest.split())
        else:
            body.append(line)
    constraints = parse_sexpr("\n".join(body))
    if not cats or not roles or not labels:
        raise GrammarError("grammar needs CATEGORIES, ROLES and LABELS lines")
    return Grammar(tuple(cats), tuple(roles), tuple(labels), tuple(constraints))


# ---------------------------------------------------------------------------
# Word graphs


@dataclass(frozen=True)
class Word:
    wid: int
    form: str
    cat: str
    interval: Interval


@dataclass(frozen=True)
class WordGraph:
    words: tuple[Word, ...]
    edges: frozenset[tuple[int, int]]
    starts: frozenset[int]
    ends: frozenset[int]

    def __post_init__(self):
        byid = {w.wid for w in self.words}
        if len(byid) != len(self.words):
            raise GrammarError("duplicate word ids")
        for w in self.words:
            if not w.interval[0] < w.interval[1]:
                raise GrammarError(f"word {w.wid} has an empty interval {w.interval}")
        for u, v in self.edges:
            wu, wv = self.word(u), self.word(v)
            if wu.interval[1] != wv.interval[0]:
                raise GrammarError(
                    f"edge {u}->{v} joins non-abutting intervals {wu.interval} {wv.interval}"
                )

    def word(self, wid: int) -> Word:
        for w in self.words:
            if w.wid == wid:
                return w
        raise KeyError(wid)


def from_sentence(words: Sequence[tuple[str, str]]) -> WordGraph:
    """A plain sentence as a chain word graph; word k spans (k+1, k+2) from 1."""
    ws = tuple(
        Word(k, form, cat, (k + 1, k + 2)) for k, (form, cat) in enumerate(words)
    )
    edges = frozenset((k, k + 1) for k in range(len(ws) - 1))
    return WordGraph(ws, edges, frozenset({0}), frozenset({len(ws) - 1}))


def full_lattice(categories: Sequence[str], length: int) -> WordGraph:
    """Every category at every one of ``length`` positions, fully connected."""
    ws = []
    for p in range(length):
        for cat in categories:
            ws.append(Word(len(ws), cat, cat, (p + 1, p + 2)))
    k = len(categories)
    edges = set()
    for p in range(length - 1):
        for u in range(p * k, (p + 1) * k):
            for v in range((p + 1) * k, (p + 2) * k):
                edges.add((u, v))
    return WordGraph(
        tuple(ws), frozenset(edges),
        frozenset(range(k)), frozenset(range((length - 1) * k, length * k)),
    )


# ---------------------------------------------------------------------------
# Network compilation


class _ValueTable:
    """Per-value attribute arrays for vectorized formula evaluation."""

    __slots__ = ("lab", "mod_b", "mod_e", "pos_b", "pos_e", "cat", "rid")

    def __init__(self, lab, mod_b, mod_e, pos_b, pos_e, cat, rid):
        self.lab, self.mod_b, self.mod_e = lab, mod_b, mod_e
        self.pos_b, self.pos_e, self.cat, self.rid = pos_b, pos_e, cat, rid

    def view(self, shape):
        return _ValueTable(*(a.reshape(shape) for a in (
            self.lab, self.mod_b, self.mod_e, self.pos_b, self.pos_e, self.cat, self.rid)))


def _eval_term(term, env, symbols):
    if isinstance(term, tuple):
        fn, var = term
        t = env[var]
        if fn == "pos":
            return ("ivl", t.pos_b, t.pos_e)
        if fn == "mod":
            return ("ivl", t.mod_b, t.mod_e)
        if fn == "lab":
            return ("sym", t.lab)
        if fn == "cat":
            return ("sym", t.cat)
        if fn == "rid":
            return ("sym", t.rid)
        raise GrammarError(f"unknown function {fn!r}")
    if term == "nil":
        return ("nil",)
    if isinstance(term, int):
        return ("ivl", np.int32(term), np.int32(term + 1))
    return ("sym", np.int32(symbols[term]))


def _eval_formula(expr, env, symbols):
    head = expr[0]
    if head == "if":
        return ~_eval_formula(expr[1], env, symbols) | _eval_formula(expr[2], env, symbols)
    if head == "and":
        out = _eval_formula(expr[1], env, symbols)
        for sub in expr[2:]:
            out = out & _eval_formula(sub, env, symbols)
        return out
    if head == "or":
        out = _eval_formula(expr[1], env, symbols)
        for sub in expr[2:]:
            out = out | _eval_formula(sub, env, symbols)
        return out
    if head == "not":
        return ~_eval_formula(expr[1], env, symbols)

    lhs = _eval_term(expr[1], env, symbols)
    rhs = _eval_term(expr[2], env, symbols)
    if head == "=":
        # (= t nil) tests for nil-ness; interval equality needs two real
        # intervals, symbol equality compares name codes, and mixed kinds
        # never match.
        if lhs[0] == "nil" and rhs[0] == "nil":
            return np.bool_(True)
        if lhs[0] == "nil" or rhs[0] == "nil":
            other = rhs if lhs[0] == "nil" else lhs
            if other[0] == "ivl":
                return other[1] < 0
            return np.bool_(False)
        if lhs[0] == "sym" and rhs[0] == "sym":
            return lhs[1] == rhs[1]
        if lhs[0] == "ivl" and rhs[0] == "ivl":
            return (lhs[1] >= 0) & (rhs[1] >= 0) & (lhs[1] == rhs[1]) & (lhs[2] == rhs[2])
        return np.bool_(False)
    if head in ("<", ">"):
        if lhs[0] != "ivl" or rhs[0] != "ivl":
            return np.bool_(False)
        p, q = (lhs, rhs) if head == "<" else (rhs, lhs)
        return (p[1] >= 0) & (q[1] >= 0) & (p[2] <= q[1])
    raise GrammarError(f"unknown predicate {head!r}")


@dataclass
class CdgNetwork:
    """A compiled word graph: the segment-DAG instance plus word/role metadata."""

    muse: MuseInstance
    word_graph: WordGraph
    grammar: Grammar
    node_word: tuple[int, ...]
    node_role: tuple[str, ...]
    word_nodes: dict[int, tuple[int, ...]]

    def word_of(self, node: int) -> Word:
        return self.word_graph.word(self.node_word[node])


def _word_reach(wg: WordGraph) -> dict[int, set[int]]:
    """Symmetric co-occurrence: u and v lie on a common sentence hypothesis."""
    ids = [w.wid for w in wg.words]
    succ: dict[int, list[int]] = {i: [] for i in ids}
    pred: dict[int, list[int]] = {i: [] for i in ids}
    for u, v in wg.edges:
        succ[u].append(v)
        pred[v].append(u)
    pos = {w: k for k, w in enumerate(ids)}
    order = sorted(ids, key=lambda w: wg.word(w).interval)
    down = {i: 1 << pos[i] for i in ids}
    for u in reversed(order):
        for v in succ[u]:
            down[u] |= down[v]
    co: dict[int, set[int]] = {i: set() for i in ids}
    for u in ids:
        for v in ids:
            if u != v and ((down[u] >> pos[v]) & 1 or (down[v] >> pos[u]) & 1):
                co[u].add(v)
    return co


def build_network(wg: WordGraph, grammar: Grammar) -> CdgNetwork:
    """Compile a word graph into a segment-DAG constraint instance.

    One node per (word, role); a word's roles travel together as a chain at
    the word's DAG position.  Domains hold every label paired with nil or the
    interval of a co-occurring word.  Unary formulas fill the admissibility
    table for every value; binary tables are evaluated over the values that
    pass the unary constraints (the rest are pruned by node consistency before
    any propagation reads them).  Pairs whose modifiee cannot be realized in
    any shared hypothesis are inadmissible regardless of the formulas.
    """
    if grammar.degree < 1:
        raise GrammarError("grammar needs at least one role")
    words = sorted(wg.words, key=lambda w: (w.interval, w.wid))
    co = _word_reach(wg)

    node_word: list[int] = []
    node_role: list[str] = []
    word_nodes: dict[int, list[int]] = {}
    for w in words:
        for r in grammar.roles:
            word_nodes.setdefault(w.wid, []).append(len(node_word))
            node_word.append(w.wid)
            node_role.append(r)

    # Lift the word DAG onto role chains.
    edges = []
    for w in words:
        chain = word_nodes[w.wid]
        edges.extend(zip(chain, chain[1:]))
    for u, v in wg.edges:
        edges.append((word_nodes[u][-1], word_nodes[v][0]))
    starts = [word_nodes[w][0] for w in wg.starts]
    ends = [word_nodes[w][-1] for w in wg.ends]

    # Domains: label-major, modifiee nil first then by interval.
    iv = {w.wid: w.interval for w in wg.words}
    domains: list[list[tuple[str, Interval | None]]] = []
    for nid, wid in enumerate(node_word):
        mods = [None] + sorted({iv[v] for v in co[wid]})
        domains.append([(lab, m) for lab in grammar.labels for m in mods])

    universe: list[tuple[str, Interval | None]] = []
    seen = set()
    for lab in grammar.labels:
        mods = [None] + sorted({w.interval for w in wg.words})
        for m in mods:
            if (lab, m) not in seen:
                seen.add((lab, m))
                universe.append((lab, m))
    uidx = {v: k for k, v in enumerate(universe)}

    symbols = grammar.symbols
    n_nodes = len(node_word)

    def table_for(nid: int) -> _ValueTable:
        w = wg.word(node_word[nid])
        vals = domains[nid]
        lab = np.array([symbols[v[0]] for v in vals], dtype=np.int32)
        mod_b = np.array([-1 if v[1] is None else v[1][0] for v in vals], dtype=np.int32)
        mod_e = np.array([-1 if v[1] is None else v[1][1] for v in vals], dtype=np.int32)
        k = len(vals)
        return _ValueTable(
            lab, mod_b, mod_e,
            np.full(k, w.interval[0], dtype=np.int32),
            np.full(k, w.interval[1], dtype=np.int32),
            np.full(k, symbols[w.cat], dtype=np.int32),
            np.full(k, symbols[node_role[nid]], dtype=np.int32),
        )

    tables = [table_for(nid) for nid in range(n_nodes)]

    # Unary admissibility per node.
    r1_masks: list[np.ndarray] = []
    for nid in range(n_nodes):
        mask = np.ones(len(domains[nid]), dtype=bool)
        env = {"x": tables[nid]}
        for f in grammar.unary:
            mask &= np.broadcast_to(_eval_formula(f, env, symbols), mask.shape)
        r1_masks.append(mask)

    # One global evaluation of the binary constraints over the values that
    # survive the unary ones, then per-pair slices.
    surv_vals: list[np.ndarray] = [np.flatnonzero(r1_masks[nid]) for nid in range(n_nodes)]
    offsets = np.zeros(n_nodes + 1, dtype=np.int64)
    for nid in range(n_nodes):
        offsets[nid + 1] = offsets[nid] + len(surv_vals[nid])
    total = int(offsets[-1])

    def gather(attr):
        return np.concatenate(
            [getattr(tables[nid], attr)[surv_vals[nid]] for nid in range(n_nodes)]
        ) if total else np.zeros(0, dtype=np.int32)

    glob = _ValueTable(*(gather(a) for a in ("lab", "mod_b", "mod_e", "pos_b", "pos_e", "cat", "rid")))
    col = glob.view((total, 1))
    row = glob.view((1, total))
    grid = np.ones((total, total), dtype=bool)
    env = {"x": col, "y": row}
    for f in grammar.binary:
        grid &= np.broadcast_to(_eval_formula(f, env, symbols), grid.shape)
    grid = grid & grid.T  # a pair entry holds under both variable bindings

    # Dense relation tables over the value universe.
    l = len(universe)
    r1_tab = np.zeros((n_nodes, l), dtype=bool)
    for nid in range(n_nodes):
        cols = [uidx[v] for v in domains[nid]]
        r1_tab[nid, cols] = r1_masks[nid]

    iv_ids = {v: k for k, v in enumerate(sorted({w.interval for w in wg.words}))}
    mod_ids = [
        np.array(
            [-1 if domains[nid][k][1] is None else iv_ids[domains[nid][k][1]]
             for k in surv_vals[nid]],
            dtype=np.int32,
        )
        for nid in range(n_nodes)
    ]

    def seg_ok(nid_a: int, nid_b: int) -> np.ndarray:
        """Which survivor values of a have modifiees realizable alongside word b."""
        wa, wb = node_word[nid_a], node_word[nid_b]
        common = (co[wa] & co[wb]) | {wb}
        ok_ids = {iv_ids[iv[w]] for w in common}
        arr = mod_ids[nid_a]
        mask = arr < 0
        for k in ok_ids:
            mask |= arr == k
        return mask

    r2: dict[tuple[int, int], np.ndarray] = {}
    co_nodes = []
    for na in range(n_nodes):
        for nb in range(na + 1, n_nodes):
            wa, wb = node_word[na], node_word[nb]
            if wa != wb and wb not in co[wa]:
                continue
            co_nodes.append((na, nb))
    for na, nb in co_nodes:
        ia = slice(int(offsets[na]), int(offsets[na + 1]))
        ib = slice(int(offsets[nb]), int(offsets[nb + 1]))
        sub = grid[ia, ib].copy()
        sub &= seg_ok(na, nb)[:, None]
        sub &= seg_ok(nb, na)[None, :]
        tab = np.ones((l, l), dtype=bool)
        rows = [uidx[domains[na][k]] for k in surv_vals[na]]
        cols = [uidx[domains[nb][k]] for k in surv_vals[nb]]
        if rows and cols:
            tab[np.ix_(rows, cols)] = sub
        r2[(na, nb)] = tab

    csp = CspInstance(
        tuple(universe),
        tuple(frozenset(d) for d in domains),
        r1_tab,
        r2,
        frozenset(),
    )
    muse = build_muse(csp, edges, starts, ends)
    return CdgNetwork(
        muse, wg, grammar, tuple(node_word), tuple(node_role),
        {w: tuple(ns) for w, ns in word_nodes.items()},
    )


# ---------------------------------------------------------------------------
# Parsing pipeline


def node_consistent(net: CdgNetwork) -> MuseInstance:
    return net.muse.with_csp(enforce_node_consistency(net.muse.csp))


def parse(wg: WordGraph, grammar: Grammar) -> tuple[set[Assignment], CdgNetwork]:
    """Compile, prune by node and segment-DAG arc consistency, extract parses."""
    net = build_network(wg, grammar)
    pruned, state = muse_ac1(node_consistent(net))
    return extract_all(pruned, state), net


def render_value(value: tuple[str, Interval | None]) -> str:
    lab, mod = value
    return f"{lab}-nil" if mod is None else f"{lab}-({mod[0]},{mod[1]})"


def render_parse(net: CdgNetwork, a: Assignment) -> str:
    """One block per solution: `pos=(b,e) form cat role=label-modifiee` lines."""
    bound = dict(a.binding)
    lines = []
    for nid in a.nodes:
        w = net.word_of(nid)
        role = net.node_role[nid]
        lines.append(
            f"pos=({w.interval[0]},{w.interval[1]}) {w.form} {w.cat} "
            f"{role}={render_value(bound[nid])}"
        )
    return "\n".join(lines)


def category_string(net: CdgNetwork, a: Assignment) -> str:
    cats = []
    last_word = None
    for nid in a.nodes:
        wid = net.node_word[nid]
        if wid != last_word:
            cats.append(net.word_of(nid).cat)
            last_word = wid
    return "".join(cats)


# ---------------------------------------------------------------------------
# Built-in grammars

_G1 = """
CATEGORIES det noun verb
ROLES governor
LABELS det root subj
; determiners act as determiners of a later word
(if (= (cat x) det)
    (and (= (lab x) det) (> (mod x) (pos x))))
; nouns act as subjects of a later word; verbs are the root and modify nothing
(if (not (= (cat x) det))
    (or (and (= (cat x) noun) (= (lab x) subj) (> (mod x) (pos x)))
        (and (= (cat x) verb) (= (lab x) root) (= (mod x) nil))))
; a modifiee must suit the modifier's function
(if (= (mod x) (pos y))
    (or (and (= (lab x) det) (= (cat y) noun))
        (and (= (lab x) subj) (= (cat y) verb))))
"""

_G2 = """
CATEGORIES a b c
ROLES governor
LABELS a b c
; 3 unary constraints
(if (and (= (cat x) a) (= (rid x) governor))
    (and (= (lab x) a) (> (mod x) (pos x))))
(if (and (= (cat x) b) (= (rid x) governor))
    (and (= (lab x) b) (< (mod x) (pos x))))
(if (and (= (cat x) c) (= (rid x) governor))
    (and (= (lab x) c) (< (mod x) (pos x))))
; 8 binary constraints
(if (or (and (= (lab x) a) (or (= (lab y) b) (= (lab y) c)))
        (and (= (lab x) b) (= (lab y) c)))
    (< (pos x) (pos y)))
(if (and (= (lab x) b) (= (lab y) a) (> (pos x) (pos y)))
    (< (mod x) (mod y)))
(if (and (= (lab x) a) (= (lab y) a) (> (pos x) (pos y)))
    (< (mod x) (mod y)))
(if (and (= (lab x) b) (= (lab y) b) (> (pos x) (pos y)))
    (< (mod x) (mod y)))
(if (and (= (lab x) c) (= (lab y) c) (> (pos x) (pos y)))
    (< (mod x) (mod y)))
(if (and (= (lab x) a) (= (mod x) (pos y)) (= (rid y) governor))
    (= (lab y) c))
(if (and (= (lab x) b) (= (mod x) (pos y)) (= (rid y) governor))
    (= (lab y) a))
(if (and (= (lab x) c) (= (mod x) (pos y)) (= (rid y) governor))
    (= (lab y) b))
"""

_G3 = """
CATEGORIES a b c
ROLES governor
LABELS w1 w2
; 2 unary constraints
(if (= (lab x) w1) (< (pos x) (mod x)))
(if (= (lab x) w2) (> (pos x) (mod x)))
; 6 binary constraints
(if (and (= (lab x) w1) (= (lab y) w2))
    (< (pos x) (pos y)))
(if (and (= (lab x) w1) (= (lab y) w2))
    (> (mod x) (mod y)))
(if (and (= (lab x) w1) (= (lab y) w1) (> (pos x) (pos y)))
    (> (mod x) (mod y)))
(if (and (= (lab x) w2) (= (lab y) w2) (> (pos x) (pos y)))
    (< (mod x) (mod y)))
(if (and (= (lab x) w1) (= (mod x) (pos y)))
    (and (= (lab y) w2) (= (cat x) (cat y))))
(if (and (= (lab x) w2) (= (mod x) (pos y)))
    (= (lab y) w1))
"""

_BUILTIN = {"g1": _G1, "g2": _G2, "g3": _G3}


def builtin_grammar(which: str) -> Grammar:
    try:
        text = _BUILTIN[which.lower()]
    except KeyError:
        raise GrammarError(f"no built-in grammar named {which!r}") from None
    return parse_grammar(text)
