"""Command-line front end.

Exit codes: 0 on success, 1 when a requested solution does not exist
(wipe-out), 2 on malformed input.
"""

from __future__ import annotations

import argparse
import sys

from . import arc, cdg, combine, experiments, formats, generators, path, search
from .core import enforce_node_consistency
from .graph import GraphError


def _read(path_: str) -> str:
    if path_ == "-":
        return sys.stdin.read()
    with open(path_, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(text: str, out: str | None):
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_instance(path_: str):
    try:
        return formats.parse_instance(_read(path_))
    except (formats.FormatError, GraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(2)


def cmd_gen(args) -> int:
    spec = generators.TopologySpec(
        args.kind, args.branching, args.path_length, args.labels, args.p, seed=args.seed
    )
    m = generators.gen_random(spec, args.index)
    _write(formats.serialize_instance(m), args.output)
    return 0


def cmd_ac(args) -> int:
    m = _load_instance(args.instance)
    trace = [] if args.trace else None
    pruned, _ = arc.muse_ac1(m, order=args.order, trace=trace)
    if trace:
        for line in trace:
            print(line, file=sys.stderr)
    _write(formats.serialize_instance(pruned), args.output)
    return 0


def cmd_pc(args) -> int:
    m = _load_instance(args.instance)
    trace = [] if args.trace else None
    if args.fixpoint:
        result = path.muse_ac_pc_fixpoint(m)
    else:
        result, _ = path.muse_pc1(m, order=args.order, trace=trace)
    if trace:
        for line in trace:
            print(line, file=sys.stderr)
    _write(formats.serialize_instance(result), args.output)
    return 0


def cmd_solve(args) -> int:
    m = _load_instance(args.instance)
    pruned, state = arc.muse_ac1(m)
    if args.all:
        sols = sorted(search.extract_all(pruned, state), key=lambda a: (a.nodes, a.binding))
        for a in sols:
            _write("\n".join(f"{u}={lab}" for u, lab in a.binding) + "\n\n", args.output)
        return 0 if sols else 1
    found = search.extract_one(pruned, state)
    if found is None:
        print("no solution", file=sys.stderr)
        return 1
    _write("\n".join(f"{u}={lab}" for u, lab in found.binding) + "\n", args.output)
    return 0


def cmd_parse(args) -> int:
    try:
        wg = formats.parse_word_graph(_read(args.words))
        if args.grammar in ("g1", "g2", "g3"):
            grammar = cdg.builtin_grammar(args.grammar)
        else:
            grammar = cdg.parse_grammar(_read(args.grammar))
    except (formats.FormatError, cdg.GrammarError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sols, net = cdg.parse(wg, grammar)
    for a in sorted(sols, key=lambda a: (a.nodes, a.binding)):
        _write(cdg.render_parse(net, a) + "\n\n", args.output)
    return 0 if sols else 1


def cmd_combine(args) -> int:
    try:
        instances = [formats.parse_instance(_read(f)) for f in args.instances]
        share = formats.parse_share_map(_read(args.share), len(instances))
    except (formats.FormatError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    named = []
    segments = []
    for k, m in enumerate(instances):
        names = [f"{k}:{i}" for i in range(m.csp.n)]
        for name, refs in share.shares.items():
            for fidx, node in refs:
                if fidx == k:
                    names[node] = name
        named.append(combine.NamedCsp(m.csp, tuple(names)))
        segments.append(names)
    compat = combine.check_mergeable(named)
    if not compat.ok:
        for v in compat.violations:
            print(f"error: {v}", file=sys.stderr)
        return 2
    dag = combine.create_dag(segments)
    merged = combine.assemble_muse(named, dag)
    _write(formats.serialize_instance(merged), args.output)
    return 0


def cmd_profile(args) -> int:
    cfg = experiments.ProfileConfig(
        args.kind, args.branching, args.path_length, args.labels,
        instances=args.instances, seed=args.seed,
    )
    rows = experiments.run_profile(cfg)
    _write(experiments.profile_csv(cfg, rows), args.output)
    return 0


def cmd_timing(args) -> int:
    sizes = range(args.min_n, args.max_n + 1)
    rows = experiments.run_timing(args.language, sizes, reps=args.reps)
    _write(experiments.timing_csv(args.language, rows, reps=args.reps), args.output)
    return 0


def cmd_oracle_check(args) -> int:
    import numpy as np

    from .generators import random_muse

    rng = np.random.default_rng(args.seed)
    bad = 0
    for k in range(args.count):
        m = random_muse(rng, p=float(rng.choice([0.2, 0.5, 0.8])))
        got, _ = arc.muse_ac1(m)
        want = arc.oracle_muse_arc_fixpoint(m)
        if got.csp.domains != want.csp.domains:
            bad += 1
            print(f"disagreement on instance {k}", file=sys.stderr)
    print(f"checked {args.count} instances, {bad} disagreements")
    return 0 if bad == 0 else 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="musecsp")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--kind", choices=("tree", "lattice"), required=True)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--path-length", type=int, default=4)
    p.add_argument("--labels", type=int, default=3)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("ac", help="arc consistency over the segment DAG")
    p.add_argument("instance")
    p.add_argument("--order", choices=("fifo", "lifo"), default="fifo")
    p.add_argument("--trace", action="store_true")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(fn=cmd_ac)

    p = sub.add_parser("pc", help="path consistency over the segment DAG")
    p.add_argument("instance")
    p.add_argument("--order", choices=("fifo", "lifo"), default="fifo")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--fixpoint", action="store_true",
                   help="alternate arc and path consistency to a joint fixpoint")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(fn=cmd_pc)

    p = sub.add_parser("solve", help="extract solutions after arc consistency")
    p.add_argument("instance")
    p.add_argument("--all", action="store_true")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("parse", help="parse a word graph with a grammar")
    p.add_argument("words")
    p.add_argument("--grammar", required=True,
                   help="g1, g2, g3, or a grammar file path")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("combine", help="merge labeled instances into one DAG")
    p.add_argument("instances", nargs="+")
    p.add_argument("--share", required=True, help="share-map file")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(fn=cmd_combine)

    p = sub.add_parser("profile", help="pruning profile over constraint tightness")
    p.add_argument("--kind", choices=("tree", "lattice"), required=True)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--path-length", type=int, default=4)
    p.add_argument("--labels", type=int, default=3)
    p.add_argument("--instances", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv",), default="csv")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(fn=cmd_profile)

    p = sub.add_parser("timing", help="extraction time with and without arc consistency")
    p.add_argument("--language", choices=("abc", "ww"), required=True)
    p.add_argument("--min-n", type=int, default=1)
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--format", choices=("csv",), default="csv")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(fn=cmd_timing)

    p = sub.add_parser("oracle-check", help="cross-check the engine against the brute-force oracle")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_oracle_check)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
