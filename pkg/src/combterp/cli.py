"""Command-line entry point: run, transform, compare, bench, theorem."""
from __future__ import annotations

import argparse
import sys

from . import bench as bench_mod
from . import compare as compare_mod
from . import quickgen, refsem
from .elim import ElimAlgo, find_cbv_violations, elim, transform
from .errors import InterpError
from .frontend import SourceProgram, check_closed, parse
from .purify import PurifyCtx, purify
from .store import Store, format_trace
from .syntax import count_apps, format_mexpr, format_value

ALGOS = {"fab": ElimAlgo.FAB, "c1": ElimAlgo.C1, "c2": ElimAlgo.C2}
DEFAULT_BUDGET = 50_000_000


def _read_source(path: str) -> SourceProgram:
    if path == "-":
        return SourceProgram(sys.stdin.read(), "<stdin>")
    with open(path) as f:
        return SourceProgram(f.read(), path)


def _load(path: str):
    return check_closed(parse(_read_source(path)))


def cmd_run(args) -> int:
    e = _load(args.file)
    if args.algo == "classical":
        obs = compare_mod.observe_classical(e, budget=args.budget)
    else:
        obs = compare_mod.observe_combinator(e, ALGOS[args.algo],
                                             budget=args.budget)
    if obs.kind != "value":
        print(f"error: {obs.kind}", file=sys.stderr)
        return 1
    v = compare_mod.normalize_value(obs.value)
    print("<fun>" if v == "fun" else format_value(obs.value))
    if args.emit == "trace":
        for kind, tag, value in obs.trace:
            shown = value if isinstance(value, str) else format_value(value)
            print(f"{kind.upper()} {tag} {shown}")
    return 0


def cmd_transform(args) -> int:
    e = _load(args.file)
    ctx = PurifyCtx(Store())
    p = purify(e, ctx)
    algo = ALGOS[args.algo if args.algo != "classical" else "c2"]
    pre_eval = False if args.no_pre_eval else None  # None = the rule set's default
    out = elim(p, algo, pre_eval=pre_eval)
    m = transform(p, algo, pre_eval=pre_eval)
    bad = find_cbv_violations(out)
    if args.emit != "size":
        print(format_mexpr(m))
    print(f"applications: {count_apps(m)}")
    if bad:
        print(f"call-by-value violations: {len(bad)}", file=sys.stderr)
        return 1
    return 0


def cmd_compare(args) -> int:
    algos = list(ALGOS.values())
    failures = excluded = total = 0
    if args.file:
        programs = [(args.file, _load(args.file))]
        initial = None
    else:
        cfgs = [quickgen.GenConfig(args.seed + i, allow_effects=True)
                for i in range(args.samples)]
        programs = [(f"seed {c.seed}", quickgen.gen_expr(c)) for c in cfgs]
        initial = quickgen.default_initial(cfgs[0])
    for name, e in programs:
        results = compare_mod.compare_expr(e, algos, initial=initial,
                                           budget=args.budget)
        for algo, r in results.items():
            total += 1
            if r.excluded:
                excluded += 1
            elif not r.agree:
                failures += 1
                print(f"DISAGREE {name} [{algo.value}]: {r.detail}")
    print(f"compared {total}: {total - failures - excluded} agree, "
          f"{failures} disagree, {excluded} excluded")
    return 1 if failures else 0


def cmd_bench(args) -> int:
    programs = bench_mod.corpus(full=args.full)
    try:
        report = bench_mod.run_bench(programs, repetitions=args.reps,
                                     budget=args.budget)
    except bench_mod.BenchFailure as exc:
        print(f"bench failure: {exc}", file=sys.stderr)
        return 1
    print(bench_mod.format_report(report))
    for line in bench_mod.machine_lines(report):
        print(line)
    return 0


def cmd_theorem(args) -> int:
    delta = refsem.standard_delta()
    tally = {"agree": 0, "disagree": 0, "inconclusive": 0}
    for i in range(args.samples):
        cfg = quickgen.GenConfig(args.seed + i, max_depth=5)
        m = quickgen.gen_rterm(cfg)
        v = refsem.check_theorem(m, quickgen.default_rstore(cfg), delta,
                                 args.budget)
        tally[v.kind] += 1
        if v.kind == "disagree":
            print(f"DISAGREE seed {cfg.seed}: {v.details}")
            print(f"  term: {refsem.format_rterm(m)}")
    print(f"theorem: {tally['agree']} agree, {tally['inconclusive']} "
          f"inconclusive, {tally['disagree']} disagree")
    return 1 if tally["disagree"] else 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="combterp")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, file=True):
        if file:
            p.add_argument("file", help="program path, or - for stdin")
        p.add_argument("--algo", choices=["classical", *ALGOS], default="c2")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = sub.add_parser("run", help="evaluate a program")
    common(p)
    p.add_argument("--emit", choices=["value", "trace"], default="value")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("transform", help="show the combinator form")
    common(p)
    p.add_argument("--emit", choices=["term", "size"], default="term")
    p.add_argument("--no-pre-eval", action="store_true")
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("compare", help="differential check vs classical")
    p.add_argument("file", nargs="?", help="program path; omit to use seeds")
    p.add_argument("--budget", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("bench", help="run the benchmark corpus")
    p.add_argument("--full", action="store_true")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--budget", type=int, default=bench_mod.DEFAULT_BUDGET)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("theorem", help="empirical elimination-correctness check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--budget", type=int, default=100_000)
    p.set_defaults(fn=cmd_theorem)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except InterpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
