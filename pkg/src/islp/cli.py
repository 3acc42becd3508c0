"""Command-line driver: ``islp <verb> ...``.

Machine-readable output goes to stdout as plain text or key=value lines;
diagnostics go to stderr.  Exit codes: 0 success, 1 usage, 2 grammar or
validation error, 3 range/limit error.
"""
from __future__ import annotations

import argparse
import sys
import time

from . import measures
from .balance import balance, lambda_labels, sc_decomposition, to_dag
from .access import AccessContext, PositionError, access, extract
from .corpora import (RNG_ALGORITHM, RandomIslpParams, gen_fibonacci, gen_sk,
                      gen_thue_morse_concat, random_islp)
from .grammar import (Grammar, GrammarError, ORACLE_LIMIT_DEFAULT,
                      OracleLimitError, emit, expand, height, parse_grammar,
                      size)
from .transform import EditOp, apply_morphism, clamp_degree, edit, reverse

EXIT_USAGE = 1
EXIT_GRAMMAR = 2
EXIT_RANGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load(path: str) -> Grammar:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_grammar(fh.read())


def _emit(g: Grammar, header: list[str] | None = None) -> None:
    if header:
        for line in header:
            sys.stdout.write(f"# {line}\n")
    sys.stdout.write(emit(g))


def build_parser() -> _Parser:
    p = _Parser(prog="islp", description="Iterated-SLP toolkit")
    sub = p.add_subparsers(dest="verb", required=True)

    def grammar_cmd(name, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("grammar", help="grammar file")
        return sp

    sp = grammar_cmd("expand", help="print the full expansion")
    sp.add_argument("--oracle-limit", type=int, default=ORACLE_LIMIT_DEFAULT)

    sp = grammar_cmd("access", help="print T[pos]")
    sp.add_argument("pos", type=int)
    sp.add_argument("--trace", action="store_true",
                    help="print (i, r, off) decisions per iteration level")

    sp = grammar_cmd("extract", help="print T[pos..pos+len-1]")
    sp.add_argument("pos", type=int)
    sp.add_argument("len", type=int)

    grammar_cmd("stats", help="size/n/height/degree of the grammar")
    grammar_cmd("emit", help="parse and re-emit (round-trip check)")
    grammar_cmd("clamp", help="clamp exponents to log2 n")
    grammar_cmd("reverse", help="grammar of the reversed text")
    grammar_cmd("balance", help="rewrite to logarithmic height")

    sp = grammar_cmd("morph", help="apply a character morphism")
    sp.add_argument("--map", required=True, metavar="MAP",
                    help="comma-separated pairs, e.g. 'a=ab,b=b'")

    sp = grammar_cmd("edit", help="apply a single-character edit")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--sub", nargs=2, metavar=("POS", "CHAR"))
    group.add_argument("--ins-before", nargs=2, metavar=("POS", "CHAR"))
    group.add_argument("--ins-after", nargs=2, metavar=("POS", "CHAR"))
    group.add_argument("--del", dest="delete", metavar="POS")

    sp = sub.add_parser("measure", help="repetitiveness measures")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("grammar", nargs="?", help="grammar file to expand")
    src.add_argument("--text", help="plain text file")
    sp.add_argument("--delta", action="store_true")
    sp.add_argument("--z", action="store_true")
    sp.add_argument("--bwt-runs", action="store_true")
    sp.add_argument("--sentinel", action="store_true")
    sp.add_argument("--oracle-limit", type=int, default=ORACLE_LIMIT_DEFAULT)

    sp = sub.add_parser("gen", help="generate a corpus grammar or text")
    sp.add_argument("--family", required=True,
                    choices=("sk", "fib", "tm", "random"))
    sp.add_argument("--k", type=int, help="sk: product upper bound")
    sp.add_argument("--i", type=int, help="fib: word index")
    sp.add_argument("--ks", help="tm: comma-separated prefix lengths")
    sp.add_argument("--seed", type=int, help="random: RNG seed")
    sp.add_argument("--variables", type=int, default=12)
    sp.add_argument("--max-t", type=int, default=4)
    sp.add_argument("--max-k", type=int, default=8)
    sp.add_argument("--max-c", type=int, default=3)
    sp.add_argument("--iter-fraction", type=float, default=0.35)
    sp.add_argument("--length-limit", type=int, default=10 ** 7)
    sp.add_argument("-o", "--output", help="output file (default stdout)")

    sp = grammar_cmd("bench", help="mean polynomial-eval count per access")
    sp.add_argument("--queries", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    return p


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _dispatch(args)
    except (PositionError, OracleLimitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANGE if isinstance(exc, (PositionError, OracleLimitError)) \
            else EXIT_USAGE
    except GrammarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GRAMMAR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args) -> int:
    verb = args.verb
    if verb == "expand":
        print(expand(_load(args.grammar), limit=args.oracle_limit))
    elif verb == "access":
        ctx = AccessContext.build(_load(args.grammar))
        trace: list | None = [] if args.trace else None
        ch = access(ctx, args.pos, trace=trace)
        if trace is not None:
            for i, r, off in trace:
                print(f"i={i} r={r} off={off}")
        print(ch)
    elif verb == "extract":
        ctx = AccessContext.build(_load(args.grammar))
        print(extract(ctx, args.pos, args.len))
    elif verb == "stats":
        g = _load(args.grammar)
        print(f"size={size(g)}")
        print(f"n={g.n}")
        print(f"height={height(g)}")
        print(f"d={g.max_degree()}")
    elif verb == "emit":
        _emit(_load(args.grammar))
    elif verb == "clamp":
        _emit(clamp_degree(_load(args.grammar)))
    elif verb == "reverse":
        _emit(reverse(_load(args.grammar)))
    elif verb == "balance":
        g = _load(args.grammar)
        out = balance(g)
        dag = to_dag(g)
        paths = sc_decomposition(dag)
        labels = lambda_labels(dag)
        header = [
            f"old_size={size(g)}",
            f"new_size={size(out)}",
            f"old_height={height(g)}",
            f"new_height={height(out)}",
            f"sc_paths={len(paths)}",
            f"max_lambda={max(max(l.in_log, l.out_log) for l in labels)}",
        ]
        _emit(out, header=header)
    elif verb == "morph":
        phi = {}
        for pair in args.map.split(","):
            if "=" not in pair:
                raise ValueError(f"bad morphism pair {pair!r}")
            src, dst = pair.split("=", 1)
            phi[src] = dst
        _emit(apply_morphism(_load(args.grammar), phi))
    elif verb == "edit":
        if args.sub:
            op = EditOp("substitute", int(args.sub[0]), args.sub[1])
        elif args.ins_before:
            op = EditOp("insert-before", int(args.ins_before[0]), args.ins_before[1])
        elif args.ins_after:
            op = EditOp("insert-after", int(args.ins_after[0]), args.ins_after[1])
        else:
            op = EditOp("delete", int(args.delete))
        _emit(edit(_load(args.grammar), op))
    elif verb == "measure":
        if args.text:
            with open(args.text, "r", encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = expand(_load(args.grammar), limit=args.oracle_limit)
        want_all = not (args.delta or args.z or args.bwt_runs)
        print(f"n={len(text)}")
        if args.delta or want_all:
            d = measures.delta(text)
            print(f"delta={d.numerator}/{d.denominator}")
        if args.z or want_all:
            print(f"z={measures.lz76_z(text)}")
        if args.bwt_runs or want_all:
            print(f"bwt_runs={measures.bwt_runs(text, sentinel=args.sentinel)}")
    elif verb == "gen":
        out = _gen(args)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(out)
        else:
            sys.stdout.write(out)
    elif verb == "bench":
        return _bench(args)
    return 0


def _gen(args) -> str:
    if args.family == "sk":
        if args.k is None:
            raise ValueError("--family sk requires --k")
        return emit(gen_sk(args.k))
    if args.family == "fib":
        if args.i is None:
            raise ValueError("--family fib requires --i")
        return gen_fibonacci(args.i)
    if args.family == "tm":
        if not args.ks:
            raise ValueError("--family tm requires --ks")
        ks = [int(x) for x in args.ks.split(",")]
        return gen_thue_morse_concat(ks)
    if args.seed is None:
        raise ValueError("--family random requires --seed")
    params = RandomIslpParams(
        seed=args.seed, variables=args.variables, max_t=args.max_t,
        max_k=args.max_k, max_c=args.max_c, iter_fraction=args.iter_fraction,
        length_limit=args.length_limit)
    g = random_islp(params)
    meta = (f"# generator=random_islp rng={RNG_ALGORITHM} seed={args.seed} "
            f"variables={args.variables} max_t={args.max_t} max_k={args.max_k} "
            f"max_c={args.max_c} iter_fraction={args.iter_fraction}\n")
    return meta + emit(g)


def _bench(args) -> int:
    import random as _random
    g = _load(args.grammar)
    ctx = AccessContext.build(g)
    rng = _random.Random(args.seed)
    n = ctx.grammar.n
    queries = [rng.randint(1, n) for _ in range(args.queries)]
    ctx.stats.reset()
    t0 = time.perf_counter()
    for q in queries:
        access(ctx, q)
    elapsed = time.perf_counter() - t0
    print(f"queries={len(queries)}")
    print(f"mean_poly_evals={ctx.stats.total / len(queries):.3f}")
    print(f"mean_time_us={elapsed / len(queries) * 1e6:.2f}")
    return 0


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
