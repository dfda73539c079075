"""Command-line front end.

Loads surface-syntax program files, runs their queries, counts stable
models, suggests goal orderings, or drives the benchmark suite.

Exit codes: 0 on success, 1 when a counted query produced no answers,
2 on syntax or semantic errors, 3 when the step limit was exceeded.
"""

from __future__ import annotations

import argparse
import sys

from . import bench, corpus
from .engine import Engine
from .errors import StablogError, StepLimitExceeded
from .parser import load_file
from .terms import term_to_str


def _parse_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise ValueError(f"bad range {text!r}: expected LO..HI")
    return range(int(lo), int(hi) + 1)


def parse_model_spec(spec: str) -> tuple:
    """Parse a --count-models spec into (pairs, domain).

    Form: ``pos[/neg][+pos[/neg]...]@LO..HI[,LO..HI...]`` for dual
    predicates over a rectangular domain, or ``...@()`` for nullary
    predicates (a single empty tuple).
    """
    head, sep, dom = spec.partition("@")
    if not sep:
        raise ValueError(f"bad model spec {spec!r}: expected PAIRS@DOMAIN")
    pairs = []
    for chunk in head.split("+"):
        pos, slash, neg = chunk.partition("/")
        if not pos:
            raise ValueError(f"bad model spec {spec!r}: empty predicate name")
        pairs.append((pos, neg if slash else None))
    if dom == "()":
        return pairs, [()]
    ranges = [_parse_range(r) for r in dom.split(",")]
    domain = [()]
    for r in ranges:
        domain = [t + (v,) for t in domain for v in r]
    return pairs, domain


def _print_answers(answers, dedup: bool) -> int:
    seen = set()
    shown = 0
    for tup in answers:
        line = " ".join(term_to_str(t) for t in tup)
        if dedup:
            if line in seen:
                continue
            seen.add(line)
        print(line)
        shown += 1
    return shown


def _run_one(program, index: int, args) -> int:
    query = program.queries[index]
    ordering = bench.order_indices(query, args.order) if args.order else None
    answers, record = bench.run_query(
        program, query, ordering=ordering,
        program_id=",".join(args.load), query_id=str(index),
    )
    _print_answers(answers, args.dedup)
    print(f"query {index}: {len(answers)} answer(s), "
          f"{record.steps} steps, {record.millis:.1f} ms", file=sys.stderr)
    if query.count is not None and not answers:
        return 1
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="stablog",
        description="Relational logic programs with stable-model negation "
                    "and integrity constraints.",
    )
    ap.add_argument("--load", action="append", default=[], metavar="FILE",
                    help="program file to load (repeatable; loaded in order "
                         "onto one engine)")
    ap.add_argument("files", nargs="*", metavar="FILE",
                    help="additional program files")
    ap.add_argument("--query", default=None, metavar="N|all",
                    help="which loaded query to run (default: all)")
    ap.add_argument("--order", default=None, metavar="PERM",
                    help="goal ordering: comma-separated indices or a "
                         "label string such as ydenrosm")
    ap.add_argument("--count-models", default=None, metavar="SPEC",
                    help="count stable models instead of running queries; "
                         "SPEC is pos[/neg][+...]@LO..HI[,...] or ...@()")
    ap.add_argument("--suggest-order", action="store_true",
                    help="print a suggested goal ordering for the query")
    ap.add_argument("--bench", default=None, metavar="CONFIG",
                    help="run the benchmark suite from a config file and "
                         "print CSV")
    ap.add_argument("--dedup", action="store_true",
                    help="drop duplicate answer lines")
    ap.add_argument("--no-sweep", action="store_true",
                    help="disable the stability sweep on answers")
    ap.add_argument("--steps-limit", type=int, default=None, metavar="N",
                    help="abort once the engine exceeds N search steps")
    return ap


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        if args.bench is not None:
            config = bench.read_config(args.bench)
            sys.stdout.write(bench.bench_suite(config))
            return 0
        args.load = list(args.load) + list(args.files)
        if not args.load:
            print("error: no program files; use --load FILE", file=sys.stderr)
            return 2
        engine = Engine()
        if args.no_sweep:
            engine.sweep_enabled = False
        if args.steps_limit is not None:
            engine.steps_limit = args.steps_limit
        queries = []
        for path in args.load:
            queries.extend(load_file(engine, path, corpus.EXTERNALS).queries)
        loaded = _Loaded(engine, queries)
        if args.count_models is not None:
            pairs, domain = parse_model_spec(args.count_models)
            print(bench.count_models(engine, pairs, domain))
            return 0
        if args.query is None or args.query == "all":
            indices = range(len(queries))
        else:
            indices = [int(args.query)]
        if args.suggest_order:
            for i in indices:
                order = bench.suggest_order(loaded, i)
                labels = bench.order_string(queries[i], order)
                tail = f" ({labels})" if labels else ""
                print(",".join(str(x) for x in order) + tail)
            return 0
        status = 0
        for i in indices:
            status = max(status, _run_one(loaded, i, args))
        return status
    except StepLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (StablogError, ValueError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


class _Loaded:
    """Just enough of a program for bench helpers: engine + queries."""

    __slots__ = ("engine", "queries")

    def __init__(self, engine, queries):
        self.engine = engine
        self.queries = tuple(queries)


if __name__ == "__main__":
    sys.exit(main())
