"""Query benchmarking, stable-model counting and goal-order suggestion.

``run_query`` executes one query of a loaded program, optionally with a
reordered goal list, and reports answers plus a BenchRecord.
``count_models`` enumerates stable models by branching over dual
predicate pairs. ``suggest_order`` proposes a goal order for a query by
grouping goals around the smallest constraints they feed.
``bench_suite`` runs a table of configurations and renders CSV.
"""

from __future__ import annotations

import csv
import io
import re
import time
import warnings
from graphlib import CycleError, TopologicalSorter
from typing import Optional, Union

from . import corpus
from .constraints import PVar
from .engine import Conde, Conj, Engine
from .errors import NonDualPairError
from .parser import Atom, LoadedProgram, Query, SList, load_source
from .verifier import free_vars

_INDEX_ORDER_RE = re.compile(r"\d+(,\d+)*\Z")


class BenchRecord:
    """One benchmark row: identifiers, answers found, steps, wall time."""

    __slots__ = ("program", "query", "ordering", "answers", "steps", "millis")

    def __init__(self, program, query, ordering, answers, steps, millis):
        self.program = program
        self.query = query
        self.ordering = ordering
        self.answers = answers
        self.steps = steps
        self.millis = millis

    def row(self) -> list:
        return [self.program, self.query, self.ordering,
                self.answers, self.steps, self.millis]

    def __repr__(self) -> str:
        return (f"BenchRecord(program={self.program!r}, query={self.query!r}, "
                f"ordering={self.ordering!r}, answers={self.answers}, "
                f"steps={self.steps}, millis={self.millis})")


def goal_label(node) -> Optional[str]:
    """The first quoted-symbol argument of a call form, if any."""
    if not isinstance(node, SList):
        return None
    for item in node.items[1:]:
        if isinstance(item, Atom) and item.kind == "qsym":
            return str(item.value)
    return None


def order_indices(query: Query, ordering) -> Optional[list]:
    """Resolve an ordering spec against a query's goal list.

    Accepts None or "identity" (keep source order), a comma list of
    goal indices covering every goal, a letter string like "ydenrosm"
    naming labeled goals by their first character (unnamed goals keep
    their relative order after the named ones), or an index sequence.
    """
    if ordering is None:
        return None
    if not isinstance(ordering, str):
        return list(ordering)
    spec = ordering.strip()
    if spec.lower() == "identity" or not spec:
        return None
    if _INDEX_ORDER_RE.match(spec):
        return [int(p) for p in spec.split(",")]
    labels = [goal_label(node) for node in query.goal_nodes]
    perm = []
    for ch in spec.lower():
        for i, label in enumerate(labels):
            if i not in perm and label and label[0].lower() == ch:
                perm.append(i)
                break
        else:
            raise ValueError(f"no unused query goal labeled {ch!r}")
    perm.extend(i for i in range(len(labels)) if i not in perm)
    return perm


def order_string(query: Query, indices) -> Optional[str]:
    """Compact letter form of an ordering, when every goal it moves is
    labeled by a distinct initial; None otherwise."""
    labels = [goal_label(node) for node in query.goal_nodes]
    chars = [labels[i][0] for i in indices if labels[i]]
    if chars and len(set(chars)) == len(chars):
        return "".join(chars).upper()
    return None


def run_query(program: LoadedProgram, query: Union[int, Query] = 0,
              ordering=None, count: Optional[int] = -1,
              program_id: str = "program", query_id: Optional[str] = None) -> tuple:
    """Execute one query; returns (answers, BenchRecord).

    ``count`` -1 keeps the query form's own answer count; None asks for
    all answers. ``ordering`` is anything order_indices accepts.
    """
    if isinstance(query, int):
        if query_id is None:
            query_id = f"query{query}"
        query = program.queries[query]
    elif query_id is None:
        query_id = "query"
    order = order_indices(query, ordering)
    if isinstance(ordering, str) and ordering.strip():
        shown = ordering.strip()
    elif order is not None:
        shown = ",".join(str(i) for i in order)
    else:
        shown = "identity"
    t0 = time.perf_counter()
    answers = query.run(count=count, order=order)
    millis = int(round((time.perf_counter() - t0) * 1000))
    record = BenchRecord(program_id, query_id, shown, len(answers),
                         query.engine.steps, millis)
    return answers, record


# stable-model counting


def _as_tuple(item) -> tuple:
    if isinstance(item, tuple):
        return item
    if isinstance(item, list):
        return tuple(item)
    return (item,)


def _check_duality(proven: frozenset, pairs, tuples) -> None:
    for pos, neg in pairs:
        if neg is None:
            continue
        for t in tuples:
            in_pos = (pos, *t) in proven
            in_neg = (neg, *t) in proven
            if in_pos == in_neg:
                held = "both hold" if in_pos else "neither holds"
                raise NonDualPairError(
                    f"{pos}/{neg} is not a dual pair: {held} for arguments {t}"
                )


def count_models(program: Union[LoadedProgram, Engine], pairs, domain,
                 collect: bool = False):
    """Count stable models by branching over dual pairs per ground tuple.

    ``pairs`` lists (posName, negName) duals; negName None branches
    between the positive call and its negation. ``domain`` lists ground
    argument tuples. Models are ProvenTrue atom sets, deduplicated.
    Returns the count, or (count, models) when collecting.
    """
    engine = program.engine if isinstance(program, LoadedProgram) else program
    tuples = [_as_tuple(t) for t in domain]
    norm = [(p, None) if isinstance(p, str) else (p[0], p[1]) for p in pairs]
    clauses = []
    for t in tuples:
        for pos, neg in norm:
            positive = engine.call(pos, *t)
            negative = engine.call(neg, *t) if neg else engine.noto(engine.call(pos, *t))
            clauses.append(Conde((positive, negative)))
    goal = Conj(tuple(clauses))
    seen = set()
    models = []
    for state in engine.run_states(None, goal):
        proven = state.proven_atoms()
        _check_duality(proven, norm, tuples)
        if proven not in seen:
            seen.add(proven)
            models.append(proven)
    if collect:
        return len(models), models
    return len(models)


# goal-order suggestion


def _verifier_first_use(constraint) -> list:
    order = []
    for expr in constraint.verifier_exprs:
        free_vars(expr, order)
    return order


def _pattern_feeds(pattern, node) -> bool:
    if not isinstance(node, SList) or not node.items:
        return False
    head = node.items[0]
    if not (isinstance(head, Atom) and head.kind == "sym" and head.value == pattern.name):
        return False
    args = node.items[1:]
    if len(args) != len(pattern.args):
        return False
    for parg, narg in zip(pattern.args, args):
        if isinstance(parg, PVar):
            continue
        if isinstance(narg, Atom) and narg.kind == "sym":
            continue
        if not (isinstance(narg, Atom) and narg.value == parg):
            return False
    return True


def _first_use_position(constraint, node, first_use) -> int:
    best = len(first_use)
    for pattern in constraint.positives:
        if not _pattern_feeds(pattern, node):
            continue
        for var in pattern.variables():
            if var in first_use:
                best = min(best, first_use.index(var))
    return best


def suggest_order(program: LoadedProgram, query: Union[int, Query] = 0) -> list:
    """Suggest a goal order for a query: goals feeding smaller
    constraints come first, ordered within a group by where their
    emitted values first appear in that constraint's verifier.

    Goals feeding no constraint keep their source order at the end.
    Conflicting within-group orders fall back to the source order with
    a warning. Returns goal indices (use with run_query's ordering).
    """
    q = program.queries[query] if isinstance(query, int) else query
    constraints = q.engine.constraints.constraints
    first_uses = {c.index: _verifier_first_use(c) for c in constraints}
    n = len(q.goal_nodes)
    # Which emitter slots of each constraint could a goal's atom match?
    feeds = {
        c.index: [
            frozenset(
                j for j, p in enumerate(c.positives)
                if _pattern_feeds(p, q.goal_nodes[i])
            )
            for i in range(n)
        ]
        for c in constraints
    }
    # A constraint orders goals only when it gates on several emitters
    # and tells its feeding goals apart; single-emitter checks fire at
    # emission wherever they sit, and all-variable patterns press on
    # every goal equally.
    eligible = [
        c for c in constraints
        if len(c.emitters) >= 2
        and len({fs for fs in feeds[c.index] if fs}) > 1
    ]
    rank = {}
    for i in range(n):
        sizes = [len(c.emitters) for c in eligible if feeds[c.index][i]]
        if sizes:
            rank[i] = min(sizes)
    graph = {i: set() for i in range(n)}
    for a in rank:
        for b in rank:
            if rank[a] < rank[b]:
                graph[b].add(a)
        for u in range(n):
            if u not in rank:
                graph[u].add(a)
    for c in eligible:
        members = [
            (_first_use_position(c, q.goal_nodes[i], first_uses[c.index]), i)
            for i in rank
            if rank[i] == len(c.emitters) and feeds[c.index][i]
        ]
        members.sort()
        for (_, before), (_, after) in zip(members, members[1:]):
            graph[after].add(before)
    sorter = TopologicalSorter(graph)
    try:
        sorter.prepare()
        result = []
        while sorter.is_active():
            ready = sorted(sorter.get_ready())
            result.extend(ready)
            sorter.done(*ready)
        return result
    except CycleError:
        warnings.warn("constraint verifier orders conflict; keeping source order")
        return list(range(n))


# benchmark suite


def _resolve_program(name: str) -> tuple:
    """Map a config program name to (source, externals)."""
    spec = name.strip()
    if spec == "send_big":
        return corpus.send_more_money("big"), None
    if spec == "send_small":
        return corpus.send_more_money("small"), None
    if spec == "send_oracle":
        return corpus.send_more_money("small+oracle"), corpus.EXTERNALS
    parts = spec.split(":")
    if parts[0] == "queens" and len(parts) == 2:
        return corpus.queens_program(int(parts[1])), None
    if parts[0] == "pick_free" and len(parts) in (2, 3):
        if len(parts) == 3 and parts[2] == "row":
            return corpus.pick_free_program(int(parts[1]), row_constraint=True), None
        if len(parts) == 3 and parts[2] == "one":
            return corpus.pick_free_program(int(parts[1]), variables=1), None
        if len(parts) == 2:
            return corpus.pick_free_program(int(parts[1])), None
    if parts[0] == "arith" and len(parts) == 3:
        return corpus.arithmetic_relations(int(parts[1]), int(parts[2])), None
    with open(spec, "r", encoding="utf-8") as fh:
        return fh.read(), corpus.EXTERNALS


def read_config(source: Union[str, dict]) -> dict:
    """Read a flat key-value config: one ``key = value`` per line,
    ``#`` comments. A dict passes through unchanged."""
    if isinstance(source, dict):
        return dict(source)
    config = {}
    with open(source, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{source}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            config[key.strip()] = value.strip()
    return config


def _split(value: str) -> list:
    return [part.strip() for part in value.split(",") if part.strip()]


def _bench_one(program_name: str, query_spec: str, ordering_spec: str,
               count_spec: str) -> BenchRecord:
    source, externals = _resolve_program(program_name)
    engine = Engine()
    program = load_source(engine, source, externals)
    if query_spec.startswith("letter:"):
        letter = query_spec.split(":", 1)[1]
        extra = load_source(engine, f"(run 1 (q) (assign '{letter} q))")
        query = extra.queries[0]
    elif query_spec.startswith("query:"):
        query = program.queries[int(query_spec.split(":", 1)[1])]
    elif query_spec == "full":
        query = program.queries[0]
    else:
        raise ValueError(f"unknown query spec {query_spec!r}")
    if count_spec == "all":
        count = None
    elif count_spec in ("", "default"):
        count = -1
    else:
        count = int(count_spec)
    ordering = None if ordering_spec in ("", "identity") else ordering_spec
    _, record = run_query(program, query, ordering=ordering, count=count,
                          program_id=program_name, query_id=query_spec)
    return record


CSV_COLUMNS = ("program", "query", "ordering", "answers", "steps", "millis")


def bench_suite(config: Union[str, dict]) -> str:
    """Run program x query x ordering configurations; returns CSV text.

    Config keys: ``programs`` (comma list of builtin names or file
    paths), ``queries`` (full, query:N or letter:x), ``orderings``
    (identity, letter strings or index lists), ``count`` (default, all
    or a number), ``repeat`` (rows per configuration, default 1).
    """
    cfg = read_config(config)
    programs = _split(cfg.get("programs", cfg.get("program", "")))
    if not programs:
        raise ValueError("bench config names no programs")
    queries = _split(cfg.get("queries", cfg.get("query", "full")))
    orderings = _split(cfg.get("orderings", cfg.get("ordering", "identity")))
    count_spec = cfg.get("count", "default")
    repeat = int(cfg.get("repeat", "1"))
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(CSV_COLUMNS)
    for program_name in programs:
        for query_spec in queries:
            for ordering_spec in orderings:
                for _ in range(repeat):
                    record = _bench_one(program_name, query_spec,
                                        ordering_spec, count_spec)
                    writer.writerow(record.row())
    return out.getvalue()
