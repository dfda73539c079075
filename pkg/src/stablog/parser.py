"""Surface syntax: reader, program loader, and printer.

Programs are sequences of S-expression forms:

    (defineo (name param ...) goal ...)
    (constrainto [emitter ...] [verifier-expr ...])
    (external name arity)
    (run N (q ...) goal ...)
    (run* (q ...) goal ...)
    (query (run ...))

Goals are ``(== t u)``, ``(fresh (v ...) goal ...)``,
``(conde [goal ...] ...)``, ``(noto goal)`` and predicate calls
``(name t ...)``. Terms are integers, quoted symbols like ``'s``
(constants), ``(list t ...)`` and bare names, which are variables and
must be bound by an enclosing parameter list, fresh binder or query
variable list. Parentheses and square brackets both delimit lists but
must pair up; ``;`` starts a line comment.

``parse`` stops at syntax: it categorizes top-level forms without
touching an engine. ``load_source``/``load_file`` register the forms on
an engine and return the collected queries. ``print_program`` renders a
parsed tree back to loadable text (parse -> print -> parse yields an
equal tree).
"""

from __future__ import annotations

import re
from bisect import bisect_right
from typing import Callable, Optional

from .constraints import EmitterPattern, PVar
from .engine import Conde, Conj, Engine, Eq, Fresh, Goal
from .errors import ParseError, UnknownExternalError
from .terms import make_list
from .verifier import Arith, Bool, Cmp, Const, ExtCall, SymEq, VarRef

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<comment>;[^\n]*)|(?P<open>[(\[])|(?P<close>[)\]])"
    r"|(?P<quote>')|(?P<atom>[^()\[\]';\s]+)"
)
_INT_RE = re.compile(r"[+-]?\d+\Z")
_CLOSER = {"(": ")", "[": "]"}


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _line_starts(text: str) -> list:
    starts = [0]
    for i, ch in enumerate(text):
        if ch == "\n":
            starts.append(i + 1)
    return starts


def tokenize(text: str) -> list:
    starts = _line_starts(text)

    def position(pos: int) -> tuple:
        row = bisect_right(starts, pos) - 1
        return row + 1, pos - starts[row] + 1

    tokens = []
    pos, end = 0, len(text)
    while pos < end:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            line, col = position(pos)
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        if m.lastgroup not in ("ws", "comment"):
            line, col = position(m.start())
            tokens.append(Token(m.lastgroup, m.group(), line, col))
        pos = m.end()
    line, col = position(end)
    tokens.append(Token("eof", "", line, col))
    return tokens


class Atom:
    """A leaf node: kind is "num", "sym" or "qsym" (quoted constant)."""

    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind: str, value, line: int = 0, col: int = 0):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Atom)
            and self.kind == other.kind
            and self.value == other.value
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Atom({self.kind}, {self.value!r})"


class SList:
    """A bracketed list of nodes. Equality ignores source position."""

    __slots__ = ("items", "line", "col", "bracket")

    def __init__(self, items: tuple, line: int = 0, col: int = 0, bracket: str = "("):
        self.items = tuple(items)
        self.line = line
        self.col = col
        self.bracket = bracket

    def __eq__(self, other) -> bool:
        return isinstance(other, SList) and self.items == other.items

    __hash__ = None

    def __repr__(self) -> str:
        return f"SList({list(self.items)!r})"


class _Reader:
    __slots__ = ("tokens", "i")

    def __init__(self, tokens: list):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def read_form(self):
        tok = self.take()
        if tok.kind == "eof":
            raise ParseError("unexpected end of input", tok.line, tok.col)
        if tok.kind == "close":
            raise ParseError(f"unmatched {tok.text!r}", tok.line, tok.col)
        if tok.kind == "quote":
            inner = self.take()
            if inner.kind != "atom" or _INT_RE.match(inner.text):
                raise ParseError("quote expects a symbol", tok.line, tok.col)
            return Atom("qsym", inner.text, tok.line, tok.col)
        if tok.kind == "atom":
            if _INT_RE.match(tok.text):
                return Atom("num", int(tok.text), tok.line, tok.col)
            return Atom("sym", tok.text, tok.line, tok.col)
        want = _CLOSER[tok.text]
        items = []
        while True:
            nxt = self.peek()
            if nxt.kind == "eof":
                raise ParseError("unexpected end of input", nxt.line, nxt.col)
            if nxt.kind == "close":
                self.take()
                if nxt.text != want:
                    raise ParseError(
                        f"expected {want!r} but found {nxt.text!r}", nxt.line, nxt.col
                    )
                return SList(tuple(items), tok.line, tok.col, tok.text)
            items.append(self.read_form())


def read_forms(text: str) -> list:
    """Read every top-level form in the source text."""
    reader = _Reader(tokenize(text))
    forms = []
    while reader.peek().kind != "eof":
        forms.append(reader.read_form())
    return forms


class SurfaceProgram:
    """Parsed source with top-level forms categorized, not yet loaded.

    ``queries`` holds the run forms themselves; a ``(query ...)``
    wrapper contributes its inner run form. ``forms`` preserves the
    original order and spelling for printing.
    """

    __slots__ = ("forms", "defines", "constraints", "externals", "queries")

    def __init__(self, forms, defines, constraints, externals, queries):
        self.forms = tuple(forms)
        self.defines = tuple(defines)
        self.constraints = tuple(constraints)
        self.externals = tuple(externals)
        self.queries = tuple(queries)


def _head_name(form) -> str:
    if (
        not isinstance(form, SList)
        or not form.items
        or not isinstance(form.items[0], Atom)
        or form.items[0].kind != "sym"
    ):
        line = getattr(form, "line", 0)
        col = getattr(form, "col", 0)
        raise ParseError("expected a (form ...) starting with a name", line, col)
    return form.items[0].value


def _unwrap_query(form) -> SList:
    if len(form.items) != 2:
        raise ParseError("query wraps exactly one run form", form.line, form.col)
    inner = form.items[1]
    if _head_name(inner) not in ("run", "run*"):
        raise ParseError("query expects a (run ...) form", inner.line, inner.col)
    return inner


def parse(source: str) -> SurfaceProgram:
    """Parse source text; raises ParseError with line/column on bad syntax."""
    forms = read_forms(source)
    defines, constraints, externals, queries = [], [], [], []
    for form in forms:
        name = _head_name(form)
        if name == "defineo":
            defines.append(form)
        elif name == "constrainto":
            constraints.append(form)
        elif name == "external":
            externals.append(form)
        elif name in ("run", "run*"):
            queries.append(form)
        elif name == "query":
            queries.append(_unwrap_query(form))
        else:
            raise ParseError(f"unknown form {name!r}", form.line, form.col)
    return SurfaceProgram(forms, defines, constraints, externals, queries)


# goal and term compilation


def _sym_name(node, what: str) -> str:
    if not isinstance(node, Atom) or node.kind != "sym":
        line = getattr(node, "line", 0)
        col = getattr(node, "col", 0)
        raise ParseError(f"expected {what}", line, col)
    return node.value


def _compile_term(node, scope: frozenset) -> Callable:
    if isinstance(node, Atom):
        if node.kind in ("num", "qsym"):
            value = node.value
            return lambda env, _v=value: _v
        if node.value not in scope:
            raise ParseError(f"unbound variable {node.value!r}", node.line, node.col)
        name = node.value
        return lambda env, _n=name: env[_n]
    if isinstance(node, SList) and node.items and _head_name(node) == "list":
        subs = tuple(_compile_term(t, scope) for t in node.items[1:])
        return lambda env, _subs=subs: make_list([t(env) for t in _subs])
    line = getattr(node, "line", 0)
    col = getattr(node, "col", 0)
    raise ParseError("unsupported term", line, col)


def _conj_maker(makers: tuple) -> Callable:
    if len(makers) == 1:
        return makers[0]
    return lambda env, _ms=makers: Conj(tuple(m(env) for m in _ms))


def _compile_goal(engine: Engine, node, scope: frozenset) -> Callable:
    if not isinstance(node, SList) or not node.items:
        line = getattr(node, "line", 0)
        col = getattr(node, "col", 0)
        raise ParseError("expected a goal form", line, col)
    op = _head_name(node)
    args = node.items[1:]
    if op == "==":
        if len(args) != 2:
            raise ParseError("== takes two terms", node.line, node.col)
        u = _compile_term(args[0], scope)
        v = _compile_term(args[1], scope)
        return lambda env, _u=u, _v=v: Eq(_u(env), _v(env))
    if op == "fresh":
        if len(args) < 2 or not isinstance(args[0], SList):
            raise ParseError("fresh takes a binder list and a body", node.line, node.col)
        names = tuple(_sym_name(b, "a variable name") for b in args[0].items)
        if len(set(names)) != len(names):
            raise ParseError("fresh binder must list distinct names", node.line, node.col)
        inner = tuple(_compile_goal(engine, g, scope | set(names)) for g in args[1:])
        body = _conj_maker(inner)

        def maker(env, _names=names, _body=body):
            def build(*terms):
                env2 = dict(env)
                env2.update(zip(_names, terms))
                return _body(env2)

            return Fresh(len(_names), build)

        return maker
    if op == "conde":
        if not args:
            raise ParseError("conde needs at least one clause", node.line, node.col)
        clauses = []
        for clause in args:
            if not isinstance(clause, SList) or not clause.items:
                line = getattr(clause, "line", node.line)
                col = getattr(clause, "col", node.col)
                raise ParseError("conde clause must be a goal list", line, col)
            clauses.append(
                _conj_maker(tuple(_compile_goal(engine, g, scope) for g in clause.items))
            )
        clauses = tuple(clauses)
        return lambda env, _cs=clauses: Conde(tuple(c(env) for c in _cs))
    if op == "noto":
        if len(args) != 1:
            raise ParseError("noto takes one goal", node.line, node.col)
        if isinstance(args[0], SList) and args[0].items:
            inner_op = _head_name(args[0])
            if inner_op in ("==", "fresh", "conde"):
                raise ParseError("noto needs a predicate call", node.line, node.col)
        inner = _compile_goal(engine, args[0], scope)
        return lambda env, _in=inner: engine.noto(_in(env))
    targs = tuple(_compile_term(a, scope) for a in args)
    return lambda env, _n=op, _ts=targs: engine.call(_n, *[t(env) for t in _ts])


def _load_define(engine: Engine, form: SList) -> str:
    if len(form.items) < 3 or not isinstance(form.items[1], SList):
        raise ParseError("defineo takes (name param ...) and a body", form.line, form.col)
    head = form.items[1]
    if not head.items:
        raise ParseError("defineo head must name the predicate", head.line, head.col)
    name = _sym_name(head.items[0], "a predicate name")
    params = tuple(_sym_name(p, "a parameter name") for p in head.items[1:])
    if len(set(params)) != len(params):
        raise ParseError("duplicate parameter name", head.line, head.col)
    body = _conj_maker(
        tuple(_compile_goal(engine, g, frozenset(params)) for g in form.items[2:])
    )

    def call_body(*terms, _params=params, _body=body):
        return _body(dict(zip(_params, terms)))

    engine.defineo(name, len(params), call_body)
    return name


_ARITH_ARITY = {"-": 2, "/": 2, "mod": 2, "floor": 1, "abs": 1}
_CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")


def compile_expr(node):
    """Compile a surface verifier expression into an expression tree."""
    if isinstance(node, Atom):
        if node.kind in ("num", "qsym"):
            return Const(node.value)
        return VarRef(node.value)
    if not isinstance(node, SList) or not node.items:
        line = getattr(node, "line", 0)
        col = getattr(node, "col", 0)
        raise ParseError("expected a verifier expression", line, col)
    op = _sym_name(node.items[0], "an operator name")
    args = node.items[1:]

    def need(n: int):
        if len(args) != n:
            raise ParseError(f"{op} takes {n} argument{'s' * (n != 1)}", node.line, node.col)

    if op in ("+", "*"):
        if len(args) < 2:
            raise ParseError(f"{op} takes at least two arguments", node.line, node.col)
        return Arith(op, [compile_expr(a) for a in args])
    if op in _ARITH_ARITY:
        need(_ARITH_ARITY[op])
        return Arith(op, [compile_expr(a) for a in args])
    if op in _CMP_OPS:
        need(2)
        return Cmp(op, compile_expr(args[0]), compile_expr(args[1]))
    if op == "eq?":
        need(2)
        return SymEq(compile_expr(args[0]), compile_expr(args[1]))
    if op in ("and", "or"):
        if not args:
            raise ParseError(f"{op} needs at least one argument", node.line, node.col)
        return Bool(op, [compile_expr(a) for a in args])
    if op == "not":
        need(1)
        return Bool("not", [compile_expr(args[0])])
    return ExtCall(op, [compile_expr(a) for a in args])


def _compile_pattern(node, negated: bool = False) -> EmitterPattern:
    if not isinstance(node, SList) or not node.items:
        line = getattr(node, "line", 0)
        col = getattr(node, "col", 0)
        raise ParseError("expected an emitter pattern", line, col)
    name = _sym_name(node.items[0], "a predicate name")
    if name == "noto":
        if negated or len(node.items) != 2:
            raise ParseError("noto pattern wraps one positive pattern", node.line, node.col)
        return _compile_pattern(node.items[1], negated=True)
    pattern_args = []
    for a in node.items[1:]:
        if isinstance(a, Atom) and a.kind in ("num", "qsym"):
            pattern_args.append(a.value)
        elif isinstance(a, Atom) and a.kind == "sym":
            pattern_args.append(PVar(a.value))
        else:
            line = getattr(a, "line", node.line)
            col = getattr(a, "col", node.col)
            raise ParseError("pattern arguments are constants or variables", line, col)
    return EmitterPattern(name, tuple(pattern_args), negated=negated)


def _load_constraint(engine: Engine, form: SList) -> None:
    if len(form.items) != 3 or not all(isinstance(x, SList) for x in form.items[1:]):
        raise ParseError(
            "constrainto takes [emitter ...] and [expr ...]", form.line, form.col
        )
    emitters = tuple(_compile_pattern(p) for p in form.items[1].items)
    if not emitters:
        raise ParseError("constrainto needs at least one emitter", form.line, form.col)
    exprs = tuple(compile_expr(e) for e in form.items[2].items)
    engine.constrainto(emitters, exprs)


class Query:
    """A run form bound to an engine.

    ``count`` is the requested number of answers (None for all),
    ``qvars`` the query variable names, ``goal_nodes`` the source forms
    of the reorderable goals (used by ordering tools). A query whose
    sole goal is one ``fresh`` form is unwrapped so its body goals are
    the reorderable unit; ``fresh_names`` holds that binder.
    """

    __slots__ = ("engine", "count", "qvars", "goal_nodes", "_makers", "fresh_names")

    def __init__(self, engine, count, qvars, goal_nodes, makers, fresh_names=()):
        self.engine = engine
        self.count = count
        self.qvars = tuple(qvars)
        self.goal_nodes = tuple(goal_nodes)
        self._makers = tuple(makers)
        self.fresh_names = tuple(fresh_names)

    def __len__(self) -> int:
        return len(self._makers)

    def builder(self, order: Optional[list] = None) -> Callable[..., Goal]:
        makers = self._makers
        if order is not None:
            if sorted(order) != list(range(len(makers))):
                raise ValueError("ordering must permute the query goals exactly")
            makers = tuple(makers[i] for i in order)
        body = _conj_maker(makers)
        names = self.qvars
        fresh_names = self.fresh_names
        if not fresh_names:
            def build(*terms):
                return body(dict(zip(names, terms)))

            return build

        def build(*terms):
            env0 = dict(zip(names, terms))

            def inner(*fterms):
                env = dict(env0)
                env.update(zip(fresh_names, fterms))
                return body(env)

            return Fresh(len(fresh_names), inner)

        return build

    def run(self, count=-1, order: Optional[list] = None) -> list:
        """Execute; count=-1 keeps the form's own answer count."""
        n = self.count if count == -1 else count
        return self.engine.run(n, self.qvars, self.builder(order))


def _compile_query(engine: Engine, form: SList) -> Query:
    items = form.items
    star = items[0].value == "run*"
    want = 2 if star else 3
    if len(items) < want + 1:
        raise ParseError("run takes a count, variables and goals", form.line, form.col)
    if star:
        count = None
    else:
        if not (isinstance(items[1], Atom) and items[1].kind == "num" and items[1].value >= 1):
            raise ParseError("run count must be a positive integer", form.line, form.col)
        count = items[1].value
    binder = items[want - 1]
    if not isinstance(binder, SList) or not binder.items:
        raise ParseError("run needs a (q ...) variable list", form.line, form.col)
    qvars = tuple(_sym_name(v, "a query variable") for v in binder.items)
    if len(set(qvars)) != len(qvars):
        raise ParseError("duplicate query variable", binder.line, binder.col)
    goal_nodes = items[want:]
    scope = frozenset(qvars)
    fresh_names = ()
    if (len(goal_nodes) == 1 and isinstance(goal_nodes[0], SList)
            and len(goal_nodes[0].items) >= 2
            and isinstance(goal_nodes[0].items[0], Atom)
            and goal_nodes[0].items[0].kind == "sym"
            and goal_nodes[0].items[0].value == "fresh"
            and isinstance(goal_nodes[0].items[1], SList)):
        wrapper = goal_nodes[0]
        fresh_names = tuple(_sym_name(b, "a variable name") for b in wrapper.items[1].items)
        if len(set(fresh_names)) != len(fresh_names):
            raise ParseError("fresh binder must list distinct names",
                             wrapper.items[1].line, wrapper.items[1].col)
        goal_nodes = tuple(wrapper.items[2:])
        scope = scope | set(fresh_names)
    makers = tuple(_compile_goal(engine, g, scope) for g in goal_nodes)
    return Query(engine, count, qvars, goal_nodes, makers, fresh_names)


class LoadedProgram:
    """Source registered on an engine plus the collected queries."""

    __slots__ = ("engine", "surface", "queries", "define_names", "external_names",
                 "constraint_count")

    def __init__(self, engine, surface, queries, define_names, external_names,
                 constraint_count):
        self.engine = engine
        self.surface = surface
        self.queries = tuple(queries)
        self.define_names = tuple(define_names)
        self.external_names = tuple(external_names)
        self.constraint_count = constraint_count


def load_source(engine: Engine, source: str, externals: Optional[dict] = None) -> LoadedProgram:
    """Parse and register source on the engine.

    ``externals`` maps names declared by (external name arity) forms to
    the Python callables that implement them.
    """
    surface = parse(source)
    provided = dict(externals or {})
    define_names, external_names, queries = [], [], []
    constraint_count = 0
    for form in surface.forms:
        name = _head_name(form)
        if name == "defineo":
            define_names.append(_load_define(engine, form))
        elif name == "constrainto":
            _load_constraint(engine, form)
            constraint_count += 1
        elif name == "external":
            if len(form.items) != 3:
                raise ParseError("external takes a name and an arity", form.line, form.col)
            ext_name = _sym_name(form.items[1], "an external name")
            arity_node = form.items[2]
            if not (isinstance(arity_node, Atom) and arity_node.kind == "num"
                    and arity_node.value >= 0):
                raise ParseError("external arity must be a non-negative integer",
                                 form.line, form.col)
            fn = provided.get(ext_name)
            if fn is None:
                raise UnknownExternalError(
                    f"external function {ext_name!r} not supplied by the host"
                )
            engine.external(ext_name, arity_node.value, fn)
            external_names.append(ext_name)
        elif name == "query":
            queries.append(_compile_query(engine, _unwrap_query(form)))
        else:
            queries.append(_compile_query(engine, form))
    return LoadedProgram(engine, surface, queries, define_names, external_names,
                         constraint_count)


def load_file(engine: Engine, path: str, externals: Optional[dict] = None) -> LoadedProgram:
    with open(path, "r", encoding="utf-8") as fh:
        return load_source(engine, fh.read(), externals)


def print_node(node) -> str:
    """Render one parsed node back to surface syntax."""
    if isinstance(node, Atom):
        if node.kind == "qsym":
            return "'" + node.value
        return str(node.value)
    inner = " ".join(print_node(item) for item in node.items)
    return node.bracket + inner + _CLOSER[node.bracket]


def print_program(surface: SurfaceProgram) -> str:
    return "".join(print_node(form) + "\n" for form in surface.forms)
