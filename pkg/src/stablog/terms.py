"""First-order terms and unification.

The term language is deliberately small: logic variables, symbols
(plain Python ``str``), integers (plain ``int``), cons pairs and the
empty list ``nil``. Substitutions are triangular maps from variable id
to term; ``walk`` chases bindings one variable at a time, ``unify``
extends a substitution with an occurs check, and ``reify`` rewrites a
term with canonical ``_0``, ``_1`` placeholders for unbound variables.
"""

from __future__ import annotations

from typing import Any, Iterable, Optional

Term = Any
Subst = dict


class Var:
    """A logic variable, identified by an integer id."""

    __slots__ = ("id",)

    def __init__(self, id: int):
        self.id = id

    def __repr__(self) -> str:
        return f"_{self.id}"

    def __eq__(self, other: object) -> bool:
        return type(other) is Var and other.id == self.id

    def __hash__(self) -> int:
        return hash(("var", self.id))


class Nil:
    """The empty list. A singleton; compare with ``is nil``."""

    __slots__ = ()
    _instance: Optional["Nil"] = None

    def __new__(cls) -> "Nil":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "()"


nil = Nil()


class Pair:
    """A cons cell. Proper lists are Pair chains ending in ``nil``."""

    __slots__ = ("head", "tail")

    def __init__(self, head: Term, tail: Term):
        self.head = head
        self.tail = tail

    def __eq__(self, other: object) -> bool:
        if type(other) is not Pair:
            return NotImplemented
        return other.head == self.head and other.tail == self.tail

    def __hash__(self) -> int:
        return hash(("pair", self.head, self.tail))

    def __repr__(self) -> str:
        return term_to_str(self)


def make_list(items: Iterable[Term]) -> Term:
    """Build a proper list term from a Python iterable."""
    out: Term = nil
    for item in reversed(list(items)):
        out = Pair(item, out)
    return out


def iter_list(term: Term) -> Optional[list]:
    """Return the elements of a proper list term, or None if improper."""
    out = []
    while type(term) is Pair:
        out.append(term.head)
        term = term.tail
    return out if term is nil else None


def walk(term: Term, subst: Subst) -> Term:
    """Chase variable bindings until a non-variable or fresh variable."""
    while type(term) is Var:
        found = subst.get(term.id, term)
        if found is term:
            return term
        term = found
    return term


def walk_star(term: Term, subst: Subst) -> Term:
    """Walk a term recursively, resolving bindings inside pairs."""
    term = walk(term, subst)
    if type(term) is Pair:
        head = walk_star(term.head, subst)
        tail = walk_star(term.tail, subst)
        if head is term.head and tail is term.tail:
            return term
        return Pair(head, tail)
    return term


def occurs(var: Var, term: Term, subst: Subst) -> bool:
    """True when ``var`` appears inside ``term`` under ``subst``."""
    term = walk(term, subst)
    if type(term) is Var:
        return term.id == var.id
    if type(term) is Pair:
        return occurs(var, term.head, subst) or occurs(var, term.tail, subst)
    return False


def _extend(var: Var, term: Term, subst: Subst) -> Optional[Subst]:
    # occurs check on: binding a variable to a term containing it fails.
    if occurs(var, term, subst):
        return None
    new = subst.copy()
    new[var.id] = term
    return new


def unify(u: Term, v: Term, subst: Subst) -> Optional[Subst]:
    """Unify two terms; returns the extended substitution or None.

    The returned substitution is a fresh dict when any binding was
    added, and the input dict unchanged when the terms were already
    equal.
    """
    u = walk(u, subst)
    v = walk(v, subst)
    if u is v:
        return subst
    tu = type(u)
    tv = type(v)
    if tu is Var:
        if tv is Var and v.id == u.id:
            return subst
        return _extend(u, v, subst)
    if tv is Var:
        return _extend(v, u, subst)
    if tu is Pair and tv is Pair:
        subst1 = unify(u.head, v.head, subst)
        if subst1 is None:
            return None
        return unify(u.tail, v.tail, subst1)
    if tu is tv and u == v:
        return subst
    # int/symbol mismatch, or unequal constants
    return None


def is_ground(term: Term) -> bool:
    """True when the (already walked) term contains no variables."""
    if type(term) is Var:
        return False
    if type(term) is Pair:
        return is_ground(term.head) and is_ground(term.tail)
    return True


def reify(term: Term, subst: Subst) -> Term:
    """Resolve a term and rename leftover variables to _0, _1, ..."""
    term = walk_star(term, subst)
    names: dict[int, Var] = {}
    return _reify_fresh(term, names)


def reify_all(terms: Iterable[Term], subst: Subst) -> tuple:
    """Reify several terms with one shared placeholder numbering."""
    walked = [walk_star(t, subst) for t in terms]
    names: dict[int, Var] = {}
    return tuple(_reify_fresh(t, names) for t in walked)


def _reify_fresh(term: Term, names: dict) -> Term:
    if type(term) is Var:
        if term.id not in names:
            names[term.id] = f"_{len(names)}"
        return names[term.id]
    if type(term) is Pair:
        return Pair(_reify_fresh(term.head, names), _reify_fresh(term.tail, names))
    return term


def term_to_str(term: Term) -> str:
    """Print a term in surface syntax. Symbols print bare."""
    if type(term) is Pair or term is nil:
        items = []
        while type(term) is Pair:
            items.append(term_to_str(term.head))
            term = term.tail
        if term is nil:
            return "(" + " ".join(items) + ")"
        return "(" + " ".join(items) + " . " + term_to_str(term) + ")"
    if type(term) is bool:
        return "#t" if term else "#f"
    return str(term)
