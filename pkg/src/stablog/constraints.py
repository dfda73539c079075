"""Integrity constraints over emitted atoms.

A constraint declares a forbidden situation: a set of atom patterns
(some possibly negated) plus a verifier formula over the pattern
variables. A branch that makes every positive pattern true, no negated
pattern true, and the verifier true is inconsistent and dies.

Constraints without negated patterns are checked eagerly: every time a
branch proves a new ground atom the store joins it against previously
emitted atoms, and any completed combination whose verifier holds kills
the branch on the spot.

Constraints with negated patterns cannot be judged mid-search (a
negated atom may still become provable later), so they are settled at
answer time. For each match of the positive patterns, found by running
them as a query against the answer state, the check requires one of the
negated atoms to hold. An atom holds only if it is provable, so the
store drives that proof on the main stream: the proof may bind values,
emit atoms and trigger eager constraints, and it backtracks like any
other goal. Answers with no surviving completion are rejected.

Positive patterns of a deferred constraint are re-enumerated by
derivation, not read from a log. Matches whose derivation depends on
choices not taken in the current branch are therefore visible too;
deferred constraints should use choice-independent (fact-like)
predicates as their positive triggers.
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional

from .errors import (
    DeferredGroundingError,
    DuplicateExternalError,
    UnboundVerifierVariableError,
)
from .terms import Var, is_ground, walk_star
from .verifier import Cmp, SymEq, VarRef, compile_verifier, evaluate, free_vars


class PVar:
    """A pattern variable inside constraint emitter patterns."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return f"PVar({self.name!r})"

    def __eq__(self, other) -> bool:
        return type(other) is PVar and other.name == self.name

    def __hash__(self) -> int:
        return hash(("pvar", self.name))


class EmitterPattern:
    """One atom pattern: predicate name, args (PVar or ground), polarity."""

    __slots__ = ("name", "args", "negated")

    def __init__(self, name: str, args: Iterable, negated: bool = False):
        self.name = name
        self.args = tuple(args)
        self.negated = negated

    def variables(self) -> list:
        seen = []
        for a in self.args:
            if type(a) is PVar and a.name not in seen:
                seen.append(a.name)
        return seen

    def __repr__(self) -> str:
        sign = "not " if self.negated else ""
        return f"<{sign}{self.name}/{len(self.args)}>"


_UNBOUND = object()


def _match(pattern: EmitterPattern, atom_args: tuple, env: dict) -> Optional[dict]:
    """Match logged atom args against a pattern under env; None on clash."""
    out = env
    for p, a in zip(pattern.args, atom_args):
        if type(p) is PVar:
            bound = out.get(p.name, _UNBOUND)
            if bound is _UNBOUND:
                if out is env:
                    out = dict(env)
                out[p.name] = a
            elif bound != a:
                return None
        elif p != a:
            return None
    return out


class IntegrityConstraint:
    __slots__ = ("index", "emitters", "positives", "negatives",
                 "verifier_exprs", "params", "verifier", "solved")

    def __init__(self, index, emitters, positives, negatives,
                 verifier_exprs, params, verifier, solved):
        self.index = index
        self.emitters = emitters
        self.positives = positives
        self.negatives = negatives
        self.verifier_exprs = verifier_exprs
        self.params = params          # verifier arg names, first-use order
        self.verifier = verifier      # compiled conjunction
        self.solved = solved          # [(var, expr)] for negative-only vars


def _chain_call(engine, stream, name, arity, args):
    for s in stream:
        yield from engine.call_stream(name, arity, args, s, None)


class ConstraintStore:
    """All constraints and externals registered on one engine."""

    def __init__(self, engine):
        self.engine = engine
        self._constraints: list = []
        self._deferred: list = []
        self._eager_by_pred: dict = {}   # pred name -> [constraint, ...]
        self._logged: frozenset = frozenset()
        self._externals: dict = {}       # name -> (fn, arity)

    # registration

    def register_external(self, name: str, arity: int, fn: Callable) -> None:
        if name in self._externals:
            raise DuplicateExternalError(f"external {name!r} registered twice")
        self._externals[name] = (fn, arity)

    def register(self, emitters, verifier_exprs) -> IntegrityConstraint:
        emitters = tuple(emitters)
        verifier_exprs = tuple(verifier_exprs)
        positives = tuple(e for e in emitters if not e.negated)
        negatives = tuple(e for e in emitters if e.negated)

        pos_vars = set()
        for p in positives:
            pos_vars.update(p.variables())

        params = []
        for expr in verifier_exprs:
            for v in free_vars(expr):
                if v not in params:
                    params.append(v)

        solved = self._solve_chain(verifier_exprs, pos_vars, params)
        known = pos_vars | {v for v, _ in solved}

        for v in params:
            if v not in known:
                raise UnboundVerifierVariableError(
                    f"verifier variable {v!r} is not bound by any emitter")
        for p in negatives:
            for v in p.variables():
                if v not in known:
                    raise DeferredGroundingError(
                        f"negated pattern variable {v!r} has no value at check time")

        compiled = compile_verifier(verifier_exprs, params, self._externals)
        c = IntegrityConstraint(len(self._constraints), emitters, positives,
                                negatives, verifier_exprs, params, compiled, solved)
        self._constraints.append(c)
        if negatives:
            self._deferred.append(c)
        else:
            logged = set(self._logged)
            for p in positives:
                self._eager_by_pred.setdefault(p.name, []).append(c)
                logged.add(p.name)
            self._logged = frozenset(logged)
        return c

    @staticmethod
    def _solve_chain(verifier_exprs, pos_vars, params):
        """Resolve variables outside the positive patterns from equalities.

        A conjunct (= x e) or (sym= x e) defines x when every variable of
        e is already known. Chains resolve iteratively; order matters for
        evaluation, so the result is a list.
        """
        solved = []
        known = set(pos_vars)
        pending = [v for v in params if v not in known]
        progress = True
        while pending and progress:
            progress = False
            for expr in verifier_exprs:
                if type(expr) not in (Cmp, SymEq):
                    continue
                if type(expr) is Cmp and expr.op != "=":
                    continue
                for var_side, expr_side in ((expr.lhs, expr.rhs), (expr.rhs, expr.lhs)):
                    if type(var_side) is not VarRef:
                        continue
                    v = var_side.name
                    if v in known:
                        continue
                    if not all(u in known for u in free_vars(expr_side)):
                        continue
                    solved.append((v, expr_side))
                    known.add(v)
                    pending = [p for p in pending if p != v]
                    progress = True
                    break
        return solved

    def has_deferred(self) -> bool:
        return bool(self._deferred)

    @property
    def constraints(self) -> tuple:
        return tuple(self._constraints)

    # eager path

    def on_emit(self, state, key):
        """Log a newly proven atom; None if a constraint is violated."""
        name = key[0]
        if name not in self._logged:
            return state
        args = key[1:]
        chain = state.emitted.get(name)
        node = chain
        while node is not None:
            if node[0] == args:
                return state  # already logged and checked in this branch
            node = node[1]
        emitted = state.emitted.copy()
        emitted[name] = (args, chain)
        for c in self._eager_by_pred[name]:
            if self._violates(c, emitted, name, args):
                return None
        return state.with_emitted(emitted)

    def _violates(self, c, emitted, name, new_args) -> bool:
        pats = c.positives
        for pin, p in enumerate(pats):
            if p.name != name:
                continue
            env = _match(p, new_args, {})
            if env is None:
                continue
            if self._join(c, pats, emitted, pin, 0, env, name):
                return True
        return False

    def _join(self, c, pats, emitted, pin, j, env, new_name) -> bool:
        # slot pin holds the new atom; slots before it use old atoms only
        # so each combination is found exactly once across emissions
        if j == len(pats):
            if c.solved:
                env = dict(env)
                for v, expr in c.solved:
                    env[v] = evaluate(expr, env, self._externals)
            return bool(c.verifier(*(env[v] for v in c.params)))
        if j == pin:
            return self._join(c, pats, emitted, pin, j + 1, env, new_name)
        p = pats[j]
        node = emitted.get(p.name)
        if j < pin and p.name == new_name:
            node = node[1]  # the chain head is the new atom
        while node is not None:
            env2 = _match(p, node[0], env)
            if env2 is not None and self._join(c, pats, emitted, pin, j + 1, env2, new_name):
                return True
            node = node[1]
        return False

    def pending_instances(self, state) -> list:
        """Partially matched eager constraints, for inspection.

        Each entry is (constraint index, matched pattern count, env) for
        every consistent match of a proper prefix of the patterns against
        the emitted log.
        """
        out = []
        for c in self._constraints:
            if c.negatives:
                continue
            self._prefixes(c, state.emitted, 0, {}, out)
        return out

    def _prefixes(self, c, emitted, j, env, out) -> None:
        if j == len(c.positives):
            return
        p = c.positives[j]
        node = emitted.get(p.name)
        while node is not None:
            env2 = _match(p, node[0], env)
            if env2 is not None:
                if j + 1 < len(c.positives):
                    out.append((c.index, j + 1, dict(env2)))
                self._prefixes(c, emitted, j + 1, env2, out)
            node = node[1]

    # deferred path

    def deferred_stream(self, state):
        """Settle deferred constraints for one answer state.

        Yields zero or more extended states: one per surviving way of
        completing the answer so that every deferred constraint holds.
        """
        if not self._deferred:
            yield state
            return
        yield from self._drive(state)

    def _drive(self, state):
        # find the first unsatisfied combination; prove one of its negated
        # atoms on the main stream, then re-scan on each extension
        for c in self._deferred:
            for env in self._positive_matches(c, state):
                for v, expr in c.solved:
                    env[v] = evaluate(expr, env, self._externals)
                if c.params and not c.verifier(*(env[p] for p in c.params)):
                    continue
                truth = state.truth
                neg_keys = []
                for p in c.negatives:
                    args = tuple(env[a.name] if type(a) is PVar else a
                                 for a in p.args)
                    neg_keys.append((p, (p.name, *args)))
                if any(truth.get(k) is True for _, k in neg_keys):
                    continue
                engine = self.engine
                for p, k in neg_keys:
                    if truth.get(k) is False:
                        continue  # assumed false: not provable here
                    for s2 in engine.call_stream(p.name, len(p.args), k[1:], state, None):
                        yield from self._drive(s2)
                return
        yield state

    def _positive_matches(self, c, state):
        """Enumerate positive-pattern matches by derivation, in order."""
        pats = c.positives
        if not pats:
            yield {}
            return
        base = state.next_var
        varmap: dict = {}
        calls = []
        for p in pats:
            args = []
            for a in p.args:
                if type(a) is PVar:
                    t = varmap.get(a.name)
                    if t is None:
                        t = Var(base + len(varmap))
                        varmap[a.name] = t
                    args.append(t)
                else:
                    args.append(a)
            calls.append((p.name, len(args), tuple(args)))
        engine = self.engine
        stream = (state.with_next_var(base + len(varmap)),)
        for name, arity, args in calls:
            stream = _chain_call(engine, stream, name, arity, args)
        seen = []
        for s in stream:
            env = {vn: walk_star(t, s.subst) for vn, t in varmap.items()}
            for t in env.values():
                if not is_ground(t):
                    raise DeferredGroundingError(
                        f"positive patterns of a deferred constraint left a "
                        f"variable unbound: {sorted(env)}")
            if env not in seen:
                seen.append(env)
                yield env
