"""Search engine: states, goal combinators, predicate resolution.

A ``State`` is an immutable snapshot of one search branch: the
substitution, the atom truth store, the emitted-atom log, the fresh
variable counter, the call stack (for loop classification) and the
current negation depth. Goals map a state to a stream of states; a
stream is either a materialized tuple or a lazy generator.

Search order is deliberate and load-bearing: conjunction explores
left-to-right depth-first (a goal's stream is exhausted before its
right neighbour sees the next state), while ``conde`` interleaves its
clause streams round-robin so a diverging clause cannot starve a
finite sibling. Everything is deterministic: identical programs and
queries produce identical answer sequences and step counts.

The engine counts one step per goal invocation on a per-run counter;
``run(1, ...)`` therefore never performs more steps than ``run(2, ...)``
for the same goal, because answers are pulled lazily.
"""

from __future__ import annotations

import sys
from collections import deque
from typing import Any, Callable, Iterable, Optional

from .constraints import ConstraintStore
from .errors import DuplicateDefinitionError, StepLimitExceeded, UnknownPredicateError
from .negation import Noto, stability_sweep
from .terms import Term, Var, is_ground, reify_all, unify, walk_star

Stream = Iterable  # tuple of States, or a generator of States
Goal = Callable[["State"], Stream]


class State:
    """One immutable branch of the search."""

    __slots__ = ("engine", "subst", "truth", "emitted", "next_var", "stack", "depth")

    def __init__(self, engine, subst, truth, emitted, next_var, stack, depth):
        self.engine = engine
        self.subst = subst      # {var id: term}
        self.truth = truth      # {atom key: True (proven) | False (assumed false)}
        self.emitted = emitted  # {pred name: cons chain of emitted arg tuples}
        self.next_var = next_var
        self.stack = stack      # cons chain ((atom key, entry depth), parent)
        self.depth = depth      # negation depth at the current evaluation point

    def with_subst(self, subst) -> "State":
        return State(self.engine, subst, self.truth, self.emitted,
                     self.next_var, self.stack, self.depth)

    def with_truth(self, truth) -> "State":
        return State(self.engine, self.subst, truth, self.emitted,
                     self.next_var, self.stack, self.depth)

    def with_emitted(self, emitted) -> "State":
        return State(self.engine, self.subst, self.truth, emitted,
                     self.next_var, self.stack, self.depth)

    def with_next_var(self, next_var) -> "State":
        return State(self.engine, self.subst, self.truth, self.emitted,
                     next_var, self.stack, self.depth)

    def with_depth(self, depth) -> "State":
        return State(self.engine, self.subst, self.truth, self.emitted,
                     self.next_var, self.stack, depth)

    def with_stack(self, stack) -> "State":
        return State(self.engine, self.subst, self.truth, self.emitted,
                     self.next_var, stack, self.depth)

    def push_frame(self, key) -> "State":
        return State(self.engine, self.subst, self.truth, self.emitted,
                     self.next_var, ((key, self.depth), self.stack), self.depth)

    def replace_truth_stack(self, truth, stack) -> "State":
        return State(self.engine, self.subst, truth, self.emitted,
                     self.next_var, stack, self.depth)

    def fresh_probe(self) -> "State":
        """A copy with a fresh call stack, one negation level down."""
        return State(self.engine, self.subst, self.truth, self.emitted,
                     self.next_var, None, self.depth + 1)

    # introspection helpers (used by tests and model enumeration)

    def proven_atoms(self) -> frozenset:
        return frozenset(k for k, v in self.truth.items() if v is True)

    def assumed_false_atoms(self) -> frozenset:
        return frozenset(k for k, v in self.truth.items() if v is False)

    def emitted_atoms(self, name: str) -> list:
        """Atoms emitted for one predicate, oldest first."""
        out = []
        node = self.emitted.get(name)
        while node is not None:
            out.append((name, *node[0]))
            node = node[1]
        out.reverse()
        return out


def _bind(stream: Stream, goal: Goal):
    for s in stream:
        yield from goal(s)


class Eq:
    """Unification goal."""

    __slots__ = ("u", "v")

    def __init__(self, u: Term, v: Term):
        self.u = u
        self.v = v

    def __call__(self, state: State) -> Stream:
        eng = state.engine
        eng.steps += 1
        if eng.steps > eng.steps_limit:
            raise StepLimitExceeded(eng.steps_limit)
        s2 = unify(self.u, self.v, state.subst)
        if s2 is None:
            return ()
        if s2 is state.subst:
            return (state,)
        return (state.with_subst(s2),)

    def __repr__(self) -> str:
        return f"(== {self.u!r} {self.v!r})"


class Conj:
    """Left-to-right depth-first conjunction."""

    __slots__ = ("goals",)

    def __init__(self, goals: Iterable[Goal]):
        self.goals = tuple(goals)

    def __call__(self, state: State) -> Stream:
        eng = state.engine
        eng.steps += 1
        if eng.steps > eng.steps_limit:
            raise StepLimitExceeded(eng.steps_limit)
        goals = self.goals
        if not goals:
            return (state,)
        stream = goals[0](state)
        for g in goals[1:]:
            stream = _bind(stream, g)
        return stream

    def __repr__(self) -> str:
        return "(and " + " ".join(repr(g) for g in self.goals) + ")"


class Conde:
    """Disjunction with round-robin interleaving of clause streams."""

    __slots__ = ("clauses",)

    def __init__(self, clauses: Iterable[Goal]):
        self.clauses = tuple(clauses)

    def __call__(self, state: State) -> Stream:
        eng = state.engine
        eng.steps += 1
        if eng.steps > eng.steps_limit:
            raise StepLimitExceeded(eng.steps_limit)
        streams = [g(state) for g in self.clauses]
        for s in streams:
            if type(s) is not tuple:
                return self._interleave(deque(iter(t) for t in streams))
        # all clause streams are materialized: merge row by row
        out = []
        i = 0
        live = True
        while live:
            live = False
            for s in streams:
                if i < len(s):
                    out.append(s[i])
                    live = True
            i += 1
        return tuple(out)

    @staticmethod
    def _interleave(streams: deque):
        while streams:
            s = streams.popleft()
            try:
                x = next(s)
            except StopIteration:
                continue
            yield x
            streams.append(s)

    def __repr__(self) -> str:
        return "(conde ...)"


class Fresh:
    """Scoped fresh variables: builder(*vars) produces the body goal."""

    __slots__ = ("n", "builder")

    def __init__(self, n: int, builder: Callable[..., Goal]):
        self.n = n
        self.builder = builder

    def __call__(self, state: State) -> Stream:
        eng = state.engine
        eng.steps += 1
        if eng.steps > eng.steps_limit:
            raise StepLimitExceeded(eng.steps_limit)
        base = state.next_var
        terms = tuple(Var(base + i) for i in range(self.n))
        goal = self.builder(*terms)
        return goal(state.with_next_var(base + self.n))


class Call:
    """Invocation of a registered predicate."""

    __slots__ = ("engine", "name", "arity", "args")

    def __init__(self, engine, name: str, args: tuple):
        self.engine = engine
        self.name = name
        self.arity = len(args)
        self.args = tuple(args)

    def __call__(self, state: State) -> Stream:
        return self.engine.call_stream(self.name, self.arity, self.args, state, None)

    def __repr__(self) -> str:
        return f"({self.name} ...)" if self.args else f"({self.name})"


class PredicateDef:
    __slots__ = ("name", "arity", "body")

    def __init__(self, name: str, arity: int, body: Callable[..., Goal]):
        self.name = name
        self.arity = arity
        self.body = body


# module-level combinator API

def eq(u: Term, v: Term) -> Goal:
    return Eq(u, v)


def conj(*goals: Goal) -> Goal:
    return Conj(goals)


def conde(*clauses) -> Goal:
    """Each clause is a goal or a sequence of goals (an implicit conj)."""
    return Conde(tuple(
        c if callable(c) else Conj(tuple(c)) for c in clauses
    ))


def fresh(builder: Callable[..., Goal]) -> Goal:
    """fresh(lambda x, y: goal) introduces len(signature) variables."""
    return Fresh(builder.__code__.co_argcount, builder)


succeed: Goal = Conj(())
fail: Goal = Conde(())


class Engine:
    """A predicate registry plus the search driver.

    Engines are independent: registrations and step counters never
    leak between instances, and one engine must not run two queries
    concurrently (states are immutable, the step counter is not).
    """

    def __init__(self) -> None:
        self._registry: dict = {}
        self.constraints = ConstraintStore(self)
        self.steps = 0
        self.steps_limit = sys.maxsize
        self.sweep_enabled = True

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.steps_limit:
            raise StepLimitExceeded(self.steps_limit)

    # registration

    def defineo(self, name: str, arity: int, body: Callable[..., Goal]) -> None:
        """Define a predicate; ``body(*args)`` builds the body goal."""
        key = (name, arity)
        if key in self._registry:
            raise DuplicateDefinitionError(f"{name}/{arity} defined twice")
        self._registry[key] = PredicateDef(name, arity, body)

    def predicate_names(self) -> list:
        return sorted(self._registry)

    def constrainto(self, emitters, verifier_exprs) -> None:
        self.constraints.register(emitters, verifier_exprs)

    def external(self, name: str, arity: int, fn: Callable) -> None:
        self.constraints.register_external(name, arity, fn)

    # goal constructors bound to this engine

    def call(self, name: str, *args: Term) -> Call:
        return Call(self, name, args)

    def noto(self, target, *args) -> Noto:
        if isinstance(target, (Call, Noto)):
            return Noto(self, target)
        return Noto(self, Call(self, target, args))

    # resolution

    def call_stream(self, name, arity, args, state, root_bypass) -> Stream:
        self.steps += 1
        if self.steps > self.steps_limit:
            raise StepLimitExceeded(self.steps_limit)
        pred = self._registry.get((name, arity))
        if pred is None:
            raise UnknownPredicateError(f"unknown predicate {name}/{arity}")
        subst = state.subst
        wargs = tuple(walk_star(a, subst) for a in args)
        for w in wargs:
            if not is_ground(w):
                return self._prove_nonground(pred, name, wargs, state)
        key = (name, *wargs)
        if key != root_bypass:
            status = state.truth.get(key)
            if status is not None:
                return (state,) if status else ()
        stack = state.stack
        depth = state.depth
        while stack is not None:
            frame, stack = stack
            if frame[0] == key:
                diff = depth - frame[1]
                if diff != 0 and not (diff & 1):
                    return (state,)  # even-parity loop: coinductive success
                return ()            # positive or odd-parity loop
        return self._prove_ground(pred, key, wargs, state, key == root_bypass)

    def _prove_ground(self, pred, key, wargs, state, witness=False):
        caller_stack = state.stack
        constraints = self.constraints
        goal = pred.body(*wargs)
        for s in goal(state.push_frame(key)):
            if witness:
                # refutation probe target: a body success is a derivation
                # witness; do not record or emit the hypothetical atom
                yield s.with_stack(caller_stack)
                continue
            truth = s.truth
            status = truth.get(key)
            if status is False:
                continue  # proven while assumed false: inconsistent branch
            if status is True:
                yield s.with_stack(caller_stack)
                continue
            t2 = truth.copy()
            t2[key] = True
            s2 = constraints.on_emit(s.replace_truth_stack(t2, caller_stack), key)
            if s2 is not None:
                yield s2

    def _prove_nonground(self, pred, name, wargs, state):
        constraints = self.constraints
        goal = pred.body(*wargs)
        for s in goal(state):
            subst = s.subst
            ws = tuple(walk_star(a, subst) for a in wargs)
            ground = True
            for w in ws:
                if not is_ground(w):
                    ground = False
                    break
            if not ground:
                yield s
                continue
            key = (name, *ws)
            truth = s.truth
            status = truth.get(key)
            if status is False:
                continue
            if status is True:
                yield s
                continue
            t2 = truth.copy()
            t2[key] = True
            s2 = constraints.on_emit(s.with_truth(t2), key)
            if s2 is not None:
                yield s2

    # answers

    def initial_state(self, next_var: int = 0) -> State:
        return State(self, {}, {}, {}, next_var, None, 0)

    def run_states(self, n: Optional[int], goal: Goal, next_var: int = 0):
        """Drive a goal; yield states that survive the answer checks.

        Deferred constraint obligations are discharged first (they may
        extend the state), then the stability sweep validates every
        assumption in the final truth store.
        """
        self.steps = 0
        count = 0
        for s in goal(self.initial_state(next_var)):
            for s2 in self.constraints.deferred_stream(s):
                if self.sweep_enabled and not stability_sweep(self, s2):
                    continue
                yield s2
                count += 1
                if n is not None and count >= n:
                    return

    def run(self, n: Optional[int], qnames, builder: Callable[..., Goal]) -> list:
        """Run a query; answers are tuples of reified query-variable values.

        ``n`` is the maximum number of answers, None for all. The
        builder receives one fresh term per query variable.
        """
        qvars = tuple(Var(i) for i in range(len(qnames)))
        goal = builder(*qvars)
        return [
            reify_all(qvars, s.subst)
            for s in self.run_states(n, goal, next_var=len(qvars))
        ]
