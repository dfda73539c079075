"""Stable-model negation.

Ground atoms carry one of two statuses in a branch's truth store:
``True`` (proven) or ``False`` (assumed false by ``noto``). A branch
dies the moment an atom would need both statuses.

``noto`` on an undetermined ground atom records the assumption and then
tries to refute it: the atom is re-proven from scratch under the new
assumption (bypassing the atom's own shortcut at the root call). If any
proof survives, noto fails; otherwise the assumption persists.

Recursion through the call stack is classified by the number of
negations crossed between two occurrences of the same ground atom:
zero means an unfounded positive loop (fail), odd means a contradictory
loop (fail), and a positive even count succeeds coinductively.
"""

from __future__ import annotations

from .errors import NonGroundNegationError
from .terms import is_ground, walk_star

# Loop classes returned by classify_loop.
NO_LOOP = "no-loop"
POSITIVE_LOOP = "positive-loop"
ODD_LOOP = "odd-neg-loop"
EVEN_LOOP = "even-neg-loop"


def classify_loop(stack, key, depth: int) -> str:
    """Classify a pending call against the topmost matching stack frame.

    ``stack`` is a cons chain ``((atom_key, entry_depth), parent)``;
    ``depth`` is the negation depth at the new call site.
    """
    while stack is not None:
        frame, stack = stack
        if frame[0] == key:
            diff = depth - frame[1]
            if diff == 0:
                return POSITIVE_LOOP
            if diff & 1:
                return ODD_LOOP
            return EVEN_LOOP
    return NO_LOOP


class Noto:
    """Negation-as-failure goal under stable-model semantics.

    The target is either a ``Call`` goal (the common case) or another
    ``Noto`` (double negation: succeeds iff the inner negation fails,
    leaving the state untouched).
    """

    __slots__ = ("engine", "target")

    def __init__(self, engine, target):
        self.engine = engine
        self.target = target

    def __call__(self, state):
        eng = self.engine
        eng.tick()
        target = self.target
        if type(target) is Noto:
            inner = target(state.with_depth(state.depth + 1))
            for _ in inner:
                return ()
            return (state,)
        wargs = tuple(walk_star(a, state.subst) for a in target.args)
        for w in wargs:
            if not is_ground(w):
                raise NonGroundNegationError(
                    f"noto({target.name}/{len(wargs)}) reached with unbound arguments"
                )
        key = (target.name, *wargs)
        status = state.truth.get(key)
        if status is True:
            return ()
        if status is False:
            return (state,)
        truth = state.truth.copy()
        truth[key] = False
        assumed = state.with_truth(truth)
        probe = assumed.with_depth(state.depth + 1)
        for _ in eng.call_stream(target.name, len(wargs), wargs, probe, root_bypass=key):
            return ()
        return (assumed,)

    def __repr__(self) -> str:
        return f"(noto {self.target!r})"


def refutable(engine, state, key) -> bool:
    """True when ``key``'s atom has no surviving proof in ``state``.

    Used by the stability sweep: the atom's own AssumedFalse entry is
    bypassed at the root, every other assumption stays in force, and
    the probe runs on a fresh call stack.
    """
    name = key[0]
    args = key[1:]
    probe = state.fresh_probe()
    for _ in engine.call_stream(name, len(args), args, probe, root_bypass=key):
        return False
    return True


def stability_sweep(engine, state) -> bool:
    """Re-derive every AssumedFalse atom; True when all stay refuted."""
    for key, status in state.truth.items():
        if status is False and not refutable(engine, state, key):
            return False
    return True
