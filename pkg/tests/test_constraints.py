"""Tests for integrity constraints: eager emission checks and deferral."""

import pytest

from stablog.constraints import EmitterPattern, PVar
from stablog.engine import Engine, conj
from stablog.errors import (
    DuplicateExternalError,
    UnboundVerifierVariableError,
)
from stablog.parser import load_source
from stablog.verifier import Arith, Bool, Cmp, Const, VarRef


def _row_engine():
    """Engine with 'two picks in one row must share a column' installed."""
    eng = Engine()
    c = eng.constraints.register(
        (EmitterPattern("pick", (PVar("x"), PVar("y"))),
         EmitterPattern("pick", (PVar("u"), PVar("v")))),
        (Cmp("=", VarRef("x"), VarRef("u")),
         Bool("not", (Cmp("=", VarRef("y"), VarRef("v")),))),
    )
    return eng, c


class TestEagerEmission:
    """Tests for the per-emission violation check."""

    def test_clashing_second_pick_kills_the_branch(self):
        eng, _ = _row_engine()
        store = eng.constraints
        s0 = eng.initial_state()
        s1 = store.on_emit(s0, ("pick", 1, 1))
        assert s1 is not None
        assert store.on_emit(s1, ("pick", 1, 2)) is None
        s2 = store.on_emit(s1, ("pick", 2, 1))
        assert s2 is not None

    def test_emission_order_does_not_matter(self):
        eng, _ = _row_engine()
        store = eng.constraints
        s0 = eng.initial_state()
        forward = store.on_emit(store.on_emit(s0, ("pick", 1, 1)), ("pick", 1, 2))
        s1 = store.on_emit(s0, ("pick", 1, 2))
        backward = store.on_emit(s1, ("pick", 1, 1))
        assert forward is None and backward is None

    def test_reemitting_a_logged_atom_is_free(self):
        eng, _ = _row_engine()
        store = eng.constraints
        s1 = store.on_emit(eng.initial_state(), ("pick", 1, 1))
        assert store.on_emit(s1, ("pick", 1, 1)) is s1

    def test_unwatched_predicates_pass_through(self):
        eng, _ = _row_engine()
        store = eng.constraints
        s0 = eng.initial_state()
        assert store.on_emit(s0, ("num", 3)) is s0

    def test_single_pattern_constraint_fires_at_emission(self):
        eng = Engine()
        eng.constraints.register(
            (EmitterPattern("val", (PVar("x"),)),),
            (Cmp(">=", VarRef("x"), Const(3)),),
        )
        s0 = eng.initial_state()
        assert eng.constraints.on_emit(s0, ("val", 2)) is not None
        assert eng.constraints.on_emit(s0, ("val", 4)) is None

    def test_pending_instances_list_proper_prefixes(self):
        eng, c = _row_engine()
        store = eng.constraints
        s1 = store.on_emit(eng.initial_state(), ("pick", 1, 1))
        pending = store.pending_instances(s1)
        assert pending == [(c.index, 1, {"x": 1, "y": 1})]
        s2 = store.on_emit(s1, ("pick", 2, 1))
        pending = sorted(p[2]["x"] for p in store.pending_instances(s2))
        assert pending == [1, 2]


class TestRegistration:
    """Tests for constraint and external registration."""

    def test_verifier_variables_must_come_from_patterns(self):
        eng = Engine()
        with pytest.raises(UnboundVerifierVariableError):
            eng.constraints.register(
                (EmitterPattern("val", (PVar("x"),)),),
                (Cmp("<", VarRef("x"), VarRef("ghost")),),
            )

    def test_equality_chains_solve_helper_variables(self):
        eng = Engine()
        c = eng.constraints.register(
            (EmitterPattern("val", (PVar("x"),)),),
            (Cmp("=", VarRef("s"), Arith("+", (VarRef("x"), VarRef("x")))),
             Cmp("<", VarRef("s"), VarRef("x"))),
        )
        assert [v for v, _ in c.solved] == ["s"]
        assert eng.constraints.on_emit(
            eng.initial_state(), ("val", 2)) is not None

    def test_duplicate_external_is_rejected(self):
        eng = Engine()
        eng.external("square", 1, lambda x: x * x)
        with pytest.raises(DuplicateExternalError):
            eng.external("square", 1, lambda x: x)

    def test_negated_pattern_routes_to_deferred(self):
        eng = Engine()
        eng.constraints.register(
            (EmitterPattern("num", (PVar("x"),)),
             EmitterPattern("hit", (PVar("x"),), negated=True)),
            (),
        )
        assert eng.constraints.has_deferred()
        s0 = eng.initial_state()
        assert eng.constraints.on_emit(s0, ("num", 1)) is s0


class TestDeferredDischarge:
    """Tests for settling negated-pattern constraints at answer time."""

    SOURCE = """
    (defineo (num x) (conde [(== 1 x)] [(== 2 x)]))
    (defineo (pick x) (num x) (noto (free x)))
    (defineo (free x) (num x) (noto (pick x)))
    (constrainto [(num x) (noto (pick x))] [])
    """

    def test_totality_style_constraint_forces_proofs(self):
        eng = Engine()
        load_source(eng, self.SOURCE)
        states = list(eng.run_states(None, eng.call("pick", 1)))
        for s in states:
            assert s.truth.get(("pick", 1)) is True
            assert s.truth.get(("pick", 2)) is True
        assert len(states) == 1

    def test_discharge_resolves_helper_variables(self):
        source = """
        (defineo (num x) (conde [(== 1 x)] [(== 2 x)]))
        (defineo (tag x y) (num x) (num y))
        (constrainto [(num x) (noto (tag x y))] [(= y x)])
        """
        eng = Engine()
        load_source(eng, source)
        states = list(eng.run_states(None, eng.call("num", 1)))
        assert len(states) == 1
        truth = states[0].truth
        assert truth.get(("tag", 1, 1)) is True
        assert truth.get(("tag", 2, 2)) is True

    def test_undischargeable_constraint_drops_the_answer(self):
        source = """
        (defineo (num x) (conde [(== 1 x)] [(== 2 x)]))
        (defineo (even x) (== 2 x))
        (constrainto [(num x) (noto (even x))] [])
        """
        eng = Engine()
        load_source(eng, source)
        assert eng.run(None, ("q",), lambda q: eng.call("num", q)) == []

    def test_constraints_never_enlarge_an_answer_set(self):
        base = """
        (defineo (num x) (conde [(== 1 x)] [(== 2 x)] [(== 3 x)]))
        (defineo (pick x y) (num x) (num y) (noto (free x y)))
        (defineo (free x y) (num x) (num y) (noto (pick x y)))
        """
        extra = "(constrainto [(pick x y) (pick u v)] [(= x u) (not (= y v))])\n"

        def answers(source):
            eng = Engine()
            load_source(eng, source)
            names = ("a", "b", "c", "d")
            out = eng.run(None, names, lambda a, b, c, d: conj(
                eng.call("pick", a, b), eng.call("pick", c, d)))
            return set(map(tuple, out))

        plain = answers(base)
        constrained = answers(base + extra)
        assert len(plain) == 81
        assert constrained < plain
        assert all((a, b) == (c, d) or a != c for a, b, c, d in constrained)
