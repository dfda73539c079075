"""Tests for the engine core: goals, streams, definitions, search."""

import pytest

from stablog.engine import Engine, conde, conj, eq, fail, fresh, succeed
from stablog.errors import (
    DuplicateDefinitionError,
    StepLimitExceeded,
    UnknownPredicateError,
)
from stablog.terms import Pair, make_list, nil, term_to_str


def _strs(answers):
    return [" ".join(term_to_str(t) for t in tup) for tup in answers]


class TestGoals:
    """Tests for the goal combinators on a bare engine."""

    def test_eq_binds_query_variable(self):
        eng = Engine()
        assert _strs(eng.run(None, ("q",), lambda q: eq(q, 42))) == ["42"]

    def test_failing_eq_gives_no_answers(self):
        eng = Engine()
        assert eng.run(None, ("q",), lambda q: conj(eq(q, 1), eq(q, 2))) == []

    def test_succeed_and_fail(self):
        eng = Engine()
        assert _strs(eng.run(None, ("q",), lambda q: succeed)) == ["_0"]
        assert eng.run(None, ("q",), lambda q: fail) == []

    def test_conde_enumerates_both_branches(self):
        eng = Engine()
        out = _strs(eng.run(None, ("q",), lambda q: conde(eq(q, 1), eq(q, 2))))
        assert sorted(out) == ["1", "2"]

    def test_conj_threads_bindings_left_to_right(self):
        eng = Engine()
        out = eng.run(None, ("q",), lambda q: fresh(
            lambda x: conj(eq(x, 3), eq(q, Pair(x, nil)))))
        assert _strs(out) == ["(3)"]

    def test_fresh_variables_are_distinct(self):
        eng = Engine()
        out = eng.run(None, ("q",), lambda q: fresh(
            lambda x, y: eq(q, make_list([x, y]))))
        assert _strs(out) == ["(_0 _1)"]

    def test_run_limits_answer_count(self):
        eng = Engine()
        goal = lambda q: conde(eq(q, 1), eq(q, 2), eq(q, 3))
        assert len(eng.run(2, ("q",), goal)) == 2
        assert len(eng.run(None, ("q",), goal)) == 3


class TestDefinitions:
    """Tests for defineo and call."""

    def _nat_engine(self):
        eng = Engine()
        eng.defineo("nat", 1, lambda x: conde(
            eq(x, 0),
            fresh(lambda y: conj(eq(x, Pair("s", y)), eng.call("nat", y))),
        ))
        return eng

    def test_recursive_definition_streams_lazily(self):
        eng = self._nat_engine()
        out = _strs(eng.run(4, ("q",), lambda q: eng.call("nat", q)))
        assert out == ["0", "(s . 0)", "(s s . 0)", "(s s s . 0)"]

    def test_duplicate_definition_rejected(self):
        eng = Engine()
        eng.defineo("p", 0, lambda: succeed)
        with pytest.raises(DuplicateDefinitionError):
            eng.defineo("p", 0, lambda: succeed)

    def test_same_name_different_arity_coexist(self):
        eng = Engine()
        eng.defineo("p", 0, lambda: succeed)
        eng.defineo("p", 1, lambda x: eq(x, 1))
        assert len(eng.run(None, ("q",), lambda q: eng.call("p", q))) == 1

    def test_unknown_predicate_raises_when_driven(self):
        eng = Engine()
        with pytest.raises(UnknownPredicateError):
            eng.run(None, ("q",), lambda q: eng.call("ghost", q))

    def test_predicate_names_lists_registry(self):
        eng = Engine()
        eng.defineo("a", 0, lambda: succeed)
        eng.defineo("b", 2, lambda x, y: eq(x, y))
        assert ("a", 0) in eng.predicate_names()
        assert ("b", 2) in eng.predicate_names()


class TestInterleaving:
    """Tests for fair disjunction between competing branches."""

    def test_conde_interleaves_two_infinite_streams(self):
        eng = Engine()
        eng.defineo("ones", 1, lambda x: conde(
            eq(x, 1),
            fresh(lambda y: conj(eng.call("ones", y), eq(x, Pair(1, y)))),
        ))
        eng.defineo("twos", 1, lambda x: conde(
            eq(x, 2),
            fresh(lambda y: conj(eng.call("twos", y), eq(x, Pair(2, y)))),
        ))
        out = _strs(eng.run(6, ("q",), lambda q: conde(
            eng.call("ones", q), eng.call("twos", q))))
        assert any(s.startswith("1") or s.startswith("(1") for s in out)
        assert any(s.startswith("2") or s.startswith("(2") for s in out)


class TestStepsAndLimits:
    """Tests for the step counter and the abort guard."""

    def test_steps_reset_and_deterministic(self):
        eng = Engine()
        eng.defineo("num", 1, lambda x: conde(*(eq(x, i) for i in range(5))))
        eng.run(None, ("q",), lambda q: eng.call("num", q))
        first = eng.steps
        eng.run(None, ("q",), lambda q: eng.call("num", q))
        assert eng.steps == first > 0

    def test_step_limit_aborts_runaway_search(self):
        eng = Engine()
        eng.defineo("spin", 1, lambda x: fresh(
            lambda y: conj(eng.call("spin", y), eq(x, y))))
        eng.steps_limit = 500
        with pytest.raises(StepLimitExceeded):
            eng.run(1, ("q",), lambda q: eng.call("spin", q))

    def test_run_states_exposes_raw_states(self):
        eng = Engine()
        states = list(eng.run_states(None, eq(0, 0)))
        assert len(states) == 1 and states[0].truth == {}
