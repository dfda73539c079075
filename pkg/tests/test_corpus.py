"""Tests for the built-in program corpus against brute-force oracles."""

import pathlib

import pytest

from stablog import bench, corpus
from stablog.engine import Engine
from stablog.parser import load_source
from stablog.terms import iter_list

import oracles

PROGRAMS_DIR = pathlib.Path(corpus.__file__).parent / "programs"


def _run_query(source, externals=None, count=-1):
    eng = Engine()
    loaded = load_source(eng, source, externals)
    (query,) = loaded.queries
    return query.run(count)


def _values(answer):
    return tuple(iter_list(answer[0]))


class TestShippedPrograms:
    """Tests keeping programs/ in sync with the corpus builders."""

    CASES = (
        ("pick_free3.sbl", lambda: corpus.pick_free_program(3)),
        ("pick_free3_row.sbl",
         lambda: corpus.pick_free_program(3, row_constraint=True)),
        ("send_big.sbl", lambda: corpus.send_more_money("big")),
        ("send_small.sbl", lambda: corpus.send_more_money("small")),
        ("send_oracle.sbl", lambda: corpus.send_more_money("small+oracle")),
        ("queens4.sbl", lambda: corpus.queens_program(4)),
        ("arith5.sbl", lambda: corpus.arithmetic_relations(0, 5)),
    )

    def test_every_shipped_file_matches_its_builder(self):
        for fname, builder in self.CASES:
            shipped = (PROGRAMS_DIR / fname).read_text(encoding="utf-8")
            assert shipped == builder(), fname

    def test_no_stray_programs_are_shipped(self):
        shipped = {p.name for p in PROGRAMS_DIR.glob("*.sbl")}
        assert shipped == {fname for fname, _ in self.CASES}


class TestArithmetic:
    """Tests for the generate-and-test arithmetic relations."""

    def _engine(self, lo, hi):
        eng = Engine()
        load_source(eng, corpus.arithmetic_relations(lo, hi))
        return eng

    def test_pluso_fills_any_position(self):
        eng = self._engine(0, 5)
        out = eng.run(None, ("z",), lambda z: eng.call("pluso", 2, 3, z))
        assert out == [(5,)]
        out = eng.run(None, ("y",), lambda y: eng.call("pluso", 2, y, 4))
        assert out == [(2,)]

    def test_pluso_enumeration_matches_brute_force(self):
        eng = self._engine(0, 3)
        got = set(eng.run(None, ("x", "y", "z"),
                          lambda x, y, z: eng.call("pluso", x, y, z)))
        assert got == oracles.plus_triples(0, 3)
        assert len(got) == 10

    def test_minuso_is_subtraction(self):
        eng = self._engine(0, 5)
        out = eng.run(None, ("y",), lambda y: eng.call("minuso", 5, 2, y))
        assert out == [(3,)]
        got = set(eng.run(None, ("z", "x", "y"),
                          lambda z, x, y: eng.call("minuso", z, x, y)))
        assert got == oracles.minus_triples(0, 5)

    def test_multipo_enumeration_matches_brute_force(self):
        eng = self._engine(0, 3)
        got = set(eng.run(None, ("x", "y", "z"),
                          lambda x, y, z: eng.call("multipo", x, y, z)))
        assert got == oracles.times_triples(0, 3)

    def test_divido_produces_quotient_and_remainder(self):
        eng = self._engine(0, 7)
        out = eng.run(None, ("q", "r"),
                      lambda q, r: eng.call("divido", 7, 2, q, r))
        assert out == [(3, 1)]

    def test_divido_rejects_zero_divisors(self):
        eng = self._engine(0, 3)
        out = eng.run(None, ("q", "r"),
                      lambda q, r: eng.call("divido", 2, 0, q, r))
        assert out == []

    def test_divido_enumeration_matches_brute_force(self):
        eng = self._engine(0, 3)
        got = set(eng.run(None, ("x", "y", "q", "r"),
                          lambda x, y, q, r: eng.call("divido", x, y, q, r)))
        assert got == oracles.div_quads(0, 3)


class TestPickFree:
    """Tests for the choice-board programs."""

    def test_two_variable_board_answers(self):
        answers = _run_query(corpus.pick_free_program(2))
        cells = {_values(a) for a in answers}
        assert cells == {(x, y) for x in (1, 2) for y in (1, 2)}

    def test_row_constraint_is_accepted(self):
        answers = _run_query(corpus.pick_free_program(2, row_constraint=True))
        assert {_values(a) for a in answers} == {
            (x, y) for x in (1, 2) for y in (1, 2)}

    def test_one_variable_board(self):
        eng = Engine()
        loaded = load_source(eng, corpus.pick_free_program(3, variables=1))
        (query,) = loaded.queries
        assert {a[0] for a in query.run()} == {1, 2, 3}

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            corpus.pick_free_program(3, variables=3)
        with pytest.raises(ValueError):
            corpus.pick_free_program(3, variables=1, row_constraint=True)


class TestQueens:
    """Tests for the n-queens programs."""

    @pytest.mark.parametrize("n,count", [(1, 1), (2, 0), (4, 2)])
    def test_solution_counts(self, n, count):
        answers = _run_query(corpus.queens_program(n))
        assert len(answers) == count

    def test_solutions_match_brute_force(self):
        answers = _run_query(corpus.queens_program(4))
        got = {_values(a) for a in answers}
        assert got == set(oracles.queens_solutions(4))


class TestSendMoreMoney:
    """Tests for the cryptarithm programs."""

    def test_unknown_variant_is_rejected(self):
        with pytest.raises(ValueError):
            corpus.send_more_money("medium")

    def test_oracle_pins_the_known_letters(self):
        assert corpus.oracle("s", 9) and not corpus.oracle("s", 8)
        assert corpus.oracle("m", 1) and not corpus.oracle("m", 0)
        assert corpus.oracle("o", 0) and not corpus.oracle("o", 5)
        assert corpus.oracle("e", 5) and corpus.oracle("y", 2)

    def test_small_variant_finds_the_unique_solution(self):
        eng = Engine()
        loaded = load_source(eng, corpus.send_more_money("small"))
        answers, _ = bench.run_query(loaded, 0, ordering="ydenrosm")
        assert [_values(a) for a in answers] == [(9, 5, 6, 7, 1, 0, 8, 2)]

    def test_oracle_variant_finds_the_same_solution(self):
        answers = _run_query(corpus.send_more_money("small+oracle"),
                             externals=corpus.EXTERNALS)
        assert [_values(a) for a in answers] == [(9, 5, 6, 7, 1, 0, 8, 2)]

    def test_brute_force_agrees_the_solution_is_unique(self):
        assert oracles.send_solutions() == [(9, 5, 6, 7, 1, 0, 8, 2)]
