"""Tests for the command-line front end, driven in process."""

import pytest

from stablog import cli

DUALS = """
(defineo (num x)
  (conde [(== 1 x)] [(== 2 x)] [(== 3 x)]))
(defineo (pick x) (num x) (noto (free x)))
(defineo (free x) (num x) (noto (pick x)))
(run* (q) (num q))
"""

LABELED = """
(defineo (tag l v) (conde [(== 1 v)] [(== 2 v)]))
(run* (q) (fresh (a b) (tag 'x a) (tag 'y b) (== q (list a b))))
"""


@pytest.fixture
def duals_file(tmp_path):
    path = tmp_path / "duals.sbl"
    path.write_text(DUALS, encoding="utf-8")
    return str(path)


class TestModelSpecs:
    """Tests for the --count-models spec grammar."""

    def test_single_pair_with_range(self):
        pairs, domain = cli.parse_model_spec("pick/free@1..3")
        assert pairs == [("pick", "free")]
        assert domain == [(1,), (2,), (3,)]

    def test_multiple_pairs_and_ranges(self):
        pairs, domain = cli.parse_model_spec("a/b+c@1..2,5..6")
        assert pairs == [("a", "b"), ("c", None)]
        assert domain == [(1, 5), (1, 6), (2, 5), (2, 6)]

    def test_nullary_domain(self):
        pairs, domain = cli.parse_model_spec("p@()")
        assert pairs == [("p", None)]
        assert domain == [()]

    def test_bad_specs_are_rejected(self):
        with pytest.raises(ValueError):
            cli.parse_model_spec("pick/free")
        with pytest.raises(ValueError):
            cli.parse_model_spec("@1..2")
        with pytest.raises(ValueError):
            cli.parse_model_spec("p@1-2")


class TestRunningPrograms:
    """Tests for loading files and printing answers."""

    def test_runs_every_query_and_exits_zero(self, duals_file, capsys):
        assert cli.main(["--load", duals_file]) == 0
        out = capsys.readouterr()
        assert out.out.splitlines() == ["1", "2", "3"]
        assert "query 0: 3 answer(s)" in out.err

    def test_positional_files_load_too(self, duals_file, capsys):
        assert cli.main([duals_file]) == 0
        assert capsys.readouterr().out.splitlines() == ["1", "2", "3"]

    def test_no_files_is_an_error(self, capsys):
        assert cli.main([]) == 2
        assert "no program files" in capsys.readouterr().err

    def test_missing_file_is_an_error(self, capsys):
        assert cli.main(["--load", "/nonexistent/prog.sbl"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_syntax_errors_exit_two(self, tmp_path, capsys):
        path = tmp_path / "broken.sbl"
        path.write_text("(defineo (p x)", encoding="utf-8")
        assert cli.main([str(path)]) == 2
        assert "unexpected end of input" in capsys.readouterr().err

    def test_counted_query_without_answers_exits_one(self, tmp_path, capsys):
        path = tmp_path / "empty.sbl"
        path.write_text(
            "(defineo (never x) (== 1 2))\n(run 1 (q) (never q))\n",
            encoding="utf-8",
        )
        assert cli.main([str(path)]) == 1

    def test_run_star_without_answers_exits_zero(self, tmp_path):
        path = tmp_path / "empty.sbl"
        path.write_text(
            "(defineo (never x) (== 1 2))\n(run* (q) (never q))\n",
            encoding="utf-8",
        )
        assert cli.main([str(path)]) == 0

    def test_query_flag_selects_one_query(self, tmp_path, capsys):
        path = tmp_path / "two.sbl"
        path.write_text(DUALS + "(run* (q) (pick q))\n", encoding="utf-8")
        assert cli.main([str(path), "--query", "1"]) == 0
        out = capsys.readouterr()
        assert "query 1:" in out.err
        assert "query 0:" not in out.err

    def test_query_index_out_of_range_exits_two(self, duals_file, capsys):
        assert cli.main([duals_file, "--query", "5"]) == 2

    def test_step_limit_exits_three(self, duals_file, capsys):
        assert cli.main([duals_file, "--steps-limit", "2"]) == 3
        assert "error:" in capsys.readouterr().err

    def test_dedup_drops_repeated_lines(self, tmp_path, capsys):
        path = tmp_path / "dup.sbl"
        path.write_text(
            DUALS.replace("(run* (q) (num q))",
                          "(run* (q) (fresh (x) (num x) (== q 0)))"),
            encoding="utf-8",
        )
        assert cli.main([str(path)]) == 0
        assert capsys.readouterr().out.splitlines() == ["0", "0", "0"]
        assert cli.main([str(path), "--dedup"]) == 0
        assert capsys.readouterr().out.splitlines() == ["0"]

    def test_no_sweep_flag_is_accepted(self, duals_file, capsys):
        assert cli.main([duals_file, "--no-sweep"]) == 0
        assert capsys.readouterr().out.splitlines() == ["1", "2", "3"]


class TestOrderingFlags:
    """Tests for --order and --suggest-order."""

    def test_order_letters_reorder_goals(self, tmp_path, capsys):
        path = tmp_path / "labeled.sbl"
        path.write_text(LABELED, encoding="utf-8")
        assert cli.main([str(path), "--order", "yx"]) == 0
        plain = capsys.readouterr().out
        assert cli.main([str(path)]) == 0
        identity = capsys.readouterr().out
        assert sorted(plain.splitlines()) == sorted(identity.splitlines())

    def test_bad_order_exits_two(self, tmp_path, capsys):
        path = tmp_path / "labeled.sbl"
        path.write_text(LABELED, encoding="utf-8")
        assert cli.main([str(path), "--order", "zz"]) == 2

    def test_suggest_order_prints_indices(self, tmp_path, capsys):
        path = tmp_path / "board.sbl"
        path.write_text(
            DUALS.replace("(run* (q) (num q))",
                          "(run* (q) (fresh (x) (pick x) (== q x)))"),
            encoding="utf-8",
        )
        assert cli.main([str(path), "--suggest-order"]) == 0
        assert capsys.readouterr().out.strip() == "0,1"

    def test_suggest_order_appends_labels_when_known(self, tmp_path, capsys):
        path = tmp_path / "labeled.sbl"
        path.write_text(LABELED, encoding="utf-8")
        assert cli.main([str(path), "--suggest-order"]) == 0
        assert capsys.readouterr().out.strip() == "0,1,2 (XY)"


class TestModelCounting:
    """Tests for --count-models end to end."""

    def test_counts_dual_models(self, duals_file, capsys):
        assert cli.main([duals_file, "--count-models", "pick/free@1..3"]) == 0
        assert capsys.readouterr().out.strip() == "8"

    def test_non_dual_spec_exits_two(self, duals_file, capsys):
        assert cli.main([duals_file, "--count-models", "num/pick@1..3"]) == 2
        assert "dual" in capsys.readouterr().err


class TestBenchFlag:
    """Tests for --bench CSV output."""

    def test_bench_prints_csv(self, tmp_path, capsys):
        cfg = tmp_path / "suite.cfg"
        cfg.write_text("programs = pick_free:2:one\ncount = all\n",
                       encoding="utf-8")
        assert cli.main(["--bench", str(cfg)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "program,query,ordering,answers,steps,millis"
        assert len(lines) == 2

    def test_bad_config_exits_two(self, tmp_path, capsys):
        cfg = tmp_path / "suite.cfg"
        cfg.write_text("no equals here\n", encoding="utf-8")
        assert cli.main(["--bench", str(cfg)]) == 2
