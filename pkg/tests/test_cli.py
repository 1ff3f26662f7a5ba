"""Command-line surface: subcommands, exit codes, report determinism."""

from __future__ import annotations

import json

import pytest

from covercount import BoundReport
from covercount.cli import (
    EXIT_BOUND_FAILED,
    EXIT_BUDGET,
    EXIT_INVALID_INPUT,
    EXIT_OK,
    main,
)

FIXTURE_CNF = "p cnf 3 2\n1 2 0\n1 3 0\n"  # Z = 5
FIXTURE_HG = "3 2\n1 2\n2 3\n"  # path, 3 matchings


@pytest.fixture
def cnf_file(tmp_path):
    path = tmp_path / "fixture.cnf"
    path.write_text(FIXTURE_CNF)
    return str(path)


@pytest.fixture
def hg_file(tmp_path):
    path = tmp_path / "fixture.hg"
    path.write_text(FIXTURE_HG)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestCounting:
    def test_count_cnf_adaptive(self, capsys, cnf_file):
        code, out = run(capsys, "count-cnf", cnf_file, "--mode", "adaptive",
                        "--epsilon", "0.01", "--json")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["count"] == "5"
        assert report["mode"] == "adaptive"

    def test_exact_same_fixture(self, capsys, cnf_file):
        code, out = run(capsys, "exact", cnf_file, "--json")
        assert code == EXIT_OK
        assert json.loads(out)["count"] == "5"

    def test_count_matching(self, capsys, hg_file):
        code, out = run(capsys, "count-matching", hg_file, "--json")
        assert code == EXIT_OK
        assert json.loads(out)["count"] == "3"

    def test_count_3dm_rejects_non_uniform(self, capsys, hg_file):
        code, _ = run(capsys, "count-3dm", hg_file)
        assert code == EXIT_INVALID_INPUT

    def test_count_3dm(self, capsys, tmp_path):
        path = tmp_path / "tri.hg"
        path.write_text("6 2\n1 2 3\n4 5 6\n")
        code, out = run(capsys, "count-3dm", str(path), "--json")
        assert code == EXIT_OK
        assert json.loads(out)["count"] == "4"

    def test_unsatisfiable_reports_zero(self, capsys, tmp_path):
        path = tmp_path / "unsat.cnf"
        path.write_text("p cnf 2 2\n0\n1 2 0\n")
        code, out = run(capsys, "count-cnf", str(path), "--json")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["count"] == "0"
        assert report["ln_z"] is None

    def test_heuristic_requires_depth(self, capsys, cnf_file):
        code, _ = run(capsys, "count-cnf", cnf_file, "--mode", "heuristic")
        assert code == EXIT_INVALID_INPUT


class TestExitCodes:
    def test_invalid_input(self, capsys, tmp_path):
        path = tmp_path / "bad.cnf"
        path.write_text("p cnf 2 1\n-1 2 0\n")
        code, _ = run(capsys, "count-cnf", str(path))
        assert code == EXIT_INVALID_INPUT

    def test_missing_file(self, capsys):
        code, _ = run(capsys, "count-cnf", "/nonexistent/path.cnf")
        assert code == EXIT_INVALID_INPUT

    def test_budget_exceeded(self, capsys, tmp_path):
        # 20 variables: the untruncated tree dwarfs the budget, so the
        # certified depth (hundreds of levels) cannot complete
        from covercount import gen_random_read5_cnf
        from covercount.formats import to_dimacs

        path = tmp_path / "dense.cnf"
        path.write_text(to_dimacs(gen_random_read5_cnf(123, 20, 30, (2, 4))))
        code, _ = run(capsys, "count-cnf", str(path), "--mode", "certified",
                      "--epsilon", "0.1", "--node-budget", "20000")
        assert code == EXIT_BUDGET

    def test_bound_failure_maps_to_exit_4(self, capsys, monkeypatch):
        import covercount.cli as cli_mod

        fake = BoundReport(
            name="forced-failure", kind="grid-max", family="cnf_single", w=(1,),
            value=1.0, bound=0.5, argmax=(0.5,), resolution=2, refine_passes=0,
        )
        monkeypatch.setattr(cli_mod, "verify_all_bounds", lambda: [fake])
        code, _ = run(capsys, "verify-decay")
        assert code == EXIT_BOUND_FAILED


class TestDeterminism:
    def test_byte_identical_reports(self, capsys, cnf_file):
        _, first = run(capsys, "count-cnf", cnf_file, "--json", "--seed", "3")
        _, second = run(capsys, "count-cnf", cnf_file, "--json", "--seed", "3")
        assert first.encode() == second.encode()

    def test_matching_reports_deterministic(self, capsys, hg_file):
        _, first = run(capsys, "count-matching", hg_file, "--json")
        _, second = run(capsys, "count-matching", hg_file, "--json")
        assert first == second

    def test_report_is_key_sorted(self, capsys, cnf_file):
        _, out = run(capsys, "count-cnf", cnf_file, "--json")
        keys = list(json.loads(out).keys())
        assert keys == sorted(keys)

    def test_threads_env_does_not_change_report(self, capsys, cnf_file, monkeypatch):
        _, base = run(capsys, "count-cnf", cnf_file, "--json")
        monkeypatch.setenv("COVERCOUNT_THREADS", "4")
        _, threaded = run(capsys, "count-cnf", cnf_file, "--json")
        assert base == threaded


class TestGen:
    def test_gen_cnf_deterministic_and_parsable(self, capsys):
        code, out1 = run(capsys, "gen", "cnf", "--seed", "11", "--vars", "10", "--clauses", "12")
        assert code == EXIT_OK
        _, out2 = run(capsys, "gen", "cnf", "--seed", "11", "--vars", "10", "--clauses", "12")
        assert out1 == out2
        from covercount.formats import parse_dimacs

        inst = parse_dimacs(out1)
        assert inst.n_vars == 10

    def test_gen_hypergraph(self, capsys):
        code, out = run(capsys, "gen", "hypergraph", "--seed", "2",
                        "--vertices", "8", "--edges", "9")
        assert code == EXIT_OK
        from covercount.formats import parse_hypergraph

        assert parse_hypergraph(out).n_vertices == 8


class TestBench:
    def test_bench_runs(self, capsys, cnf_file):
        code, out = run(capsys, "bench", cnf_file, "--depths", "1,2")
        assert code == EXIT_OK
        rows = json.loads(out)
        assert [r["depth"] for r in rows] == [1, 2]
