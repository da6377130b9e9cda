"""Tests for cogc.cli — subcommands, exit codes and diagnostics."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

import cogc.codegen.diff
from cogc.__main__ import main, parse_args
from cogc.cli import EXIT_FAILURE, EXIT_ORACLE, EXIT_SUCCESS, EXIT_USAGE

CORPUS = Path(__file__).parent / "corpus"


# --- Helpers ---


def _accept(name: str) -> str:
    return str(CORPUS / "accept" / f"{name}.cogc")


def _reject(name: str) -> str:
    return str(CORPUS / "reject" / f"{name}.cogc")


def _run(argv: list[str]) -> int:
    with pytest.raises(SystemExit) as exc_info:
        main(argv)
    return exc_info.value.code


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class TestParseArgs:
    def test_run_defaults(self):
        args = parse_args(["run", "prog.cogc", "--fn", "main"])
        assert args.command == "run"
        assert args.sem == "value"
        assert args.arg == "{}"
        assert args.config is None

    def test_repeated_entries(self):
        args = parse_args(["mono", "prog.cogc", "--entry", "f", "--entry", "g"])
        assert args.entry == ["f", "g"]

    def test_usage_errors_exit_with_usage_code(self, capsys):
        assert _run(["run", "prog.cogc"]) == EXIT_USAGE
        assert "--fn" in capsys.readouterr().err

    def test_unknown_command(self):
        assert _run(["frobnicate", "prog.cogc"]) == EXIT_USAGE

    def test_bad_semantics_choice(self):
        assert _run(["run", "prog.cogc", "--fn", "main", "--sem", "lazy"]) == EXIT_USAGE


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


class TestCheck:
    def test_ok(self, capsys):
        path = _accept("calls")
        assert _run(["check", path]) == EXIT_SUCCESS
        out = capsys.readouterr().out
        assert out.startswith(f"{path}: ok (")
        assert "function(s)" in out

    def test_typing_tree_is_written(self, tmp_path):
        out = tmp_path / "trees.json"
        assert _run(["check", _accept("arith"), "--typing-tree", str(out)]) == EXIT_SUCCESS
        assert "main" in json.loads(out.read_text())

    def test_type_error_diagnostic(self, capsys):
        path = _reject("unbound_var")
        assert _run(["check", path]) == EXIT_FAILURE
        err = capsys.readouterr().err
        assert err.startswith(f"{path}:")
        assert "error[UnboundVariable]" in err

    def test_parse_error_diagnostic(self, capsys):
        assert _run(["check", _reject("unbalanced")]) == EXIT_FAILURE
        assert "error[ParseError]" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert _run(["check", "nowhere.cogc"]) == EXIT_FAILURE
        assert capsys.readouterr().err.startswith("Error:")


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


class TestRun:
    @pytest.mark.parametrize("sem", ["value", "update"])
    def test_arith(self, capsys, sem):
        assert _run(["run", _accept("arith"), "--fn", "main", "--sem", sem, "--arg", "10"]) == 0
        assert json.loads(capsys.readouterr().out) == {"lit": 37, "ty": "u8"}

    def test_update_trace_dumps_stores(self, capsys):
        arg = json.dumps({"count": 1, "total": 2})
        argv = [
            "run",
            _accept("take_put_boxed"),
            "--fn",
            "main",
            "--sem",
            "update",
            "--arg",
            arg,
            "--trace",
        ]
        assert _run(argv) == EXIT_SUCCESS
        doc = json.loads(capsys.readouterr().out)
        assert set(doc) == {"result", "store_in", "store_out"}
        assert doc["result"]["ptr"] == 0

    def test_division_by_zero(self, capsys):
        arg = json.dumps({"p1": 7, "p2": 0})
        assert _run(["run", _accept("division"), "--fn", "main", "--arg", arg]) == EXIT_FAILURE
        assert "error[DivisionByZero]" in capsys.readouterr().err

    def test_fuel_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("COGC_FUEL", "3")
        assert _run(["run", _accept("calls"), "--fn", "main", "--arg", "3"]) == EXIT_FAILURE
        assert "error[FuelExhausted]" in capsys.readouterr().err

    def test_invalid_json_argument(self, capsys):
        assert _run(["run", _accept("arith"), "--fn", "main", "--arg", "{"]) == EXIT_USAGE
        assert "--arg is not valid JSON" in capsys.readouterr().err

    def test_unknown_function(self, capsys):
        assert _run(["run", _accept("arith"), "--fn", "nope"]) == EXIT_USAGE
        assert "'nope' is not a function" in capsys.readouterr().err

    def test_polymorphic_function(self, capsys):
        assert _run(["run", _accept("poly_pair"), "--fn", "dup", "--arg", "1"]) == EXIT_USAGE
        assert "polymorphic" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


class TestOracle:
    def test_single_input(self, capsys):
        arg = json.dumps({"count": 1, "total": 2})
        assert _run(["oracle", _accept("take_put_boxed"), "--fn", "main", "--arg", arg]) == 0
        verdict = json.loads(capsys.readouterr().out)
        assert verdict["pass"] is True

    def test_random_inputs(self, capsys):
        argv = ["oracle", _accept("variant_case"), "--fn", "main", "--random", "4", "--seed", "3"]
        assert _run(argv) == EXIT_SUCCESS
        docs = json.loads(capsys.readouterr().out)
        assert len(docs) == 4
        assert all(d["verdict"]["pass"] for d in docs)

    def test_fuel_exhaustion_is_an_oracle_failure(self, capsys, monkeypatch):
        monkeypatch.setenv("COGC_FUEL", "3")
        assert _run(["oracle", _accept("calls"), "--fn", "main", "--arg", "3"]) == EXIT_ORACLE
        assert json.loads(capsys.readouterr().out)["pass"] is False

    def test_arg_and_random_are_exclusive(self, capsys):
        argv = ["oracle", _accept("arith"), "--fn", "main", "--arg", "1", "--random", "2"]
        assert _run(argv) == EXIT_USAGE
        assert "mutually exclusive" in capsys.readouterr().err

    def test_samples_must_be_positive(self):
        argv = ["oracle", _accept("arith"), "--fn", "main", "--random", "0"]
        assert _run(argv) == EXIT_USAGE


# ---------------------------------------------------------------------------
# Passes
# ---------------------------------------------------------------------------


class TestPassCommands:
    def test_desugar(self, capsys):
        assert _run(["desugar", _accept("match")]) == EXIT_SUCCESS
        out = capsys.readouterr().out
        assert "(case" in out
        assert "(match" not in out

    def test_anf(self, capsys):
        assert _run(["anf", _accept("arith")]) == EXIT_SUCCESS
        out = capsys.readouterr().out
        assert "(op * x (lit u8 3))" in out
        assert "t0" in out

    def test_mono_with_rename_map(self, capsys, tmp_path):
        out = tmp_path / "rename.json"
        assert _run(["mono", _accept("poly_pair"), "--rename-map", str(out)]) == EXIT_SUCCESS
        assert "dup_1" in capsys.readouterr().out
        assert {"from": "dup", "args": ["bool"], "to": "dup_1"} in json.loads(out.read_text())

    def test_mono_entries_from_config(self, capsys, tmp_path):
        config = tmp_path / "cogc.yaml"
        config.write_text("mono:\n  entries: [square]\n")
        assert _run(["mono", _accept("calls"), "--config", str(config)]) == EXIT_SUCCESS
        out = capsys.readouterr().out
        assert "square_0" in out
        assert "main_0" not in out

    def test_mono_polymorphic_entry(self, capsys):
        assert _run(["mono", _accept("poly_pair"), "--entry", "dup"]) == EXIT_FAILURE
        assert "error[NoEntryPoint]" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# C backend
# ---------------------------------------------------------------------------


class TestCBackend:
    def test_emit_c(self, capsys, tmp_path):
        out = tmp_path / "c"
        assert _run(["emit-c", _accept("arith"), "-o", str(out)]) == EXIT_SUCCESS
        printed = capsys.readouterr().out.split()
        assert sorted(Path(p).name for p in printed) == ["arith.c", "arith.h", "cogc_runtime.h"]
        assert (out / "arith.c").exists()

    def test_diff_c(self, capsys, c_compiler):
        argv = ["diff-c", _accept("arith"), "--fn", "main", "--arg", "1", "--arg", "200"]
        assert _run(argv) == EXIT_SUCCESS
        assert json.loads(capsys.readouterr().out)["status"] == "PASS"

    def test_diff_c_skipped_without_compiler(self, capsys, monkeypatch):
        monkeypatch.setattr(cogc.codegen.diff, "find_c_compiler", lambda configured="": None)
        assert _run(["diff-c", _accept("arith"), "--fn", "main", "--arg", "1"]) == EXIT_SUCCESS
        assert json.loads(capsys.readouterr().out)["status"] == "SKIPPED"

    def test_bad_config(self, capsys, tmp_path):
        config = tmp_path / "bad.yaml"
        config.write_text("oracle:\n  jobs: 0\n")
        argv = ["emit-c", _accept("arith"), "-o", str(tmp_path), "--config", str(config)]
        assert _run(argv) == EXIT_FAILURE
        assert "oracle.jobs must be positive" in capsys.readouterr().err
