"""Tests for cogc.codegen — C emission and the differential run against the interpreter."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

import cogc.codegen.diff
from cogc.codegen import (
    CEmitter,
    CodegenError,
    CUnit,
    DiffCase,
    DiffStatus,
    DiffVerdict,
    OutputMismatch,
    UnsupportedConstruct,
    c_identifier,
    diff_run_c,
    emit_c,
    find_c_compiler,
    interpret,
    json_mismatch,
)
from cogc.library import builtin_library
from cogc.marshal import random_input
from cogc.pipeline import c_stage, load_file, load_program
from cogc.syntax import PrimType
from cogc.values import LitV

CORPUS = Path(__file__).parent / "corpus"
ACCEPT = sorted((CORPUS / "accept").glob("*.cogc"))
RANDOM_INPUTS = 8


# --- Helpers ---


def _emit(checked) -> CUnit:
    staged, _ = c_stage(checked.program)
    return emit_c(staged.program)


# --- Identifiers ---


class TestCIdentifier:
    @pytest.mark.parametrize(
        ("name", "expected"),
        [("x", "x"), ("c'", "c_x27"), ("c''", "c_x27_x27"), ("int", "int_"), ("t0", "t0")],
    )
    def test_spelling(self, name, expected):
        assert c_identifier(name) == expected


# --- Emission ---


class TestEmitC:
    def test_unit_files(self, corpus):
        unit = _emit(corpus("arith"))
        assert set(unit.files()) == {"cogc_runtime.h", "prog.h", "prog.c"}
        assert "cg_main_0(" in unit.source
        assert '#include "prog.h"' in unit.source
        assert "COGC_MAX_WORDARRAY_LENGTH 65536u" in unit.runtime

    def test_boxed_fields_go_through_pointers(self, corpus):
        assert "->count" in _emit(corpus("take_put_boxed")).source

    def test_case_becomes_switch(self, corpus):
        assert "switch (" in _emit(corpus("match")).source

    def test_write(self, corpus, tmp_path):
        paths = _emit(corpus("arith")).write(tmp_path / "out")
        assert sorted(p.name for p in paths) == ["cogc_runtime.h", "prog.c", "prog.h"]
        assert (tmp_path / "out" / "prog.c").read_text().startswith("/*")

    def test_polymorphic_program_is_rejected(self, corpus):
        with pytest.raises(UnsupportedConstruct, match="monomorphise first"):
            CEmitter(corpus("poly_pair").program)

    def test_non_anf_operand_is_rejected(self):
        checked = load_program("(def main (forall) (fn (x u32) u32 (op + (let y x y) 1)))")
        with pytest.raises(UnsupportedConstruct, match="A-normalise"):
            CEmitter(checked.program).emit()

    def test_driver_requires_a_function(self, corpus):
        staged, _ = c_stage(corpus("arith").program)
        with pytest.raises(CodegenError, match="not a defined function"):
            CEmitter(staged.program).driver("nope", LitV(1, PrimType.U32))

    def test_emission_is_deterministic(self, corpus):
        first = _emit(corpus("poly_wordarray"))
        second = _emit(corpus("poly_wordarray"))
        assert first == second


# --- JSON comparison ---


class TestJsonMismatch:
    @pytest.mark.parametrize(
        ("expected", "actual", "path"),
        [
            ({"a": 1}, {"a": 1}, None),
            ({"a": 1}, {"a": 2}, "$.a"),
            ({"a": 1}, {"b": 1}, "$.a"),
            ([1, 2], [1], "$.length"),
            ([1, 2], [1, 3], "$[1]"),
            ({"lit": True}, {"lit": 1}, "$.lit"),
        ],
    )
    def test_paths(self, expected, actual, path):
        assert json_mismatch(expected, actual) == path

    def test_verdict_raises_on_first_mismatch(self):
        verdict = DiffVerdict(DiffStatus.FAIL, [DiffCase(1, {"a": 1}, {"a": 2})])
        with pytest.raises(OutputMismatch) as exc_info:
            verdict.raise_for_failure()
        assert exc_info.value.path == "$.a"


# --- Differential runs ---


class TestInterpret:
    def test_result_json(self, corpus):
        assert interpret(corpus("arith").program, "main", 10) == {"lit": 37, "ty": "u8"}

    def test_error_json(self, corpus):
        doc = {"p1": 7, "p2": 0}
        assert interpret(corpus("division").program, "main", doc) == {"error": "DivisionByZero"}


class TestDiffRunC:
    @pytest.mark.parametrize(
        ("name", "inputs"),
        [
            ("arith", [0, 10, 100, 255]),
            ("division", [{"p1": 7, "p2": 2}, {"p1": 7, "p2": 0}]),
            ("take_put_boxed", [{"count": 1, "total": 10}, {"count": 4294967295, "total": 0}]),
            ("match", [{"con": ["Red", 1]}, {"con": ["Green", 200]}, {"con": ["Blue", 7]}]),
            ("shifts", [{"p1": 200, "p2": 1}, {"p1": 1, "p2": 8}]),
            ("swap_boxed_fields", [{"left": {"v": 1}, "right": {"v": 2}}]),
            ("poly_wordarray", [13, 6]),
        ],
    )
    async def test_agrees_with_interpreter(self, corpus, c_compiler, tmp_path, name, inputs):
        verdict = await diff_run_c(corpus(name).program, "main", inputs, workdir=tmp_path)
        assert verdict.status is DiffStatus.PASS, verdict.to_json()
        assert len(verdict.cases) == len(inputs)

    @pytest.mark.parametrize("path", ACCEPT, ids=lambda p: p.stem)
    async def test_random_inputs_agree(self, c_compiler, tmp_path, path):
        program = load_file(path).program
        registry = builtin_library(program)
        rng = random.Random(f"diff-c-{path.stem}")
        arg_type = program.lookup("main").arg_type
        inputs = [random_input(arg_type, rng, registry) for _ in range(RANDOM_INPUTS)]
        verdict = await diff_run_c(program, "main", inputs, workdir=tmp_path)
        assert verdict.status is DiffStatus.PASS, verdict.to_json()
        assert len(verdict.cases) == RANDOM_INPUTS

    async def test_workdir_keeps_sources(self, corpus, c_compiler, tmp_path):
        await diff_run_c(corpus("arith").program, "main", [1], workdir=tmp_path)
        assert (tmp_path / "prog.c").exists()
        assert (tmp_path / "case_0" / "prog_driver.c").exists()

    async def test_skipped_without_compiler(self, corpus, monkeypatch):
        monkeypatch.setattr(cogc.codegen.diff, "find_c_compiler", lambda configured="": None)
        verdict = await diff_run_c(corpus("arith").program, "main", [1])
        assert verdict.status is DiffStatus.SKIPPED
        assert verdict.cases == []

    async def test_polymorphic_entry_is_rejected(self, corpus):
        with pytest.raises(CodegenError, match="not a monomorphic function"):
            await diff_run_c(corpus("poly_pair").program, "dup", [1])


class TestFindCCompiler:
    def test_missing_configured_compiler_falls_back(self, monkeypatch, caplog):
        monkeypatch.setattr("shutil.which", lambda name: "/usr/bin/cc" if name == "cc" else None)
        assert find_c_compiler("no-such-cc -O2") == ["cc"]
        assert "not found" in caplog.text

    def test_configured_compiler_keeps_its_flags(self, monkeypatch):
        monkeypatch.setattr("shutil.which", lambda name: f"/usr/bin/{name}")
        assert find_c_compiler("gcc -m64") == ["gcc", "-m64"]

    def test_nothing_on_path(self, monkeypatch):
        monkeypatch.setattr("shutil.which", lambda name: None)
        assert find_c_compiler() is None
