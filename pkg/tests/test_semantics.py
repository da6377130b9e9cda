"""Tests for cogc.semantics.value — evaluation of the corpus under the value semantics."""

from __future__ import annotations

import pytest

from cogc.library import builtin_library
from cogc.marshal import from_json, typed_json
from cogc.parser import parse_program
from cogc.pipeline import load_program
from cogc.semantics import (
    DivisionByZero,
    EvalObserver,
    FuelExhausted,
    MissingAbstractImpl,
    Store,
    StuckError,
    UpdateInterpreter,
    ValueInterpreter,
    apply_fn_v,
    eval_v,
)
from cogc.syntax import BOOL, U16, U32, App, FunRef, PrimType, Var
from cogc.values import Environment, LitV


def _lit(value, ty):
    return {"lit": value, "ty": ty}


def _tuple(a, b):
    return {"rec": {"p1": a, "p2": b}}


def _run(checked, doc, **kwargs):
    program = checked.program
    d = program.lookup("main")
    registry = builtin_library(program)
    v, _ = from_json(doc, d.arg_type, registry, Store())
    result = apply_fn_v(program, "main", (), v, registry=registry, **kwargs)
    return typed_json(result, d.result_type)


# name, input document, expected typed JSON
CASES = [
    ("arith", 10, _lit(37, "u8")),
    ("arith", 100, _lit(51, "u8")),
    ("compare", 4, _lit(True, "bool")),
    ("compare", 5, _lit(False, "bool")),
    ("compare", 12, _lit(False, "bool")),
    ("cast", 255, _lit(1000255, "u64")),
    ("let_chain", 3, _lit(12, "u16")),
    ("let_chain", 65535, _lit(1, "u16")),
    ("variant_case", {"con": ["Some", 41]}, _lit(42, "u32")),
    ("variant_case", {"con": ["None", {"unit": True}]}, _lit(0, "u32")),
    ("match", {"con": ["Red", 1]}, _lit(2, "u8")),
    ("match", {"con": ["Green", 200]}, _lit(144, "u8")),
    ("match", {"con": ["Blue", 7]}, _lit(7, "u8")),
    ("match_compound", 0, _lit(100, "u32")),
    ("match_compound", 10, _lit(9, "u32")),
    ("promote", 50, {"con": ["Small", _lit(50, "u8")]}),
    ("promote", 200, {"con": ["Big", _lit(200000, "u32")]}),
    ("nested_if", 200, {"con": ["Hi", _lit(200, "u8")]}),
    ("nested_if", 84, {"con": ["Lo", _lit(84, "u8")]}),
    ("struct_member", 5, _lit(11, "u32")),
    ("tuple_swap", {"p1": 1, "p2": 2}, _tuple(_lit(2, "u16"), _lit(1, "u8"))),
    ("bool_ops", {"p1": False, "p2": True}, _lit(True, "bool")),
    ("bool_ops", {"p1": True, "p2": False}, _lit(False, "bool")),
    ("shifts", {"p1": 200, "p2": 1}, _tuple(_lit(144, "u8"), _lit(100, "u8"))),
    ("shifts", {"p1": 1, "p2": 8}, _tuple(_lit(0, "u8"), _lit(0, "u8"))),
    ("u64_wrap", 1, _lit(2**64 - 1, "u64")),
    ("u64_wrap", 0, _lit(0, "u64")),
    ("calls", 3, _lit(82, "u32")),
    ("higher_order", 5, _lit(7, "u32")),
    ("shadowing", 4, _lit(10, "u32")),
    ("case_shadow", {"con": ["A", 7]}, _lit(7, "u16")),
    ("case_shadow", {"con": ["B", 300]}, _lit(300, "u16")),
    ("esac_single", {"con": ["Only", {"rec": {"p1": 1, "p2": 2}}]}, _lit(3, "u8")),
    ("unit_fn", {"unit": True}, {"unit": True}),
    ("unused_discard", {"p1": 3, "p2": True}, _lit(True, "bool")),
    ("division", {"p1": 7, "p2": 2}, _tuple(_lit(3, "u32"), _lit(1, "u32"))),
    ("letbang_length", 5, _lit(5, "u32")),
    ("wordarray_put_get", 9, _lit(9, "u8")),
    ("map_no_break", 13, _lit(5, "u32")),
    ("poly_wordarray", 13, _lit(14, "u32")),
    ("alloc_free", {"p1": 3, "p2": 4}, _lit(7, "u32")),
    ("poly_id", {"v": 5}, {"rec": {"v": _lit(5, "u32")}}),
    (
        "take_put_boxed",
        {"count": 1, "total": 10},
        {"rec": {"count": _lit(2, "u32"), "total": _lit(10, "u64")}},
    ),
    (
        "poly_pair",
        0,
        _tuple(
            _tuple(_lit(0, "u16"), _lit(0, "u16")), _tuple(_lit(True, "bool"), _lit(True, "bool"))
        ),
    ),
]


class TestCorpusResults:
    @pytest.mark.parametrize(
        ("name", "doc", "expected"), CASES, ids=[f"{c[0]}-{i}" for i, c in enumerate(CASES)]
    )
    def test_result(self, corpus, name, doc, expected):
        assert _run(corpus(name), doc) == expected


class TestEvalErrors:
    def test_division_by_zero(self, corpus):
        with pytest.raises(DivisionByZero):
            _run(corpus("division"), {"p1": 7, "p2": 0})

    def test_fuel_exhausted(self, corpus):
        with pytest.raises(FuelExhausted):
            _run(corpus("calls"), 3, fuel=5)

    def test_oversized_wordarray_is_stuck(self, corpus):
        with pytest.raises(StuckError, match="exceeds"):
            _run(corpus("letbang_length"), 70000)

    def test_unelaborated_literal_is_stuck(self):
        program = parse_program("(def main (forall) (fn (x u32) u32 (op + x 1)))")
        with pytest.raises(StuckError, match="elaborate"):
            apply_fn_v(program, "main", (), LitV(1, PrimType.U32))

    def test_missing_abstract_implementation(self):
        checked = load_program("""
            (absdef mystery (forall) (fun u32 u32))
            (def main (forall) (fn (x u32) u32 (app (funref mystery) x)))
        """)
        with pytest.raises(MissingAbstractImpl, match="mystery"):
            _run(checked, 1)


class TestInterpreter:
    def test_eval_open_expression(self, corpus):
        program = corpus("calls").program
        env = Environment.of(x=LitV(3, PrimType.U32))
        assert eval_v(program, env, App(FunRef("square"), Var("x"))) == LitV(9, PrimType.U32)

    def test_instances_are_cached(self, corpus):
        interp = ValueInterpreter(corpus("poly_pair").program)
        ref = FunRef("dup", (U32,))
        assert interp.instantiate(ref) is interp.instantiate(ref)
        assert interp.instantiate(ref).origin == ("dup", (U32,))

    def test_observer_sees_calls_and_abstract_calls(self, corpus):
        class Recorder(EvalObserver):
            def __init__(self):
                self.calls = []
                self.abstract = []

            def call(self, fn, arg, store):
                self.calls.append(fn.origin[0])

            def after_abstract(self, decl, fn, arg, result, store):
                self.abstract.append(decl.ffi_name)

        checked = corpus("letbang_length")
        recorder = Recorder()
        interp = ValueInterpreter(checked.program, observer=recorder)
        interp.apply(interp.instantiate(FunRef("main")), LitV(2, PrimType.U32))
        assert recorder.calls == ["main"]
        assert recorder.abstract == ["wordarray_create", "wordarray_length", "wordarray_free"]

    @pytest.mark.parametrize("sem", ["value", "update"])
    def test_observer_sees_calls_return_in_order(self, corpus, sem):
        class Recorder(EvalObserver):
            def __init__(self):
                self.events = []

            def call(self, fn, arg, store):
                self.events.append(("call", fn.origin))

            def returned(self, fn, result, store):
                self.events.append(("return", fn.origin))

        program = corpus("poly_pair").program
        recorder = Recorder()
        arg = LitV(0, PrimType.U16)
        if sem == "value":
            interp = ValueInterpreter(program, observer=recorder)
            interp.apply(interp.instantiate(FunRef("main")), arg)
        else:
            interp = UpdateInterpreter(program, observer=recorder)
            interp.apply(interp.instantiate(FunRef("main")), arg, Store())
        main, dup_u16, dup_bool = ("main", ()), ("dup", (U16,)), ("dup", (BOOL,))
        assert recorder.events == [
            ("call", main),
            ("call", dup_u16),
            ("return", dup_u16),
            ("call", dup_bool),
            ("return", dup_bool),
            ("return", main),
        ]

    def test_environment_shadowing(self):
        env = Environment.of(x=LitV(1, PrimType.U32)).bind("x", LitV(2, PrimType.U32))
        assert env.lookup("x") == LitV(2, PrimType.U32)
        assert env.items() == [("x", LitV(2, PrimType.U32))]
        with pytest.raises(KeyError):
            env.lookup("y")
