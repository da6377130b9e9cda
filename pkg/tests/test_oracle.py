"""Tests for cogc.refine.oracle — refinement verdicts on correct and faulty programs."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from cogc.library import WORDARRAY_FUNCTIONS, WORDARRAY_SPEC, builtin_library
from cogc.marshal import from_json, random_input
from cogc.pipeline import load_file, load_program
from cogc.refine import (
    OracleFailure,
    Relation,
    frame_check,
    oracle_from_json,
    refinement_oracle,
    run_samples,
)
from cogc.registry import AbstractFnSpec, build_registry
from cogc.semantics import DanglingPointer, EvalError, Store, apply_fn_u
from cogc.syntax import PrimType
from cogc.values import LitV, Ptr, RecordV, UnitV

CORPUS = Path(__file__).parent / "corpus"
ACCEPT = sorted((CORPUS / "accept").glob("*.cogc"))
SAMPLES = 20


def _with_ffi(checked, name, impl_v, impl_u):
    """Built-in registry plus one hand-written abstract function."""
    signature = checked.program.lookup(name).signature
    spec = AbstractFnSpec(name, signature, impl_v, impl_u)
    return build_registry([WORDARRAY_SPEC], [*WORDARRAY_FUNCTIONS, spec])


def _cell(v: int) -> RecordV:
    return RecordV((("v", LitV(v, PrimType.U32)),))


# ---------------------------------------------------------------------------
# Correct programs
# ---------------------------------------------------------------------------


class TestCorpusRefines:
    @pytest.mark.parametrize("path", ACCEPT, ids=lambda p: p.stem)
    def test_random_inputs_pass(self, path):
        checked = load_file(path)
        program = checked.program
        arg_type = program.lookup("main").arg_type
        registry = builtin_library(program)
        rng = random.Random(f"oracle-{path.stem}")
        for _ in range(SAMPLES):
            doc = random_input(arg_type, rng, registry)
            verdict = oracle_from_json(program, "main", doc, registry=registry)
            assert verdict.passed, (doc, verdict.to_json())

    @pytest.mark.parametrize("x", [0, 5, 300])
    def test_polymorphic_function_at_two_types(self, corpus, x):
        # dup's body mentions no type, so both instances share one body object
        verdict = oracle_from_json(corpus("poly_pair").program, "main", x)
        assert verdict.passed, verdict.to_json()
        assert verdict.checks > 0

    def test_replayed_checks_are_counted(self, corpus):
        program = corpus("take_put_boxed").program
        doc = {"count": 1, "total": 10}
        assert oracle_from_json(program, "main", doc).checks > 0
        assert oracle_from_json(program, "main", doc, replay=False).checks == 0

    def test_pointer_sets(self, corpus):
        doc = {"count": 1, "total": 10}
        verdict = oracle_from_json(corpus("take_put_boxed").program, "main", doc)
        assert verdict.w == verdict.w_out == frozenset({Ptr(1)})
        assert verdict.to_json() == {
            "pass": True,
            "r": [],
            "w": [1],
            "r_out": [],
            "w_out": [1],
            "frame_violations": [],
            "failure": None,
        }

    def test_freed_input_is_not_in_w_out(self, corpus):
        doc = {"con": ["Drop", {"v": 5}]}
        verdict = oracle_from_json(corpus("case_linear").program, "main", doc)
        assert verdict.passed
        assert verdict.w == frozenset({Ptr(1)})
        assert verdict.w_out == frozenset()

    def test_matching_errors_pass_with_outcome(self, corpus):
        verdict = oracle_from_json(corpus("division").program, "main", {"p1": 7, "p2": 0})
        assert verdict.passed
        assert verdict.outcome == "DivisionByZero"

    def test_fuel_exhaustion_fails_termination(self, corpus):
        verdict = oracle_from_json(corpus("calls").program, "main", 3, fuel=4)
        assert not verdict.passed
        assert (verdict.failure.name, verdict.failure.code) == ("termination", "FuelExhausted")


# ---------------------------------------------------------------------------
# Unrelated updates
# ---------------------------------------------------------------------------


class TestUnrelatedUpdates:
    @pytest.mark.parametrize("path", ACCEPT, ids=lambda p: p.stem)
    def test_cells_outside_the_writable_set_are_unchanged(self, path):
        program = load_file(path).program
        d = program.lookup("main")
        registry = builtin_library(program)
        relation = Relation(registry, program)
        rng = random.Random(f"frame-{path.stem}")
        for _ in range(5):
            store = Store()
            v, u = from_json(random_input(d.arg_type, rng, registry), d.arg_type, registry, store)
            bystander = store.alloc(_cell(7))
            w = relation.value(u, store, v, d.arg_type).w
            assert bystander not in w
            try:
                _, out = apply_fn_u(program, "main", (), u, store, registry=registry)
            except EvalError:
                continue
            for p in store.pointers() - w:
                assert out.get(p) == store.get(p), p
            assert out.lookup(bystander) == _cell(7)

    def test_unreachable_cell_does_not_break_the_frame(self, corpus):
        program = corpus("take_put_boxed").program
        d = program.lookup("main")
        registry = builtin_library(program)
        store = Store()
        bystander = store.alloc(_cell(1))
        v, u = from_json({"count": 1, "total": 2}, d.arg_type, registry, store)
        verdict = refinement_oracle(program, "main", v, u, store, registry=registry)
        assert verdict.passed
        assert bystander not in verdict.w | verdict.r

    def test_write_to_an_unrelated_cell_is_an_inertia_violation(self):
        store = Store()
        p = store.alloc(_cell(1))
        q = store.alloc(_cell(2))
        after = store.copy()
        after.update(q, _cell(3))
        violations = frame_check({p}, store, {p}, after)
        assert [(v.ptr, v.rule.value) for v in violations] == [(q, "Inertia")]


# ---------------------------------------------------------------------------
# Faulty foreign functions
# ---------------------------------------------------------------------------


class TestFaultyFFI:
    def test_results_that_differ(self):
        checked = load_program("""
            (absdef bump (forall) (fun u32 u32))
            (def main (forall) (fn (x u32) u32 (app (funref bump) x)))
        """)
        registry = _with_ffi(
            checked,
            "bump",
            lambda interp, targs, arg: LitV(arg.value + 1, PrimType.U32),
            lambda interp, targs, arg, store: LitV(arg.value + 2, PrimType.U32),
        )
        verdict = oracle_from_json(checked.program, "main", 1, registry=registry)
        assert not verdict.passed
        assert verdict.failure.name == "ffi-assumption"
        assert verdict.failure.code == "ShapeMismatch"
        assert verdict.failure.context["side"] == "result"

    def test_writable_argument_dropped_without_free(self):
        checked = load_program("""
            (absdef drop_cell (forall) (fun (rec wr (v u32)) unit))
            (def main (forall) (fn (r (rec wr (v u32))) unit (app (funref drop_cell) r)))
        """)
        registry = _with_ffi(
            checked,
            "drop_cell",
            lambda interp, targs, arg: UnitV(),
            lambda interp, targs, arg, store: UnitV(),
        )
        verdict = oracle_from_json(checked.program, "main", {"v": 3}, registry=registry)
        assert (verdict.failure.name, verdict.failure.code) == ("ffi-assumption", "LeakFreedom")

    def test_result_aliases_a_writable_pointer(self):
        checked = load_program("""
            (absdef share (forall)
              (fun (rec wr (v u32)) (tuple (rec wr (v u32)) (rec wr (v u32)))))
            (def main (forall)
              (fn (r (rec wr (v u32))) (tuple (rec wr (v u32)) (rec wr (v u32)))
                (app (funref share) r)))
        """)
        registry = _with_ffi(
            checked,
            "share",
            lambda interp, targs, arg: RecordV((("p1", arg), ("p2", arg))),
            lambda interp, targs, arg, store: RecordV((("p1", arg), ("p2", arg))),
        )
        verdict = oracle_from_json(checked.program, "main", {"v": 3}, registry=registry)
        assert (verdict.failure.name, verdict.failure.code) == ("ffi-assumption", "AliasViolation")

    def test_write_through_read_only_argument(self):
        checked = load_program("""
            (absdef peek_cell (forall) (fun (rec ro (v u32)) u32))
            (def main (forall) (fn (r (rec ro (v u32))) u32 (app (funref peek_cell) r)))
        """)

        def peek_u(interp, targs, arg, store):
            old = store.lookup(arg).get("v")
            store.update(arg, _cell(99))
            return old

        registry = _with_ffi(checked, "peek_cell", lambda interp, targs, arg: arg.get("v"), peek_u)
        verdict = oracle_from_json(checked.program, "main", {"v": 3}, registry=registry)
        assert (verdict.failure.name, verdict.failure.code) == ("ffi-assumption", "Inertia")
        with pytest.raises(OracleFailure, match="Inertia"):
            verdict.raise_for_failure()


class TestUseAfterFree:
    SOURCE = """
        (absdef recycle (forall) (fun (rec wr (v u32)) (rec wr (v u32))))
        (def main (forall)
          (fn (r (rec wr (v u32))) (tuple u32 (rec wr (v u32)))
            (let s (app (funref recycle) r)
              (letbang (s) y (member s v) (tuple y s)))))
    """

    @staticmethod
    def _freeing_registry(checked):
        def recycle_u(interp, targs, arg, store):
            store.free(arg)
            return arg

        return _with_ffi(checked, "recycle", lambda interp, targs, arg: arg, recycle_u)

    def test_update_semantics_reads_a_freed_cell(self):
        checked = load_program(self.SOURCE)
        registry = self._freeing_registry(checked)
        store = Store()
        p = store.alloc(_cell(3))
        with pytest.raises(DanglingPointer, match=f"pointer {p.id}"):
            apply_fn_u(checked.program, "main", (), p, store, registry=registry)

    def test_oracle_rejects_a_pointer_returned_after_free(self):
        checked = load_program(self.SOURCE)
        registry = self._freeing_registry(checked)
        verdict = oracle_from_json(checked.program, "main", {"v": 3}, registry=registry)
        assert not verdict.passed
        assert (verdict.failure.name, verdict.failure.code) == (
            "ffi-assumption",
            "DanglingPointer",
        )
        assert verdict.failure.context["side"] == "result"


# ---------------------------------------------------------------------------
# Preconditions and batches
# ---------------------------------------------------------------------------


class TestPreconditions:
    def test_polymorphic_function_is_not_an_entry_point(self, corpus):
        program = corpus("poly_pair").program
        one = LitV(1, PrimType.U32)
        verdict = refinement_oracle(program, "dup", one, one, Store())
        assert (verdict.failure.name, verdict.failure.code) == ("precondition", "NotAnEntryPoint")

    def test_missing_function(self, corpus):
        verdict = oracle_from_json(corpus("arith").program, "nope", 1)
        assert verdict.failure.code == "NotAnEntryPoint"

    def test_arguments_must_correspond(self, corpus):
        program = corpus("calls").program
        v, u = LitV(1, PrimType.U32), LitV(2, PrimType.U32)
        verdict = refinement_oracle(program, "main", v, u, Store())
        assert (verdict.failure.name, verdict.failure.code) == ("precondition", "ShapeMismatch")

    def test_input_store_is_untouched(self, corpus):
        program = corpus("take_put_boxed").program
        store = Store()
        u = store.alloc(
            RecordV((("count", LitV(1, PrimType.U32)), ("total", LitV(0, PrimType.U64))))
        )
        before = store.copy()
        refinement_oracle(program, "main", store.lookup(u), u, store)
        assert store == before


class TestRunSamples:
    @pytest.mark.parametrize("jobs", [1, 2])
    def test_verdicts_in_input_order(self, corpus, jobs):
        program = corpus("division").program
        docs = [{"p1": 7, "p2": 2}, {"p1": 7, "p2": 0}, {"p1": 9, "p2": 3}]
        verdicts = run_samples(program, "main", docs, jobs=jobs)
        assert [v.outcome for v in verdicts] == ["value", "DivisionByZero", "value"]
        assert all(v.passed for v in verdicts)
