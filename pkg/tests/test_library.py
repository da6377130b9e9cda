"""Tests for cogc.library — the WordArray functions and record allocators."""

from __future__ import annotations

import logging

import pytest

from cogc.library import (
    MAX_WORDARRAY_LENGTH,
    WORDARRAY,
    allocator_for,
    builtin_library,
)
from cogc.parser import parse_program
from cogc.pipeline import load_program
from cogc.semantics import Store, StuckError, apply_fn_u, apply_fn_v
from cogc.syntax import U8, PrimType
from cogc.values import AbstractV, ConV, LitV, Ptr, RecordV, UnitV

REGISTRY = builtin_library()

GET_PROGRAM = """
    (absdef wordarray_create (forall (a (D S E))) (fun u32 (abs WordArray wr a)))
    (absdef wordarray_free (forall (a (D S E))) (fun (abs WordArray wr a) unit))
    (absdef wordarray_get (forall (a (D S E)))
      (fun (rec ub (arr (abs WordArray ro a)) (idx u32)) (variant (Err unit) (Ok a))))

    (def main (forall)
      (fn (i u32) u32
        (let arr (app (funref wordarray_create u8) 4)
          (letbang (arr) r (app (funref wordarray_get u8) (struct (arr arr) (idx i)))
            (let u (app (funref wordarray_free u8) arr)
              (case r Ok v (cast u32 v) e (let z (esac e) 999)))))))
"""


def _fn(name: str):
    return REGISTRY.find_function(name)


def _array(*items: int) -> AbstractV:
    return AbstractV(WORDARRAY, items)


def _decl(text: str):
    (d,) = parse_program(text).defs
    return d


# ---------------------------------------------------------------------------
# WordArray
# ---------------------------------------------------------------------------


class TestWordArray:
    def test_create_is_zeroed(self):
        assert _fn("wordarray_create").impl_v(None, (U8,), LitV(3, PrimType.U32)) == _array(0, 0, 0)

    def test_create_at_the_limit(self):
        arr = _fn("wordarray_create").impl_v(None, (U8,), LitV(MAX_WORDARRAY_LENGTH, PrimType.U32))
        assert len(arr.payload) == MAX_WORDARRAY_LENGTH

    def test_create_over_the_limit_is_stuck(self):
        with pytest.raises(StuckError, match="exceeds"):
            too_long = LitV(MAX_WORDARRAY_LENGTH + 1, PrimType.U32)
            _fn("wordarray_create").impl_v(None, (U8,), too_long)

    def test_create_allocates_under_update(self):
        store = Store()
        p = _fn("wordarray_create").impl_u(None, (U8,), LitV(2, PrimType.U32), store)
        assert store.lookup(p) == _array(0, 0)

    def test_get(self):
        get = _fn("wordarray_get").impl_v
        arg = RecordV((("arr", _array(5, 6)), ("idx", LitV(1, PrimType.U32))))
        assert get(None, (U8,), arg) == ConV("Ok", LitV(6, PrimType.U8))
        arg = RecordV((("arr", _array(5, 6)), ("idx", LitV(2, PrimType.U32))))
        assert get(None, (U8,), arg) == ConV("Err", UnitV())

    def test_put_in_place(self):
        store = Store()
        p = store.alloc(_array(1, 2, 3))
        arg = RecordV((("arr", p), ("idx", LitV(0, PrimType.U32)), ("val", LitV(9, PrimType.U8))))
        assert _fn("wordarray_put").impl_u(None, (U8,), arg, store) == ConV("Ok", p)
        assert store.lookup(p) == _array(9, 2, 3)

    def test_put_out_of_range_returns_the_array(self):
        store = Store()
        p = store.alloc(_array(1))
        arg = RecordV((("arr", p), ("idx", LitV(1, PrimType.U32)), ("val", LitV(9, PrimType.U8))))
        assert _fn("wordarray_put").impl_u(None, (U8,), arg, store) == ConV("Err", p)
        assert store.lookup(p) == _array(1)
        varg = RecordV(
            (("arr", _array(1)), ("idx", LitV(1, PrimType.U32)), ("val", LitV(9, PrimType.U8)))
        )
        assert _fn("wordarray_put").impl_v(None, (U8,), varg) == ConV("Err", _array(1))

    def test_free_and_length(self):
        store = Store()
        p = store.alloc(_array(1, 2))
        assert _fn("wordarray_length").impl_u(None, (U8,), p, store) == LitV(2, PrimType.U32)
        assert _fn("wordarray_free").impl_u(None, (U8,), p, store) == UnitV()
        assert p not in store

    @pytest.mark.parametrize(("index", "expected"), [(2, 0), (4, 999), (100, 999)])
    def test_get_from_a_program(self, index, expected):
        program = load_program(GET_PROGRAM).program
        arg = LitV(index, PrimType.U32)
        assert apply_fn_v(program, "main", (), arg) == LitV(expected, PrimType.U32)
        result, out = apply_fn_u(program, "main", (), arg, Store())
        assert result == LitV(expected, PrimType.U32)
        assert len(out) == 0


# ---------------------------------------------------------------------------
# Allocators
# ---------------------------------------------------------------------------


class TestAllocators:
    def test_alloc_shape(self):
        spec = allocator_for(
            _decl("(absdef alloc_point (forall) (fun unit (rec wr (x u32 taken) (y u8 taken))))")
        )
        assert spec is not None
        zeroed = RecordV((("x", LitV(0, PrimType.U32)), ("y", LitV(0, PrimType.U8))))
        assert spec.impl_v(None, (), UnitV()) == zeroed
        store = Store()
        assert spec.impl_u(None, (), UnitV(), store) == Ptr(1)
        assert len(store) == 1

    def test_free_shape(self):
        spec = allocator_for(_decl("(absdef free_point (forall) (fun (rec wr (x u32)) unit))"))
        store = Store()
        p = store.alloc(RecordV((("x", LitV(1, PrimType.U32)),)))
        assert spec.impl_u(None, (), p, store) == UnitV()
        assert len(store) == 0

    @pytest.mark.parametrize(
        "text",
        [
            "(absdef alloc_point (forall) (fun unit (rec wr (x u32))))",
            "(absdef alloc_point (forall) (fun u32 (rec wr (x u32 taken))))",
            "(absdef free_outer (forall) (fun (rec wr (inner (rec wr (v u8)))) unit))",
        ],
    )
    def test_wrong_shape_warns(self, text, caplog):
        with caplog.at_level(logging.WARNING, logger="cogc.library"):
            assert allocator_for(_decl(text)) is None
        assert "does not have the shape" in caplog.text

    def test_other_names_are_ignored(self, caplog):
        with caplog.at_level(logging.WARNING, logger="cogc.library"):
            assert allocator_for(_decl("(absdef mystery (forall) (fun u8 u8))")) is None
        assert caplog.text == ""

    def test_builtin_library_registers_program_allocators(self):
        program = parse_program("""
            (absdef alloc_cell (forall) (fun unit (rec wr (v u32 taken))))
            (absdef free_cell (forall) (fun (rec wr (v u32)) unit))
            (absdef mystery (forall) (fun u8 u8))
        """)
        registry = builtin_library(program)
        assert registry.find_function("alloc_cell") is not None
        assert registry.find_function("free_cell") is not None
        assert registry.find_function("mystery") is None
