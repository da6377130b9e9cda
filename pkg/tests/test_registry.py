"""Tests for cogc.registry — FFIRegistry, signature matching and build_registry."""

from __future__ import annotations

import logging

import pytest

from cogc.library import WORDARRAY, WORDARRAY_FUNCTIONS, WORDARRAY_SPEC, builtin_library
from cogc.parser import parse_program
from cogc.registry import (
    AbstractFnSpec,
    CorrFailure,
    DuplicateRegistration,
    FFIRegistry,
    SignatureMismatch,
    UnknownAbstract,
    build_registry,
    same_signature,
)
from cogc.syntax import U8, U32, Kind, Mode, PolyType, TFun, TVar
from cogc.values import AbstractV

DSE = Kind.DISCARD | Kind.SHARE | Kind.ESCAPE

# --- Helpers ---


def _make_fn(name: str, signature: PolyType | None = None) -> AbstractFnSpec:
    return AbstractFnSpec(
        name=name,
        signature=signature or PolyType((), TFun(U32, U32)),
        impl_v=lambda interp, type_args, arg: arg,
        impl_u=lambda interp, type_args, arg, store: arg,
    )


def _identity(var: str, kind: Kind = DSE) -> PolyType:
    return PolyType(((var, kind),), TFun(TVar(var), TVar(var)))


# --- Fixtures ---


@pytest.fixture()
def registry():
    return builtin_library()


# --- FFIRegistry tests ---


class TestFFIRegistryLookup:
    def test_lookup_type_and_function(self, registry):
        assert registry.lookup(WORDARRAY) is WORDARRAY_SPEC
        assert registry.lookup("wordarray_get").name == "wordarray_get"

    def test_lookup_unknown_raises(self, registry):
        with pytest.raises(UnknownAbstract, match="'Bitmap'"):
            registry.lookup("Bitmap")
        with pytest.raises(UnknownAbstract):
            registry.abstract_type("wordarray_get")

    def test_find_returns_none_for_unknown(self, registry):
        assert registry.find_type("Bitmap") is None
        assert registry.find_function(WORDARRAY) is None

    def test_contents(self, registry):
        assert [t.name for t in registry.all_types()] == [WORDARRAY]
        assert sorted(f.name for f in registry.all_functions()) == [
            "wordarray_create",
            "wordarray_free",
            "wordarray_get",
            "wordarray_length",
            "wordarray_map_no_break",
            "wordarray_put",
        ]

    def test_duplicate_registration(self, registry):
        with pytest.raises(DuplicateRegistration):
            registry.register_type(WORDARRAY_SPEC)
        with pytest.raises(DuplicateRegistration, match="wordarray_free"):
            registry.register_fn(_make_fn("wordarray_free"))


class TestValidateProgram:
    def test_matching_declaration_passes(self, registry):
        program = parse_program(
            "(absdef wordarray_length (forall (b (D S E))) (fun (abs WordArray ro b) u32))"
        )
        registry.validate_program(program)

    def test_mismatched_declaration_raises(self, registry):
        program = parse_program(
            "(absdef wordarray_length (forall (a (D S E))) (fun (abs WordArray wr a) u32))"
        )
        with pytest.raises(SignatureMismatch, match="wordarray_length"):
            registry.validate_program(program)

    def test_unregistered_declaration_is_logged(self, registry, caplog):
        program = parse_program("(absdef mystery (forall) (fun u8 u8))")
        with caplog.at_level(logging.DEBUG, logger="cogc.registry"):
            registry.validate_program(program)
        assert "mystery" in caplog.text

    def test_instances_are_not_rechecked(self, registry):
        # a monomorphic instance keeps its source name in the origin
        program = parse_program(
            "(absdef wordarray_length_0 (forall) (fun (abs WordArray ro u8) u32)"
            " (of wordarray_length u8))"
        )
        registry.validate_program(program)


class TestSameSignature:
    def test_alpha_equivalent(self):
        assert same_signature(_identity("a"), _identity("b"))

    def test_kinds_must_agree(self):
        assert not same_signature(_identity("a"), _identity("a", Kind.SHARE))

    def test_binder_count_must_agree(self):
        assert not same_signature(_identity("a"), PolyType((), TFun(U8, U8)))


class TestAbstractTypeSpec:
    def test_corr_rejects_other_tags(self):
        with pytest.raises(CorrFailure) as exc_info:
            WORDARRAY_SPEC.corr(AbstractV("Bitmap", ()), None, None, (U8,), Mode.WRITABLE)
        assert exc_info.value.rule == "RAbs"

    def test_corr_checks_element_width(self):
        with pytest.raises(CorrFailure, match="does not fit in u8"):
            WORDARRAY_SPEC.corr(None, None, AbstractV(WORDARRAY, (1, 300)), (U8,), Mode.READ_ONLY)

    def test_corr_needs_primitive_elements(self):
        with pytest.raises(CorrFailure, match="primitive"):
            WORDARRAY_SPEC.corr(None, None, AbstractV(WORDARRAY, ()), (TVar("a"),), Mode.WRITABLE)

    def test_corr_owns_no_pointers(self):
        a = AbstractV(WORDARRAY, (1, 2))
        assert WORDARRAY_SPEC.corr(a, None, a, (U8,), Mode.WRITABLE) == (frozenset(), frozenset())

    def test_zero_is_empty(self):
        assert WORDARRAY_SPEC.zero((U8,)) == AbstractV(WORDARRAY, ())


# --- build_registry tests ---


class TestBuildRegistry:
    def test_build_registry_aggregates(self):
        registry = build_registry([WORDARRAY_SPEC], [*WORDARRAY_FUNCTIONS, _make_fn("bump")])
        assert registry.find_function("bump") is not None
        assert len(registry.all_functions()) == len(WORDARRAY_FUNCTIONS) + 1

    def test_build_registry_duplicate_raises(self):
        with pytest.raises(DuplicateRegistration, match="bump"):
            build_registry([], [_make_fn("bump"), _make_fn("bump")])

    def test_build_registry_empty(self):
        registry = build_registry([], [])
        assert isinstance(registry, FFIRegistry)
        assert registry.all_types() == []
        assert registry.all_functions() == []
