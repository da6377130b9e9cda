"""Built-in FFI library: the WordArray type, its iterator, and record allocators."""

from __future__ import annotations

import logging
import random
from typing import Any

from cogc.kinding import kind_check
from cogc.marshal import InputError, zero_value
from cogc.registry import (
    AbstractFnSpec,
    AbstractTypeSpec,
    CorrFailure,
    CorrSets,
    FFIRegistry,
    build_registry,
)
from cogc.semantics.base import StuckError
from cogc.semantics.store import Store
from cogc.syntax import (
    U32,
    UNIT,
    AbsFunDecl,
    CoreType,
    Field,
    Kind,
    Mode,
    PolyType,
    PrimType,
    Program,
    TAbstract,
    TFun,
    TPrim,
    TRecord,
    TVar,
    TVariant,
)
from cogc.values import AbstractV, ConV, LitV, Ptr, RecordV, UnitV, Value

logger = logging.getLogger("cogc.library")

WORDARRAY = "WordArray"
_A = TVar("a")
_B = TVar("b")
_ELEM = (("a", Kind.DISCARD | Kind.SHARE | Kind.ESCAPE),)
MAX_WORDARRAY_LENGTH = 1 << 16


def wordarray_type(elem: CoreType, mode: Mode = Mode.WRITABLE) -> TAbstract:
    return TAbstract(WORDARRAY, (elem,), mode)


def _ub(*fields: tuple[str, CoreType]) -> TRecord:
    return TRecord(tuple(Field(name, ty) for name, ty in fields), Mode.UNBOXED)


def _elem_prim(type_args: tuple[CoreType, ...]) -> PrimType:
    if not type_args or not isinstance(type_args[0], TPrim):
        raise StuckError("WordArray element type must be a primitive type")
    return type_args[0].prim


def _lit(value: int | bool, prim: PrimType) -> LitV:
    return LitV(value, prim)


# --- The WordArray abstract type ---


def _check_elements(payload: Any, prim: PrimType, side: str) -> None:
    if not isinstance(payload, tuple):
        raise CorrFailure("RAbs", f"{side} payload is not an element sequence")
    for x in payload:
        if prim is PrimType.BOOL:
            if not isinstance(x, bool):
                raise CorrFailure("RAbs", f"{side} element {x!r} is not a boolean")
        elif isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < prim.max_value:
            raise CorrFailure("RAbs", f"{side} element {x!r} does not fit in {prim.value}")


def _wordarray_corr(
    a_u: AbstractV | None,
    store: Store | None,
    a_v: AbstractV | None,
    type_args: tuple[CoreType, ...],
    mode: Mode,
) -> CorrSets:
    if not type_args or not isinstance(type_args[0], TPrim):
        raise CorrFailure("RAbs", "WordArray element type must be primitive")
    prim = type_args[0].prim
    for side, a in (("update", a_u), ("value", a_v)):
        if a is None:
            continue
        if a.tag != WORDARRAY:
            raise CorrFailure("RAbs", f"{side} value is a {a.tag}, not a {WORDARRAY}")
        _check_elements(a.payload, prim, side)
    if a_u is not None and a_v is not None and a_u.payload != a_v.payload:
        raise CorrFailure("RAbs", "array contents differ between the semantics")
    # elements are unboxed words, so the payload owns no pointers
    return frozenset(), frozenset()


def _wordarray_from_json(data: Any, type_args: tuple[CoreType, ...]) -> AbstractV:
    prim = _elem_prim(type_args)
    if not isinstance(data, list):
        raise InputError(f"expected a list of {prim.value} elements, got {data!r}")
    payload = tuple(data)
    try:
        _check_elements(payload, prim, "input")
    except CorrFailure as exc:
        raise InputError(exc.reason) from None
    return AbstractV(WORDARRAY, payload)


def _wordarray_random(type_args: tuple[CoreType, ...], rng: random.Random) -> list:
    prim = _elem_prim(type_args)
    if prim is PrimType.BOOL:
        return [rng.random() < 0.5 for _ in range(rng.randint(0, 5))]
    return [rng.randint(0, min(prim.max_value - 1, 1000)) for _ in range(rng.randint(0, 5))]


WORDARRAY_SPEC = AbstractTypeSpec(
    name=WORDARRAY,
    arity=1,
    corr=_wordarray_corr,
    zero=lambda type_args: AbstractV(WORDARRAY, ()),
    from_json=_wordarray_from_json,
    random_json=_wordarray_random,
)


# --- WordArray functions ---


def _contents(a: Value, store: Store | None) -> tuple:
    if isinstance(a, Ptr):
        a = store.lookup(a)
    if not isinstance(a, AbstractV) or a.tag != WORDARRAY:
        raise StuckError("expected a WordArray")
    return a.payload


def _create_v(interp, type_args, arg):
    if arg.value > MAX_WORDARRAY_LENGTH:
        raise StuckError(f"WordArray of {arg.value} elements exceeds {MAX_WORDARRAY_LENGTH}")
    zero = zero_value(TPrim(_elem_prim(type_args)))
    return AbstractV(WORDARRAY, (zero.value,) * arg.value)


def _create_u(interp, type_args, arg, store):
    return store.alloc(_create_v(interp, type_args, arg))


def _free_u(interp, type_args, arg, store):
    store.free(arg)
    return UnitV()


def _length_v(interp, type_args, arg):
    return _lit(len(_contents(arg, None)), PrimType.U32)


def _length_u(interp, type_args, arg, store):
    return _lit(len(_contents(arg, store)), PrimType.U32)


def _get(type_args, arg, store):
    items = _contents(arg.get("arr"), store)
    idx = arg.get("idx").value
    if idx >= len(items):
        return ConV("Err", UnitV())
    return ConV("Ok", _lit(items[idx], _elem_prim(type_args)))


def _put_v(interp, type_args, arg):
    arr = arg.get("arr")
    items = _contents(arr, None)
    idx = arg.get("idx").value
    if idx >= len(items):
        return ConV("Err", arr)
    updated = items[:idx] + (arg.get("val").value,) + items[idx + 1:]
    return ConV("Ok", AbstractV(WORDARRAY, updated))


def _put_u(interp, type_args, arg, store):
    arr = arg.get("arr")
    items = _contents(arr, store)
    idx = arg.get("idx").value
    if idx >= len(items):
        return ConV("Err", arr)
    updated = items[:idx] + (arg.get("val").value,) + items[idx + 1:]
    store.update(arr, AbstractV(WORDARRAY, updated))
    return ConV("Ok", arr)


def _map_step(apply, prim: PrimType, items: tuple, fn: Value, acc: Value):
    out = []
    for x in items:
        result = apply(fn, RecordV((("elem", _lit(x, prim)), ("acc", acc))))
        out.append(result.get("elem").value)
        acc = result.get("acc")
    return tuple(out), acc


def _map_v(interp, type_args, arg):
    prim = _elem_prim(type_args)
    items, acc = _map_step(
        interp.apply, prim, _contents(arg.get("arr"), None), arg.get("f"), arg.get("acc")
    )
    return RecordV((("arr", AbstractV(WORDARRAY, items)), ("acc", acc)))


def _map_u(interp, type_args, arg, store):
    prim = _elem_prim(type_args)
    arr = arg.get("arr")

    def apply(fn, x):
        return interp.apply(fn, x, store)

    items, acc = _map_step(apply, prim, _contents(arr, store), arg.get("f"), arg.get("acc"))
    store.update(arr, AbstractV(WORDARRAY, items))
    return RecordV((("arr", arr), ("acc", acc)))


_WA_WR = wordarray_type(_A, Mode.WRITABLE)
_WA_RO = wordarray_type(_A, Mode.READ_ONLY)
_STEP = _ub(("elem", _A), ("acc", _B))

WORDARRAY_FUNCTIONS = [
    AbstractFnSpec("wordarray_create", PolyType(_ELEM, TFun(U32, _WA_WR)), _create_v, _create_u),
    AbstractFnSpec(
        "wordarray_free",
        PolyType(_ELEM, TFun(_WA_WR, UNIT)),
        lambda interp, type_args, arg: UnitV(),
        _free_u,
    ),
    AbstractFnSpec("wordarray_length", PolyType(_ELEM, TFun(_WA_RO, U32)), _length_v, _length_u),
    AbstractFnSpec(
        "wordarray_get",
        PolyType(
            _ELEM,
            TFun(_ub(("arr", _WA_RO), ("idx", U32)), TVariant((("Err", UNIT), ("Ok", _A)))),
        ),
        lambda interp, type_args, arg: _get(type_args, arg, None),
        lambda interp, type_args, arg, store: _get(type_args, arg, store),
    ),
    AbstractFnSpec(
        "wordarray_put",
        PolyType(
            _ELEM,
            TFun(
                _ub(("arr", _WA_WR), ("idx", U32), ("val", _A)),
                TVariant((("Err", _WA_WR), ("Ok", _WA_WR))),
            ),
        ),
        _put_v,
        _put_u,
    ),
    AbstractFnSpec(
        "wordarray_map_no_break",
        PolyType(
            (*_ELEM, ("b", Kind(0))),
            TFun(
                _ub(("arr", _WA_WR), ("f", TFun(_STEP, _STEP)), ("acc", _B)),
                _ub(("arr", _WA_WR), ("acc", _B)),
            ),
        ),
        _map_v,
        _map_u,
    ),
]


# --- Record allocators ---


def allocator_for(decl: AbsFunDecl) -> AbstractFnSpec | None:
    """Implementation for an ``alloc_*`` or ``free_*`` declaration of the expected shape."""
    fn = decl.signature.body
    delta = dict(decl.signature.binders)
    name = decl.ffi_name
    if name.startswith("alloc_"):
        rec = fn.result
        if (
            fn.arg == UNIT
            and isinstance(rec, TRecord)
            and rec.mode is Mode.WRITABLE
            and all(f.taken for f in rec.fields)
        ):
            def alloc_v(interp, type_args, arg, rec=rec):
                return RecordV(tuple((f.name, zero_value(f.type)) for f in rec.fields))

            def alloc_u(interp, type_args, arg, store):
                return store.alloc(alloc_v(interp, type_args, arg))

            return AbstractFnSpec(name, decl.signature, alloc_v, alloc_u)
    elif name.startswith("free_"):
        rec = fn.arg
        if (
            fn.result == UNIT
            and isinstance(rec, TRecord)
            and rec.mode is Mode.WRITABLE
            and all(f.taken or kind_check(delta, f.type, Kind.DISCARD) for f in rec.fields)
        ):
            return AbstractFnSpec(
                name, decl.signature, lambda interp, type_args, arg: UnitV(), _free_u
            )
    else:
        return None
    logger.warning("'%s' does not have the shape of a built-in allocator", name)
    return None


def builtin_library(program: Program | None = None) -> FFIRegistry:
    """Registry with WordArray plus allocators for the program's ``alloc_*``/``free_*``."""
    registry = build_registry([WORDARRAY_SPEC], WORDARRAY_FUNCTIONS)
    if program is not None:
        for d in program.defs:
            if (
                isinstance(d, AbsFunDecl)
                and registry.find_function(d.ffi_name) is None
                and (spec := allocator_for(d)) is not None
            ):
                registry.register_fn(spec)
    return registry
