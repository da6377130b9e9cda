"""Value typing and the correspondence relation between update and value semantics.

The relation is syntax-directed on the shape of the type, so it is computed by one
traversal that yields the read-only and writable pointer sets ``(r, w)`` of a value.
Either side may be erased (passed as None) to get the single-sided value typing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, NoReturn

from cogc.errors import CogcError
from cogc.kinding import subst_type
from cogc.parser import format_type
from cogc.registry import CorrFailure, FFIRegistry
from cogc.semantics.store import Store
from cogc.syntax import (
    CoreType,
    Field,
    Mode,
    PrimType,
    Program,
    TAbstract,
    TFun,
    TPrim,
    TRecord,
    TUnit,
    TVariant,
)
from cogc.typecheck import Context, TypeChecker
from cogc.values import AbstractV, AbsFunV, ConV, Environment, FunV, LitV, Ptr, RecordV, UnitV

logger = logging.getLogger("cogc.refine")

Pointers = frozenset[Ptr]
_NONE: Pointers = frozenset()


@dataclass(frozen=True, slots=True)
class PtrSets:
    ro: Pointers = _NONE
    rw: Pointers = _NONE

    def to_json(self) -> dict[str, list[int]]:
        return {"r": sorted(p.id for p in self.ro), "w": sorted(p.id for p in self.rw)}


@dataclass(frozen=True, slots=True)
class CorrViolation:
    """Why a value fails to relate: a code, the rule that rejected it, and where."""

    code: str
    rule: str
    path: tuple[str, ...]
    reason: str

    def to_json(self) -> dict[str, Any]:
        return {
            "code": self.code,
            "rule": self.rule,
            "path": "/".join(self.path),
            "reason": self.reason,
        }

    def __str__(self) -> str:
        where = "/".join(self.path) or "<root>"
        return f"{self.code} [{self.rule}] at {where}: {self.reason}"


@dataclass(frozen=True, slots=True)
class CorrReport:
    ok: bool
    sets: PtrSets = PtrSets()
    failure: CorrViolation | None = None

    @property
    def r(self) -> Pointers:
        return self.sets.ro

    @property
    def w(self) -> Pointers:
        return self.sets.rw

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"ok": self.ok, **self.sets.to_json()}
        out["failure"] = self.failure.to_json() if self.failure else None
        return out


class _Reject(Exception):
    def __init__(self, violation: CorrViolation) -> None:
        self.violation = violation
        super().__init__(str(violation))


class Relation:
    """Correspondence checker over one registry and, optionally, one program.

    With a program, function values are also re-checked against their type; the result is
    memoised per body and type.
    """

    def __init__(self, registry: FFIRegistry, program: Program | None = None) -> None:
        self.registry = registry
        self.program = program
        self._fun_ok: dict[tuple[int, CoreType], bool] = {}

    def value(self, u: Any, store: Store | None, v: Any, ty: CoreType) -> CorrReport:
        try:
            r, w = self._go(u, store, v, ty, ())
        except _Reject as exc:
            return CorrReport(False, failure=exc.violation)
        return CorrReport(True, PtrSets(r, w))

    def env(
        self,
        env_u: Environment | None,
        store: Store | None,
        env_v: Environment | None,
        gamma: Context,
    ) -> CorrReport:
        """Relate every binding of ``gamma``; writable pointers are disjoint across bindings."""
        r_all: set[Ptr] = set()
        w_all: set[Ptr] = set()
        try:
            for name, ty in gamma:
                u = _binding(env_u, name)
                v = _binding(env_v, name)
                r, w = self._go(u, store, v, ty, (name,))
                if w & (r_all | w_all) or w_all & (r | w):
                    raise _Reject(
                        CorrViolation(
                            "AliasViolation",
                            "REnv",
                            (name,),
                            "a writable pointer is reachable from more than one binding",
                        )
                    )
                r_all |= r
                w_all |= w
        except _Reject as exc:
            return CorrReport(False, failure=exc.violation)
        return CorrReport(True, PtrSets(frozenset(r_all), frozenset(w_all)))

    # --- traversal ---

    def _go(
        self, u: Any, store: Store | None, v: Any, ty: CoreType, path: tuple[str, ...]
    ) -> tuple[Pointers, Pointers]:
        match ty:
            case TPrim(prim):
                for x in (u, v):
                    if x is not None:
                        _check_literal(x, prim, path)
                if u is not None and v is not None and u.value != v.value:
                    _reject("ShapeMismatch", "RLit", path, f"{u.value} differs from {v.value}")
                return _NONE, _NONE
            case TUnit():
                for x in (u, v):
                    if x is not None and not isinstance(x, UnitV):
                        _reject("ShapeMismatch", "RUnit", path, f"{_show(x)} is not unit")
                return _NONE, _NONE
            case TFun():
                self._function(u, v, ty, path)
                return _NONE, _NONE
            case TVariant():
                return self._variant(u, store, v, ty, path)
            case TRecord(fields, mode):
                return self._record(u, store, v, fields, mode, path)
            case TAbstract(name, args, mode):
                return self._abstract(u, store, v, name, args, mode, path)
        _reject("ShapeMismatch", "RType", path, f"type {format_type(ty)} is not ground")

    def _function(self, u: Any, v: Any, ty: TFun, path: tuple[str, ...]) -> None:
        for x in (u, v):
            if x is None:
                continue
            if not isinstance(x, FunV | AbsFunV):
                _reject("ShapeMismatch", "RFun", path, f"{_show(x)} is not a function")
            if isinstance(x, FunV) and not self._fun_typed(x, ty):
                _reject(
                    "ShapeMismatch",
                    "RFun",
                    path,
                    f"function body does not have type {format_type(ty)}",
                )
        if u is not None and v is not None:
            # FunV equality ignores origin and spans: same parameter, same body
            if type(u) is not type(v) or u != v:
                _reject("ShapeMismatch", "RFun", path, "the two semantics hold different functions")

    def _fun_typed(self, fn: FunV, ty: TFun) -> bool:
        if self.program is None:
            return True
        key = (id(fn.body), ty)
        hit = self._fun_ok.get(key)
        if hit is None:
            try:
                TypeChecker(self.program).check_body({}, fn.param, ty.arg, fn.body, ty.result)
                hit = True
            except CogcError as exc:
                logger.debug("function value rejected at %s: %s", format_type(ty), exc)
                hit = False
            self._fun_ok[key] = hit
        return hit

    def _variant(
        self, u: Any, store: Store | None, v: Any, ty: TVariant, path: tuple[str, ...]
    ) -> tuple[Pointers, Pointers]:
        for x in (u, v):
            if x is not None and (not isinstance(x, ConV) or ty.get(x.ctor) is None):
                _reject(
                    "ShapeMismatch",
                    "RVariant",
                    path,
                    f"{_show(x)} is not a constructor of {format_type(ty)}",
                )
        if u is not None and v is not None and u.ctor != v.ctor:
            _reject("ShapeMismatch", "RVariant", path, f"constructor {u.ctor} vs {v.ctor}")
        ctor = (u if u is not None else v).ctor
        pu = u.payload if u is not None else None
        pv = v.payload if v is not None else None
        return self._go(pu, store, pv, ty.get(ctor), (*path, ctor))

    def _deref(self, u: Any, store: Store | None, rule: str, path: tuple[str, ...]) -> Any:
        if not isinstance(u, Ptr):
            _reject("ShapeMismatch", rule, path, f"{_show(u)} is not a pointer")
        contents = store.get(u) if store is not None else None
        if contents is None:
            _reject("DanglingPointer", rule, path, f"pointer {u.id} is not allocated")
        return contents

    def _record(
        self,
        u: Any,
        store: Store | None,
        v: Any,
        fields: tuple[Field, ...],
        mode: Mode,
        path: tuple[str, ...],
    ) -> tuple[Pointers, Pointers]:
        rule = {Mode.UNBOXED: "RRec_U", Mode.WRITABLE: "RRec_W", Mode.READ_ONLY: "RRec_R"}[mode]
        uc = self._deref(u, store, rule, path) if mode.boxed and u is not None else u
        for x in (uc, v):
            if x is not None and not isinstance(x, RecordV):
                _reject("ShapeMismatch", rule, path, f"{_show(x)} is not a record")
        r: Pointers = _NONE
        w: Pointers = _NONE
        for f in fields:
            if f.taken:
                continue
            fu = _field(uc, f.name, rule, path)
            fv = _field(v, f.name, rule, path)
            r2, w2 = self._go(fu, store, fv, f.type, (*path, f.name))
            if w2 & (r | w) or w & (r2 | w2):
                _reject(
                    "AliasViolation",
                    "RL2",
                    (*path, f.name),
                    "a writable pointer is shared with another field",
                )
            r, w = r | r2, w | w2
        return _own(u, r, w, mode, rule, path)

    def _abstract(
        self,
        u: Any,
        store: Store | None,
        v: Any,
        name: str,
        args: tuple[CoreType, ...],
        mode: Mode,
        path: tuple[str, ...],
    ) -> tuple[Pointers, Pointers]:
        rule = {Mode.UNBOXED: "RA_U", Mode.WRITABLE: "RA_W", Mode.READ_ONLY: "RA_R"}[mode]
        spec = self.registry.find_type(name)
        if spec is None:
            _reject("ShapeMismatch", rule, path, f"abstract type '{name}' is not registered")
        au = self._deref(u, store, rule, path) if mode.boxed and u is not None else u
        for x in (au, v):
            if x is not None and not isinstance(x, AbstractV):
                _reject("ShapeMismatch", rule, path, f"{_show(x)} is not an abstract value")
        try:
            r, w = spec.corr(au, store, v, args, mode)
        except CorrFailure as exc:
            _reject("ShapeMismatch", exc.rule, path, exc.reason)
        if r & w:
            _reject("AliasViolation", rule, path, "abstract value is read-only and writable")
        return _own(u, frozenset(r), frozenset(w), mode, rule, path)


def _own(
    u: Any, r: Pointers, w: Pointers, mode: Mode, rule: str, path: tuple[str, ...]
) -> tuple[Pointers, Pointers]:
    """Add the box itself: to ``w`` when writable, to ``r`` when read-only."""
    if mode is Mode.READ_ONLY and w:
        _reject(
            "ReadOnlyContainsWritable",
            rule,
            path,
            f"read-only value reaches writable pointer(s) {_ids(w)}",
        )
    if not mode.boxed or u is None:
        return r, w
    if u in r or u in w:
        _reject("AliasViolation", rule, path, f"pointer {u.id} is reachable from itself")
    if mode is Mode.WRITABLE:
        return r, w | {u}
    return r | {u}, w


def _check_literal(x: Any, prim: PrimType, path: tuple[str, ...]) -> None:
    if not isinstance(x, LitV) or x.prim is not prim:
        _reject("ShapeMismatch", "RLit", path, f"{_show(x)} is not a {prim.value} literal")
    if prim is PrimType.BOOL:
        if not isinstance(x.value, bool):
            _reject("ShapeMismatch", "RLit", path, f"{x.value!r} is not a boolean")
    elif isinstance(x.value, bool) or not 0 <= x.value < prim.max_value:
        _reject("ShapeMismatch", "RLit", path, f"{x.value} does not fit in {prim.value}")


def _field(record: RecordV | None, name: str, rule: str, path: tuple[str, ...]) -> Any:
    if record is None:
        return None
    try:
        return record.get(name)
    except KeyError:
        _reject("ShapeMismatch", rule, path, f"record has no field '{name}'")


def _binding(env: Environment | None, name: str) -> Any:
    if env is None:
        return None
    try:
        return env.lookup(name)
    except KeyError:
        _reject("MissingBinding", "REnv", (name,), f"'{name}' is not bound")


def _reject(code: str, rule: str, path: tuple[str, ...], reason: str) -> NoReturn:
    raise _Reject(CorrViolation(code, rule, path, reason))


def _ids(ptrs: Pointers) -> str:
    return ", ".join(str(p.id) for p in sorted(ptrs))


def _show(x: Any) -> str:
    return type(x).__name__


# --- Module-level entry points ---


def _relation(registry: FFIRegistry | None, program: Program | None) -> Relation:
    if registry is None:
        from cogc.library import builtin_library

        registry = builtin_library(program)
    return Relation(registry, program)


def corr_value(
    u: Any,
    store: Store,
    v: Any,
    ty: CoreType,
    *,
    registry: FFIRegistry | None = None,
    program: Program | None = None,
) -> CorrReport:
    """``u | store : v : ty [r, w]``; failures come back inside the report."""
    return _relation(registry, program).value(u, store, v, ty)


def corr_env(
    env_u: Environment,
    store: Store,
    env_v: Environment,
    gamma: Context,
    *,
    registry: FFIRegistry | None = None,
    program: Program | None = None,
) -> CorrReport:
    return _relation(registry, program).env(env_u, store, env_v, gamma)


def value_typing_v(
    v: Any, ty: CoreType, *, registry: FFIRegistry | None = None, program: Program | None = None
) -> bool:
    """Value-semantics typing: the relation with the update side erased."""
    return _relation(registry, program).value(None, None, v, ty).ok


def value_typing_u(
    u: Any,
    store: Store,
    ty: CoreType,
    *,
    registry: FFIRegistry | None = None,
    program: Program | None = None,
) -> CorrReport:
    """Update-semantics typing with pointer sets: the relation with the value side erased."""
    return _relation(registry, program).value(u, store, None, ty)


def instantiate_type(
    ty: CoreType, binders: tuple[tuple[str, Any], ...], type_args: tuple[CoreType, ...]
) -> CoreType:
    sigma = {name: t for (name, _), t in zip(binders, type_args, strict=True)}
    return subst_type(ty, sigma, complete=True)
