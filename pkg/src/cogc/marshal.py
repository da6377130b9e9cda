"""Conversions between JSON documents and runtime values of a given type."""

from __future__ import annotations

import random
from typing import Any

from cogc.errors import CogcError
from cogc.parser import format_type
from cogc.registry import FFIRegistry
from cogc.semantics.store import Store
from cogc.syntax import (
    CoreType,
    PrimType,
    TAbstract,
    TPrim,
    TRecord,
    TUnit,
    TVariant,
)
from cogc.values import AbstractV, ConV, LitV, Ptr, RecordV, UnitV, Value, value_to_json


class InputError(CogcError):
    code = "InputError"


def zero_value(ty: CoreType, registry: FFIRegistry | None = None) -> Value:
    """Placeholder for a slot whose contents are never observed (a taken field)."""
    match ty:
        case TPrim(prim):
            return LitV(False if prim is PrimType.BOOL else 0, prim)
        case TVariant(alts) if alts:
            ctor, payload = alts[0]
            return ConV(ctor, zero_value(payload, registry))
        case TRecord(fields, mode) if not mode.boxed:
            return RecordV(tuple((f.name, zero_value(f.type, registry)) for f in fields))
        case TAbstract(name, args, mode) if not mode.boxed and registry is not None:
            return registry.abstract_type(name).zero(args)
    return UnitV()


def from_json(obj: Any, ty: CoreType, registry: FFIRegistry, store: Store) -> tuple[Value, Value]:
    """Build corresponding value-semantics and update-semantics inputs.

    Boxed records and abstract values are allocated in ``store``.
    """
    match ty:
        case TPrim(prim):
            raw = obj.get("lit") if isinstance(obj, dict) else obj
            if prim is PrimType.BOOL:
                if not isinstance(raw, bool):
                    raise InputError(f"expected a boolean, got {obj!r}")
            elif isinstance(raw, bool) or not isinstance(raw, int) or not 0 <= raw < prim.max_value:
                raise InputError(f"expected an integer in [0, {prim.max_value}), got {obj!r}")
            v = LitV(raw, prim)
            return v, v
        case TUnit():
            if obj not in (None, {}, {"unit": True}):
                raise InputError(f"expected unit, got {obj!r}")
            return UnitV(), UnitV()
        case TVariant():
            if not (
                isinstance(obj, dict) and isinstance(obj.get("con"), list) and len(obj["con"]) == 2
            ):
                raise InputError(f"expected {{'con': [CTOR, payload]}}, got {obj!r}")
            ctor, payload = obj["con"]
            payload_ty = ty.get(ctor)
            if payload_ty is None:
                raise InputError(f"constructor '{ctor}' not in {format_type(ty)}")
            pv, pu = from_json(payload, payload_ty, registry, store)
            return ConV(ctor, pv), ConV(ctor, pu)
        case TRecord(fields, mode):
            data = obj.get("rec", obj) if isinstance(obj, dict) else None
            if not isinstance(data, dict):
                raise InputError(f"expected a record object, got {obj!r}")
            vfields, ufields = [], []
            for f in fields:
                if f.taken:
                    z = zero_value(f.type, registry)
                    vfields.append((f.name, z))
                    ufields.append((f.name, z))
                    continue
                if f.name not in data:
                    raise InputError(f"missing field '{f.name}'")
                fv, fu = from_json(data[f.name], f.type, registry, store)
                vfields.append((f.name, fv))
                ufields.append((f.name, fu))
            v, u = RecordV(tuple(vfields)), RecordV(tuple(ufields))
            return (v, store.alloc(u)) if mode.boxed else (v, u)
        case TAbstract(name, args, mode):
            spec = registry.abstract_type(name)
            data = obj.get("data") if isinstance(obj, dict) and "abs" in obj else obj
            a = spec.from_json(data, args)
            return (a, store.alloc(a)) if mode.boxed else (a, a)
    raise InputError(f"cannot build an input of type {format_type(ty)}")


def random_input(ty: CoreType, rng: random.Random, registry: FFIRegistry) -> Any:
    """A random JSON document accepted by :func:`from_json` at ``ty``."""
    match ty:
        case TPrim(prim):
            if prim is PrimType.BOOL:
                return rng.random() < 0.5
            top = prim.max_value - 1
            return rng.choice([0, 1, 2, top, top - 1, rng.randint(0, 100), rng.randint(0, top)])
        case TUnit():
            return {"unit": True}
        case TVariant(alts) if alts:
            ctor, payload = rng.choice(alts)
            return {"con": [ctor, random_input(payload, rng, registry)]}
        case TRecord(fields, _):
            return {
                "rec": {f.name: random_input(f.type, rng, registry) for f in fields if not f.taken}
            }
        case TAbstract(name, args, _):
            return {"abs": name, "data": registry.abstract_type(name).random_json(args, rng)}
    raise InputError(f"cannot generate inputs of type {format_type(ty)}")


def typed_json(value: Value, ty: CoreType, store: Store | None = None) -> Any:
    """Deep JSON form that follows pointers and omits taken fields.

    With a store, boxed values carry ``"ptr"`` numbers assigned in first-visit order,
    so two results are equal exactly when they agree up to a pointer bijection.
    """
    numbering: dict[Ptr, int] = {}

    def go(v: Value, t: CoreType) -> Any:
        ptr_info: dict[str, Any] = {}
        if isinstance(v, Ptr):
            if store is None:
                raise InputError("pointer value without a store")
            if v in numbering:
                return {"ptr": numbering[v]}
            numbering[v] = len(numbering)
            ptr_info = {"ptr": numbering[v]}
            v = store.lookup(v)
        match t:
            case TPrim(prim):
                return {"lit": v.value, "ty": prim.value}
            case TUnit():
                return {"unit": True}
            case TVariant():
                return {"con": [v.ctor, go(v.payload, t.get(v.ctor))]}
            case TRecord(fields, _):
                inner = {f.name: go(v.get(f.name), f.type) for f in fields if not f.taken}
                return {**ptr_info, "rec": inner}
            case TAbstract():
                return {**ptr_info, **value_to_json(v)}
        return value_to_json(v)

    return go(value, ty)
