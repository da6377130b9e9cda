"""Monomorphisation: one definition per reachable ground instantiation, plus the rename map."""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Iterable, Iterator
from dataclasses import replace
from typing import Any

from cogc.kinding import subst_expr, subst_type
from cogc.parser import format_type
from cogc.passes.base import PassError
from cogc.semantics.store import Store
from cogc.syntax import (
    AbsFunDecl,
    CoreType,
    Expr,
    FunDef,
    FunRef,
    PolyType,
    Program,
    map_expr,
    type_vars,
)
from cogc.values import AbsFunV, ConV, FunV, RecordV, Value

logger = logging.getLogger("cogc.passes")

Instance = tuple[str, tuple[CoreType, ...]]


class NoEntryPoint(PassError):
    code = "NoEntryPoint"


class UnresolvedInstantiation(PassError):
    code = "UnresolvedInstantiation"


class MissingRenameEntry(PassError):
    code = "MissingRenameEntry"


def _describe(name: str, type_args: tuple[CoreType, ...]) -> str:
    if not type_args:
        return name
    return f"{name}[{', '.join(format_type(t) for t in type_args)}]"


class RenameMap:
    """Injective map from (function, ground type arguments) to a monomorphic name."""

    def __init__(self, reserved: Iterable[str] = ()) -> None:
        self._entries: dict[Instance, str] = {}
        self._targets: set[str] = set()
        self._reserved = set(reserved)
        self._counters: dict[str, int] = {}

    def fresh(self, name: str, type_args: tuple[CoreType, ...]) -> str:
        """Name for a new instance of ``name``: ``name_k`` avoiding every name in use."""
        key = (name, type_args)
        if key in self._entries:
            return self._entries[key]
        k = self._counters.get(name, 0)
        while (target := f"{name}_{k}") in self._reserved or target in self._targets:
            k += 1
        self._counters[name] = k + 1
        self.add(name, type_args, target)
        return target

    def add(self, name: str, type_args: tuple[CoreType, ...], target: str) -> None:
        if target in self._targets or target in self._reserved:
            raise PassError(f"rename target '{target}' is already in use")
        self._entries[(name, type_args)] = target
        self._targets.add(target)

    def lookup(self, name: str, type_args: tuple[CoreType, ...]) -> str:
        try:
            return self._entries[(name, type_args)]
        except KeyError:
            raise MissingRenameEntry(
                f"no monomorphic instance of {_describe(name, type_args)}"
            ) from None

    def __contains__(self, key: Instance) -> bool:
        return key in self._entries

    def __iter__(self) -> Iterator[tuple[Instance, str]]:
        return iter(self._entries.items())

    def __len__(self) -> int:
        return len(self._entries)

    def to_json(self) -> list[dict[str, Any]]:
        return [
            {"from": name, "args": [format_type(t) for t in targs], "to": target}
            for (name, targs), target in self._entries.items()
        ]


def _rewrite_refs(e: Expr, resolve) -> Expr:
    def go(node: Expr) -> Expr:
        if isinstance(node, FunRef):
            if any(type_vars(t) for t in node.type_args):
                raise UnresolvedInstantiation(
                    f"{_describe(node.name, node.type_args)} is not ground", node.span
                )
            return replace(node, name=resolve(node.name, node.type_args), type_args=())
        return map_expr(node, go)

    return go(e)


def mono_expr(rename: RenameMap, e: Expr) -> Expr:
    """Rewrite every function reference in a ground expression to its monomorphic name."""
    return _rewrite_refs(e, rename.lookup)


def _entry_points(program: Program, entries: Iterable[str] | None) -> list[str]:
    if entries is None:
        names = [d.name for d in program.fundefs() if d.signature.is_mono]
        if not names:
            raise NoEntryPoint("program has no monomorphic function to start from")
        return names
    names = list(entries)
    if not names:
        raise NoEntryPoint("no entry points given")
    for name in names:
        d = program.lookup(name)
        if not isinstance(d, FunDef):
            raise NoEntryPoint(f"entry point '{name}' is not a defined function")
        if not d.signature.is_mono:
            raise NoEntryPoint(f"entry point '{name}' is polymorphic", d.span)
    return names


def monomorphise(
    program: Program, entries: Iterable[str] | None = None
) -> tuple[Program, RenameMap]:
    """Specialise every instantiation reachable from ``entries``.

    Entry points default to all monomorphic functions. Unreachable definitions are dropped.
    Abstract functions are renamed per instance and keep their source name in ``origin``.
    """
    rename = RenameMap(d.name for d in program.defs)
    queue: deque[Instance] = deque()

    def request(name: str, type_args: tuple[CoreType, ...]) -> str:
        if (name, type_args) not in rename:
            if program.lookup(name) is None:
                raise UnresolvedInstantiation(f"no definition of '{name}'")
            queue.append((name, type_args))
        return rename.fresh(name, type_args)

    for name in _entry_points(program, entries):
        request(name, ())

    defs = []
    while queue:
        name, type_args = queue.popleft()
        d = program.lookup(name)
        if len(type_args) != len(d.signature.binders):
            raise UnresolvedInstantiation(
                f"{_describe(name, type_args)} expects {len(d.signature.binders)} type argument(s)"
            )
        sigma = {v: t for (v, _), t in zip(d.signature.binders, type_args, strict=True)}
        fn_type = subst_type(d.signature.body, sigma, complete=True)
        target = rename.lookup(name, type_args)
        if isinstance(d, AbsFunDecl):
            origin = d.origin or (d.name, type_args)
            defs.append(AbsFunDecl(target, PolyType((), fn_type), origin, span=d.span))
            continue
        body = _rewrite_refs(subst_expr(d.body, sigma), request)
        defs.append(FunDef(target, PolyType((), fn_type), d.param, body, span=d.span))

    logger.info("mono: %d instance(s) from %d definition(s)", len(defs), len(program.defs))
    return Program(tuple(defs)), rename


def mono_val(rename: RenameMap, v: Value) -> Value:
    """Map a value of the polymorphic program to the corresponding monomorphic value."""
    match v:
        case FunV(param, body, origin):
            mono_origin = None
            if origin is not None:
                mono_origin = (rename.lookup(*origin), ())
            return FunV(param, mono_expr(rename, body), origin=mono_origin)
        case AbsFunV(name, type_args):
            return AbsFunV(rename.lookup(name, type_args), ())
        case ConV(ctor, payload):
            return ConV(ctor, mono_val(rename, payload))
        case RecordV(fields):
            return RecordV(tuple((n, mono_val(rename, x)) for n, x in fields))
    return v


def mono_store(rename: RenameMap, store: Store) -> Store:
    """Store with every cell mapped by :func:`mono_val`; pointer ids are kept."""
    cells = {p.id: mono_val(rename, store.lookup(p)) for p in store}
    return Store(cells, store.next_id)
