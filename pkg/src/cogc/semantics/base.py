"""Evaluation errors, observers and the machinery both interpreters share."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from cogc.errors import CogcError
from cogc.kinding import subst_expr
from cogc.primops import SIGNATURES, apply_primop, result_type
from cogc.syntax import AbsFunDecl, Expr, FunRef, Lit, PrimType, Program, Span
from cogc.values import AbsFunV, Environment, FunV, LitV, Value

if TYPE_CHECKING:
    from cogc.registry import FFIRegistry
    from cogc.semantics.store import Store

logger = logging.getLogger("cogc.semantics")

DEFAULT_FUEL = 10_000_000


class EvalError(CogcError):
    code = "EvalError"


class StuckError(EvalError):
    code = "StuckError"


class DivisionByZero(EvalError):
    code = "DivisionByZero"


class FuelExhausted(EvalError):
    code = "FuelExhausted"


class MissingAbstractImpl(EvalError):
    code = "MissingAbstractImpl"


class DanglingPointer(EvalError):
    code = "DanglingPointer"


class DoubleFree(EvalError):
    code = "DoubleFree"


class EvalObserver:
    """Hooks called during evaluation; the default does nothing.

    ``store`` is None under the value semantics.
    """

    def enter(self, e: Expr, env: Environment, store: Store | None) -> None:
        pass

    def call(self, fn: FunV, arg: Value, store: Store | None) -> None:
        pass

    def returned(self, fn: FunV, result: Value, store: Store | None) -> None:
        pass

    def before_abstract(
        self, decl: AbsFunDecl, fn: AbsFunV, arg: Value, store: Store | None
    ) -> None:
        pass

    def after_abstract(
        self, decl: AbsFunDecl, fn: AbsFunV, arg: Value, result: Value, store: Store | None
    ) -> None:
        pass


class Interpreter:
    """Function instantiation, fuel accounting and primitive arithmetic."""

    def __init__(
        self,
        program: Program,
        registry: FFIRegistry | None = None,
        fuel: int = DEFAULT_FUEL,
        observer: EvalObserver | None = None,
        instances: dict[tuple, Value] | None = None,
    ) -> None:
        if registry is None:
            from cogc.library import builtin_library

            registry = builtin_library(program)
        self.program = program
        self.registry = registry
        self.fuel = fuel
        self.observer = observer
        # may be shared so two interpreters see the same function bodies
        self._instances: dict[tuple, Value] = {} if instances is None else instances

    def tick(self, span: Span | None) -> None:
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhausted("evaluation step budget exhausted", span)

    def instantiate(self, ref: FunRef) -> Value:
        """Value of ``ref``: the body with type arguments substituted, cached per instance."""
        key = (ref.name, ref.type_args)
        cached = self._instances.get(key)
        if cached is not None:
            return cached
        d = self.program.lookup(ref.name)
        if d is None:
            raise StuckError(f"no function named '{ref.name}'", ref.span)
        if isinstance(d, AbsFunDecl):
            value: Value = AbsFunV(d.name, ref.type_args)
        else:
            binders = d.signature.binders
            sigma = {name: t for (name, _), t in zip(binders, ref.type_args, strict=True)}
            value = FunV(d.param, subst_expr(d.body, sigma), origin=key)
        self._instances[key] = value
        return value

    def abstract_decl(self, fn: AbsFunV, span: Span | None) -> AbsFunDecl:
        d = self.program.lookup(fn.name)
        if not isinstance(d, AbsFunDecl):
            raise StuckError(f"'{fn.name}' is not an abstract function", span)
        return d

    def literal(self, e: Lit) -> LitV:
        if isinstance(e.value, bool):
            return LitV(e.value, PrimType.BOOL)
        if e.prim is None:
            raise StuckError("literal has no type annotation; elaborate the program first", e.span)
        return LitV(e.value, e.prim)

    def primop(self, op: str, args: list[Value], span: Span | None) -> LitV:
        if not all(isinstance(a, LitV) for a in args):
            raise StuckError(f"operator '{op}' applied to non-literal operands", span)
        operand = args[0].prim
        try:
            value = apply_primop(op, operand, [a.value for a in args])
        except ZeroDivisionError:
            raise DivisionByZero(f"'{op}' by zero", span) from None
        return LitV(value, result_type(SIGNATURES[op], operand))


def ffi_type_args(decl: AbsFunDecl, fn: AbsFunV):
    """Type arguments the FFI implementation sees, surviving monomorphic renaming."""
    return decl.origin[1] if decl.origin is not None else fn.type_args


def cast_literal(v: Value, target: PrimType) -> LitV:
    """Re-tag a widened literal; the value itself never changes."""
    if not isinstance(v, LitV):
        raise StuckError("cast of a non-literal value")
    if target is PrimType.BOOL:
        return LitV(bool(v.value), target)
    return LitV(int(v.value), target)
