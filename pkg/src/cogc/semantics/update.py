"""Imperative big-step evaluation threading a mutable store."""

from __future__ import annotations

from cogc.semantics.base import (
    Interpreter,
    MissingAbstractImpl,
    StuckError,
    cast_literal,
    ffi_type_args,
)
from cogc.semantics.store import Store
from cogc.syntax import (
    App,
    Case,
    Cast,
    Con,
    Esac,
    Expr,
    FunRef,
    If,
    Let,
    LetBang,
    Lit,
    Member,
    PrimOp,
    Program,
    Promote,
    Put,
    Span,
    Struct,
    Take,
    UnitE,
    Var,
)
from cogc.values import AbsFunV, ConV, Environment, FunV, LitV, Ptr, RecordV, UnitV, Value


class UpdateInterpreter(Interpreter):
    """Boxed records live in ``store`` behind pointers and are updated in place."""

    def eval(self, env: Environment, e: Expr, store: Store) -> Value:
        while True:
            self.tick(e.span)
            if self.observer is not None:
                self.observer.enter(e, env, store)
            match e:
                case Let(name, bound, body) | LetBang(_, name, bound, body):
                    env = env.bind(name, self.eval(env, bound, store))
                    e = body
                case If(cond, then, orelse):
                    c = self.eval(env, cond, store)
                    if not isinstance(c, LitV) or not isinstance(c.value, bool):
                        raise StuckError("if condition is not a boolean", e.span)
                    e = then if c.value else orelse
                case Case(scrut, ctor, bound, match_body, else_name, else_body):
                    v = self.eval(env, scrut, store)
                    if not isinstance(v, ConV):
                        raise StuckError("case on a non-variant value", e.span)
                    if v.ctor == ctor:
                        env, e = env.bind(bound, v.payload), match_body
                    else:
                        env, e = env.bind(else_name, v), else_body
                case Take(x, fname, y, record, body):
                    r = self.eval(env, record, store)
                    # x is bound to the pointer itself, not to a copy of the cell
                    contents = self._record(r, store, e.span)
                    env = env.bind(x, r).bind(y, contents.get(fname))
                    e = body
                case _:
                    return self._eval_leaf(env, e, store)

    def _record(self, r: Value, store: Store, span: Span | None) -> RecordV:
        if isinstance(r, Ptr):
            r = store.lookup(r)
        if not isinstance(r, RecordV):
            raise StuckError("record operation on a non-record value", span)
        return r

    def _eval_leaf(self, env: Environment, e: Expr, store: Store) -> Value:
        match e:
            case Var(name):
                try:
                    return env.lookup(name)
                except KeyError:
                    raise StuckError(f"unbound variable '{name}'", e.span) from None
            case UnitE():
                return UnitV()
            case Lit():
                return self.literal(e)
            case FunRef():
                return self.instantiate(e)
            case PrimOp(op, args):
                return self.primop(op, [self.eval(env, a, store) for a in args], e.span)
            case App(fn, arg):
                f = self.eval(env, fn, store)
                return self.apply(f, self.eval(env, arg, store), store, e.span)
            case Cast(target, inner):
                return cast_literal(self.eval(env, inner, store), target)
            case Promote(_, inner):
                return self.eval(env, inner, store)
            case Esac(inner):
                v = self.eval(env, inner, store)
                if not isinstance(v, ConV):
                    raise StuckError("esac on a non-variant value", e.span)
                return v.payload
            case Con(ctor, inner):
                return ConV(ctor, self.eval(env, inner, store))
            case Struct(fields):
                return RecordV(tuple((name, self.eval(env, x, store)) for name, x in fields))
            case Member(inner, fname):
                r = self.eval(env, inner, store)
                return self._record(r, store, e.span).get(fname)
            case Put(record, fname, value):
                r = self.eval(env, record, store)
                v = self.eval(env, value, store)
                updated = self._record(r, store, e.span).replace(fname, v)
                if isinstance(r, Ptr):
                    store.update(r, updated)
                    return r
                return updated
        raise StuckError(f"cannot evaluate {type(e).__name__}", e.span)

    def apply(self, fn: Value, arg: Value, store: Store, span: Span | None = None) -> Value:
        if isinstance(fn, FunV):
            if self.observer is not None:
                self.observer.call(fn, arg, store)
            result = self.eval(Environment().bind(fn.param, arg), fn.body, store)
            if self.observer is not None:
                self.observer.returned(fn, result, store)
            return result
        if isinstance(fn, AbsFunV):
            decl = self.abstract_decl(fn, span)
            spec = self.registry.find_function(decl.ffi_name)
            if spec is None:
                raise MissingAbstractImpl(
                    f"no implementation registered for '{decl.ffi_name}'", span
                )
            if self.observer is not None:
                self.observer.before_abstract(decl, fn, arg, store)
            result = spec.impl_u(self, ffi_type_args(decl, fn), arg, store)
            if self.observer is not None:
                self.observer.after_abstract(decl, fn, arg, result, store)
            return result
        raise StuckError("application of a non-function value", span)


def eval_u(
    program: Program, env: Environment, store: Store, e: Expr, **kwargs
) -> tuple[Value, Store]:
    """Evaluate ``e``; the input store is left untouched and the final store returned."""
    out = store.copy()
    return UpdateInterpreter(program, **kwargs).eval(env, e, out), out


def apply_fn_u(
    program: Program, fname: str, type_args, arg: Value, store: Store, **kwargs
) -> tuple[Value, Store]:
    interp = UpdateInterpreter(program, **kwargs)
    out = store.copy()
    fn = interp.instantiate(FunRef(fname, tuple(type_args)))
    return interp.apply(fn, arg, out), out
