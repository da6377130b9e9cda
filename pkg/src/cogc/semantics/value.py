"""Purely functional big-step evaluation to immutable values."""

from __future__ import annotations

from cogc.semantics.base import (
    Interpreter,
    MissingAbstractImpl,
    StuckError,
    cast_literal,
    ffi_type_args,
)
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
from cogc.values import AbsFunV, ConV, Environment, FunV, LitV, RecordV, UnitV, Value


class ValueInterpreter(Interpreter):
    def eval(self, env: Environment, e: Expr) -> Value:
        # Tail positions loop instead of recursing so long let chains stay shallow.
        while True:
            self.tick(e.span)
            if self.observer is not None:
                self.observer.enter(e, env, None)
            match e:
                case Let(name, bound, body) | LetBang(_, name, bound, body):
                    env = env.bind(name, self.eval(env, bound))
                    e = body
                case If(cond, then, orelse):
                    # plain big-step conditional: only the chosen branch runs
                    c = self.eval(env, cond)
                    e = then if _truth(c, e.span) else orelse
                case Case(scrut, ctor, bound, match_body, else_name, else_body):
                    v = self.eval(env, scrut)
                    if not isinstance(v, ConV):
                        raise StuckError("case on a non-variant value", e.span)
                    if v.ctor == ctor:
                        env, e = env.bind(bound, v.payload), match_body
                    else:
                        env, e = env.bind(else_name, v), else_body
                case Take(x, fname, y, record, body):
                    r = self.eval(env, record)
                    if not isinstance(r, RecordV):
                        raise StuckError("take from a non-record value", e.span)
                    env = env.bind(x, r).bind(y, r.get(fname))
                    e = body
                case _:
                    return self._eval_leaf(env, e)

    def _eval_leaf(self, env: Environment, e: Expr) -> Value:
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
                return self.primop(op, [self.eval(env, a) for a in args], e.span)
            case App(fn, arg):
                f = self.eval(env, fn)
                return self.apply(f, self.eval(env, arg), e.span)
            case Cast(target, inner):
                return cast_literal(self.eval(env, inner), target)
            case Promote(_, inner):
                return self.eval(env, inner)
            case Esac(inner):
                v = self.eval(env, inner)
                if not isinstance(v, ConV):
                    raise StuckError("esac on a non-variant value", e.span)
                return v.payload
            case Con(ctor, inner):
                return ConV(ctor, self.eval(env, inner))
            case Struct(fields):
                return RecordV(tuple((name, self.eval(env, x)) for name, x in fields))
            case Member(inner, fname):
                r = self.eval(env, inner)
                if not isinstance(r, RecordV):
                    raise StuckError("member of a non-record value", e.span)
                return r.get(fname)
            case Put(record, fname, value):
                r = self.eval(env, record)
                v = self.eval(env, value)
                if not isinstance(r, RecordV):
                    raise StuckError("put into a non-record value", e.span)
                return r.replace(fname, v)
        raise StuckError(f"cannot evaluate {type(e).__name__}", e.span)

    def apply(self, fn: Value, arg: Value, span: Span | None = None) -> Value:
        if isinstance(fn, FunV):
            if self.observer is not None:
                self.observer.call(fn, arg, None)
            result = self.eval(Environment().bind(fn.param, arg), fn.body)
            if self.observer is not None:
                self.observer.returned(fn, result, None)
            return result
        if isinstance(fn, AbsFunV):
            decl = self.abstract_decl(fn, span)
            spec = self.registry.find_function(decl.ffi_name)
            if spec is None:
                raise MissingAbstractImpl(
                    f"no implementation registered for '{decl.ffi_name}'", span
                )
            if self.observer is not None:
                self.observer.before_abstract(decl, fn, arg, None)
            result = spec.impl_v(self, ffi_type_args(decl, fn), arg)
            if self.observer is not None:
                self.observer.after_abstract(decl, fn, arg, result, None)
            return result
        raise StuckError("application of a non-function value", span)


def _truth(v: Value, span: Span | None) -> bool:
    if not isinstance(v, LitV) or not isinstance(v.value, bool):
        raise StuckError("if condition is not a boolean", span)
    return v.value


def eval_v(program: Program, env: Environment, e: Expr, **kwargs) -> Value:
    return ValueInterpreter(program, **kwargs).eval(env, e)


def apply_fn_v(program: Program, fname: str, type_args, arg: Value, **kwargs) -> Value:
    """Call ``fname`` at ``type_args`` on ``arg``."""
    interp = ValueInterpreter(program, **kwargs)
    fn = interp.instantiate(FunRef(fname, tuple(type_args)))
    return interp.apply(fn, arg)
