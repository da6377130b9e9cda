"""Kinding judgement, maximal kinds, the bang operator and type substitution."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import replace

from cogc.errors import CogcError
from cogc.syntax import (
    EMPTY_KIND,
    FULL_KIND,
    CoreType,
    Expr,
    Kind,
    Mode,
    TAbstract,
    TFun,
    TRecord,
    TVar,
    TVariant,
    TVarObserved,
    map_expr,
)

KindContext = Mapping[str, Kind]
TypeSubst = Mapping[str, CoreType]

_BANG_FLOOR = Kind.DISCARD | Kind.SHARE


class UnboundTypeVar(CogcError):
    code = "UnboundTypeVar"


def mode_kind(mode: Mode) -> Kind:
    if mode is Mode.READ_ONLY:
        return _BANG_FLOOR
    if mode is Mode.WRITABLE:
        return Kind.ESCAPE
    return FULL_KIND


def bang_kind(kind: Kind) -> Kind:
    return kind if _BANG_FLOOR.issubset(kind) else _BANG_FLOOR


def bang_mode(mode: Mode) -> Mode:
    return Mode.READ_ONLY if mode is Mode.WRITABLE else mode


def bang_type(ty: CoreType) -> CoreType:
    """Downgrade every writable mode to read-only and observe every type variable."""
    match ty:
        case TVar(name):
            return TVarObserved(name)
        case TVariant(alts):
            return TVariant(tuple((c, bang_type(t)) for c, t in alts))
        case TRecord(fields, mode):
            return TRecord(
                tuple(replace(f, type=bang_type(f.type)) for f in fields), bang_mode(mode)
            )
        case TAbstract(name, args, mode):
            return TAbstract(name, tuple(bang_type(t) for t in args), bang_mode(mode))
    # functions, unit, primitives and observed variables are fixed points
    return ty


def max_kind(delta: KindContext, ty: CoreType) -> Kind:
    """The largest kind ``ty`` has under ``delta``."""
    match ty:
        case TVar(name):
            return _lookup(delta, name)
        case TVarObserved(name):
            return bang_kind(_lookup(delta, name))
        case TVariant(alts):
            kind = FULL_KIND
            for _, t in alts:
                kind &= max_kind(delta, t)
            return kind
        case TRecord(fields, mode):
            kind = mode_kind(mode)
            for f in fields:
                if not f.taken:
                    kind &= max_kind(delta, f.type)
            return kind
        case TAbstract(_, args, mode):
            kind = mode_kind(mode)
            for t in args:
                kind &= max_kind(delta, t)
            return kind
    return FULL_KIND


def _lookup(delta: KindContext, name: str) -> Kind:
    try:
        return delta[name]
    except KeyError:
        raise UnboundTypeVar(f"type variable '{name}' is not in scope") from None


def kind_check(delta: KindContext, ty: CoreType, kind: Kind) -> bool:
    return kind.issubset(max_kind(delta, ty))


def is_linear(delta: KindContext, ty: CoreType) -> bool:
    return (max_kind(delta, ty) & _BANG_FLOOR) == EMPTY_KIND


def subst_type(ty: CoreType, sigma: TypeSubst, *, complete: bool = False) -> CoreType:
    """Replace type variables per ``sigma``; observed variables receive the banged target.

    With ``complete`` every variable must be in ``sigma``. Unchanged types are returned as is.
    """
    if not sigma and not complete:
        return ty
    result = _subst(ty, sigma, complete)
    return ty if result == ty else result


def _subst(ty: CoreType, sigma: TypeSubst, complete: bool) -> CoreType:
    match ty:
        case TVar(name) | TVarObserved(name):
            if name not in sigma:
                if complete:
                    raise UnboundTypeVar(f"type variable '{name}' has no instantiation")
                return ty
            return sigma[name] if isinstance(ty, TVar) else bang_type(sigma[name])
        case TFun(arg, result):
            return TFun(_subst(arg, sigma, complete), _subst(result, sigma, complete))
        case TVariant(alts):
            return TVariant(tuple((c, _subst(t, sigma, complete)) for c, t in alts))
        case TRecord(fields, mode):
            return TRecord(
                tuple(replace(f, type=_subst(f.type, sigma, complete)) for f in fields), mode
            )
        case TAbstract(name, args, mode):
            return TAbstract(name, tuple(_subst(t, sigma, complete) for t in args), mode)
    return ty


def subst_expr(e: Expr, sigma: TypeSubst) -> Expr:
    """Apply ``sigma`` to the types inside ``e``; untouched nodes keep their identity."""
    if not sigma:
        return e

    def on_type(t: CoreType) -> CoreType:
        return subst_type(t, sigma)

    def go(node: Expr) -> Expr:
        return map_expr(node, go, on_type)

    return go(e)
