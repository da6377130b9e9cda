"""A-normalisation: operands become atoms, compound subterms are let-bound in order."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import replace

from cogc.passes.base import NameSupply, PassError
from cogc.syntax import (
    App,
    Case,
    Cast,
    Con,
    Esac,
    Expr,
    FunDef,
    FunRef,
    If,
    Let,
    LetBang,
    Lit,
    Match,
    Member,
    PrimOp,
    Program,
    Promote,
    Put,
    Struct,
    Take,
    UnitE,
    Var,
)

logger = logging.getLogger("cogc.passes")


def is_atom(e: Expr) -> bool:
    return isinstance(e, Var | Lit | UnitE | FunRef)


class _Normaliser:
    def __init__(self, names: NameSupply) -> None:
        self.names = names

    def expr(self, e: Expr) -> Expr:
        match e:
            case Var() | Lit() | UnitE() | FunRef():
                return e
            case Let(_, bound, body) | LetBang(_, _, bound, body):
                return replace(e, bound=self.expr(bound), body=self.expr(body))
            case If(cond, then, orelse):
                return self.atomise(
                    [cond],
                    lambda a: replace(e, cond=a[0], then=self.expr(then), orelse=self.expr(orelse)),
                )
            case Case(scrut, _, _, match_body, _, else_body):
                return self.atomise(
                    [scrut],
                    lambda a: replace(
                        e,
                        scrutinee=a[0],
                        match_body=self.expr(match_body),
                        else_body=self.expr(else_body),
                    ),
                )
            case Take(_, _, _, record, body):
                return self.atomise(
                    [record], lambda a: replace(e, record=a[0], body=self.expr(body))
                )
            case PrimOp(_, args):
                return self.atomise(list(args), lambda a: replace(e, args=tuple(a)))
            case App(fn, arg):
                return self.atomise([fn, arg], lambda a: replace(e, fn=a[0], arg=a[1]))
            case Cast(_, x) | Promote(_, x) | Esac(x) | Con(_, x) | Member(x, _):
                return self.atomise([x], lambda a: replace(e, expr=a[0]))
            case Struct(fields):
                names = [name for name, _ in fields]
                return self.atomise(
                    [x for _, x in fields],
                    lambda a: replace(e, fields=tuple(zip(names, a, strict=True))),
                )
            case Put(record, _, value):
                return self.atomise([record, value], lambda a: replace(e, record=a[0], value=a[1]))
            case Match():
                raise PassError("match must be desugared before A-normalisation", e.span)
        raise PassError(f"unexpected expression {type(e).__name__}", e.span)

    def atomise(self, operands: list[Expr], build: Callable[[list[Expr]], Expr]) -> Expr:
        """Let-bind each compound operand left to right, then build from the atoms."""
        bindings: list[tuple[str, Expr]] = []
        atoms: list[Expr] = []
        for operand in operands:
            if is_atom(operand):
                atoms.append(operand)
                continue
            name = self.names.temp()
            bindings.append((name, self.expr(operand)))
            atoms.append(Var(name, span=operand.span))
        result = build(atoms)
        for name, bound in reversed(bindings):
            result = Let(name, bound, result, span=bound.span)
        return result


def a_normalise(program: Program) -> Program:
    """A-normal form of every function body.

    Literals are expected to be annotated (see ``elaborate``); a bound literal-bearing
    subterm is typed on its own once it is let-bound.
    """
    names = NameSupply.for_program(program)
    normaliser = _Normaliser(names)
    defs = []
    for d in program.defs:
        if isinstance(d, FunDef):
            d = replace(d, body=normaliser.expr(d.body))
        defs.append(d)
    logger.debug("anf: introduced %d temporary binding(s)", names.issued)
    return Program(tuple(defs))


def is_anf(e: Expr) -> bool:
    """Whether every operand position of ``e`` holds an atom."""
    match e:
        case Var() | Lit() | UnitE() | FunRef():
            return True
        case Let(_, bound, body) | LetBang(_, _, bound, body):
            return is_anf(bound) and is_anf(body)
        case If(cond, then, orelse):
            return is_atom(cond) and is_anf(then) and is_anf(orelse)
        case Case(scrut, _, _, match_body, _, else_body):
            return is_atom(scrut) and is_anf(match_body) and is_anf(else_body)
        case Take(_, _, _, record, body):
            return is_atom(record) and is_anf(body)
        case PrimOp(_, args):
            return all(is_atom(a) for a in args)
        case App(fn, arg):
            return is_atom(fn) and is_atom(arg)
        case Cast(_, x) | Promote(_, x) | Esac(x) | Con(_, x) | Member(x, _):
            return is_atom(x)
        case Struct(fields):
            return all(is_atom(x) for _, x in fields)
        case Put(record, _, value):
            return is_atom(record) and is_atom(value)
    return False
