"""Multi-way match desugaring into nested binary case chains."""

from __future__ import annotations

import logging
from dataclasses import replace

from cogc.passes.base import NameSupply, PassError
from cogc.syntax import Case, Esac, Expr, FunDef, Let, Match, Program, Var, bound_names, map_expr

logger = logging.getLogger("cogc.passes")


class DuplicateArm(PassError):
    code = "DuplicateArm"


class EmptyMatch(PassError):
    code = "EmptyMatch"


def desugar_match(e: Expr, names: NameSupply | None = None) -> Expr:
    """Replace every ``match`` in ``e``.

    ``match x (A a e1) (B b e2) (C c e3)`` becomes
    ``case x A a e1 x' (case x' B b e2 x'' (let c (esac x'') e3))``.
    """
    if names is None:
        names = NameSupply(bound_names(e))

    def go(node: Expr) -> Expr:
        if isinstance(node, Match):
            return _desugar_one(node, go, names)
        return map_expr(node, go)

    return go(e)


def _desugar_one(m: Match, go, names: NameSupply) -> Expr:
    if not m.arms:
        raise EmptyMatch("match needs at least one arm", m.span)
    seen: set[str] = set()
    for arm in m.arms:
        if arm.ctor in seen:
            raise DuplicateArm(f"constructor '{arm.ctor}' matched twice", arm.span)
        seen.add(arm.ctor)

    scrutinee = go(m.scrutinee)
    if isinstance(scrutinee, Var):
        return _chain(scrutinee.name, m, go, names)
    # bind a compound scrutinee once so the chain can refer to it by name
    tmp = names.primed("v")
    return Let(tmp, scrutinee, _chain(tmp, m, go, names), span=m.span)


def _chain(subject: str, m: Match, go, names: NameSupply) -> Expr:
    arms = m.arms
    last = arms[-1]
    # innermost first: the final arm takes whatever alternative remains
    subjects = [subject]
    for _ in arms[:-1]:
        subjects.append(names.primed(subjects[-1]))
    remaining = Esac(Var(subjects[-1], span=m.span), span=m.span)
    result: Expr = Let(last.name, remaining, go(last.body), span=last.span)
    for i in range(len(arms) - 2, -1, -1):
        arm = arms[i]
        result = Case(
            Var(subjects[i], span=m.span),
            arm.ctor,
            arm.name,
            go(arm.body),
            subjects[i + 1],
            result,
            span=arm.span,
        )
    return result


def desugar_program(program: Program) -> Program:
    names = NameSupply.for_program(program)
    defs = []
    for d in program.defs:
        if isinstance(d, FunDef):
            body = desugar_match(d.body, names)
            if body is not d.body:
                d = replace(d, body=body)
        defs.append(d)
    logger.debug("desugar: %d fresh name(s)", names.issued)
    return Program(tuple(defs))
