"""Syntax-directed typing with algorithmic context splitting and weakening."""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from typing import Any

from cogc.errors import CogcError
from cogc.kinding import (
    KindContext,
    UnboundTypeVar,
    bang_type,
    kind_check,
    max_kind,
    subst_type,
)
from cogc.parser import format_type
from cogc.primops import SIGNATURES, Operands, accepts, result_type
from cogc.syntax import (
    BOOL,
    UNIT,
    U32,
    AbsFunDecl,
    App,
    Case,
    Cast,
    Con,
    CoreType,
    Esac,
    Expr,
    Field,
    FunDef,
    FunRef,
    If,
    Kind,
    Let,
    LetBang,
    Lit,
    Match,
    Member,
    Mode,
    PrimOp,
    PrimType,
    Program,
    Promote,
    Put,
    Span,
    Struct,
    Take,
    TFun,
    TPrim,
    TRecord,
    TVariant,
    UnitE,
    Var,
    children,
    free_vars,
    map_expr,
    walk,
)

logger = logging.getLogger("cogc.typecheck")

# Innermost binding first; names are pairwise distinct.
Context = tuple[tuple[str, CoreType], ...]


# --- Errors ---


class TypeCheckError(CogcError):
    code = "TypeError"


class TypeMismatch(TypeCheckError):
    code = "TypeMismatch"


class ShareViolation(TypeCheckError):
    code = "ShareViolation"


class DiscardViolation(TypeCheckError):
    code = "DiscardViolation"


class EscapeViolation(TypeCheckError):
    code = "EscapeViolation"


class TakenFieldRead(TypeCheckError):
    code = "TakenFieldRead"


class ReadOnlyWrite(TypeCheckError):
    code = "ReadOnlyWrite"


class NonTotalEsac(TypeCheckError):
    code = "NonTotalEsac"


class UnknownConstructor(TypeCheckError):
    code = "UnknownConstructor"


class UnknownField(TypeCheckError):
    code = "UnknownField"


class LiteralOutOfRange(TypeCheckError):
    code = "LiteralOutOfRange"


class ArityError(TypeCheckError):
    code = "ArityError"


class KindMismatch(TypeCheckError):
    code = "KindMismatch"


class UnboundVariable(TypeCheckError):
    code = "UnboundVariable"


class UnknownFunction(TypeCheckError):
    code = "UnknownFunction"


class UnknownOperator(TypeCheckError):
    code = "UnknownOperator"


class RecursionDetected(TypeCheckError):
    code = "RecursionDetected"

    def __init__(self, cycle: list[str], span: Span | None = None) -> None:
        self.cycle = cycle
        super().__init__(f"recursive call cycle: {' -> '.join([*cycle, cycle[0]])}", span)


class ProgramCheckError(CogcError):
    """All errors found while checking a program, keyed by function name."""

    code = "ProgramCheckError"

    def __init__(self, errors: list[tuple[str, CogcError]]) -> None:
        self.errors = errors
        first = errors[0][1]
        super().__init__(f"{len(errors)} error(s); first: {first.message}", first.span)


# --- Typing derivations ---


@dataclass(frozen=True, slots=True)
class TypingTree:
    """One judgement ``gamma |- expr : type`` and the derivations of its premises.

    ``gamma`` is the context handed to the node; the names in ``weakened`` are dropped
    there and ``split`` records which of the remaining names went to each premise.
    """

    rule: str
    expr: Expr
    type: CoreType
    gamma: Context
    children: tuple[TypingTree, ...] = ()
    split: tuple[frozenset[str], ...] = ()
    weakened: Context = ()
    observed: Context = field(default=(), compare=False)

    @property
    def used(self) -> Context:
        dropped = {name for name, _ in self.weakened}
        return tuple(b for b in self.gamma if b[0] not in dropped)

    def iter_nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def to_json(self) -> dict[str, Any]:
        dropped = {name for name, _ in self.weakened}
        span = self.expr.span
        out: dict[str, Any] = {
            "rule": self.rule,
            "span": [span.start, span.end] if span else None,
            "type": format_type(self.type),
            "gamma": [
                [name, format_type(ty), "available" if name in dropped else "used"]
                for name, ty in self.gamma
            ],
        }
        if self.split:
            out["split"] = [sorted(part) for part in self.split]
        out["children"] = [child.to_json() for child in self.children]
        return out


# --- Context operations ---


def weaken_context(
    delta: KindContext, gamma: Context, keep: Iterable[str], span: Span | None = None
) -> Context:
    """Drop bindings outside ``keep``; each dropped type must be discardable."""
    keep = set(keep)
    kept = []
    for name, ty in gamma:
        if name in keep:
            kept.append((name, ty))
        elif not kind_check(delta, ty, Kind.DISCARD):
            raise DiscardViolation(
                f"variable '{name}' of linear type {format_type(ty)} is never used", span
            )
    return tuple(kept)


def split_context(
    delta: KindContext,
    gamma: Context,
    fv1: Iterable[str],
    fv2: Iterable[str],
    span: Span | None = None,
) -> tuple[Context, Context]:
    """Divide ``gamma`` between two premises; shared variables must be shareable."""
    first, second = split_many(delta, gamma, [set(fv1), set(fv2)], span)
    return first, second


def split_many(
    delta: KindContext, gamma: Context, groups: list[set[str]], span: Span | None = None
) -> list[Context]:
    parts: list[list[tuple[str, CoreType]]] = [[] for _ in groups]
    for name, ty in gamma:
        users = [i for i, group in enumerate(groups) if name in group]
        if len(users) > 1 and not kind_check(delta, ty, Kind.SHARE):
            raise ShareViolation(
                f"variable '{name}' of non-shareable type {format_type(ty)} is used more than once",
                span,
            )
        for i in users:
            parts[i].append((name, ty))
    return [tuple(p) for p in parts]


def _lookup(gamma: Context, name: str) -> CoreType | None:
    for n, ty in gamma:
        if n == name:
            return ty
    return None


# --- The checker ---


class TypeChecker:
    """Checks expressions of one program; instantiate once per program."""

    def __init__(self, program: Program) -> None:
        self.program = program
        self._fv: dict[int, tuple[Expr, frozenset[str]]] = {}
        self._span: Span | None = None

    def free_vars(self, e: Expr) -> frozenset[str]:
        hit = self._fv.get(id(e))
        if hit is not None and hit[0] is e:
            return hit[1]
        result = free_vars(e)
        self._fv[id(e)] = (e, result)
        return result

    def check_function(self, fundef: FunDef) -> TypingTree:
        delta = dict(fundef.signature.binders)
        return self.check_body(
            delta, fundef.param, fundef.arg_type, fundef.body, fundef.result_type, fundef.span
        )

    def check_body(
        self,
        delta: KindContext,
        param: str,
        arg_type: CoreType,
        body: Expr,
        result: CoreType,
        span: Span | None = None,
    ) -> TypingTree:
        """Derivation of ``param: arg_type |- body : result``."""
        self._span = span
        return self.check(delta, ((param, arg_type),), body, result)

    def check(
        self, delta: KindContext, gamma: Context, e: Expr, expected: CoreType | None = None
    ) -> TypingTree:
        span = e.span or self._span
        fv = self.free_vars(e)
        for name in sorted(fv):
            if _lookup(gamma, name) is None:
                raise UnboundVariable(f"variable '{name}' is not in scope", span)
        weakened = tuple(b for b in gamma if b[0] not in fv)
        used = weaken_context(delta, gamma, fv, span)
        tree = self._rule(delta, used, e, expected, span)
        if expected is not None and tree.type != expected:
            raise TypeMismatch(
                f"expected {format_type(expected)}, found {format_type(tree.type)}", span
            )
        return replace(tree, gamma=gamma, weakened=weakened)

    def _node(
        self,
        rule: str,
        e: Expr,
        ty: CoreType,
        kids: tuple[TypingTree, ...] = (),
        split: tuple[frozenset[str], ...] = (),
        **extra: Any,
    ) -> TypingTree:
        if kids:
            elaborated = {id(old): kid.expr for old, kid in zip(children(e), kids, strict=True)}
            e = map_expr(e, lambda c: elaborated.get(id(c), c))
        return TypingTree(rule, e, ty, (), kids, split, **extra)

    def _split(
        self, delta: KindContext, gamma: Context, groups: list[frozenset[str]], span: Span | None
    ) -> list[Context]:
        return split_many(delta, gamma, [set(g) for g in groups], span)

    def _rule(
        self,
        delta: KindContext,
        gamma: Context,
        e: Expr,
        expected: CoreType | None,
        span: Span | None,
    ) -> TypingTree:
        match e:
            case Var(name):
                return self._node("Var", e, _lookup(gamma, name))
            case UnitE():
                return self._node("Unit", e, UNIT)
            case Lit():
                return self._literal(e, expected, span)
            case PrimOp():
                return self._primop(delta, gamma, e, expected, span)
            case Cast(target, inner):
                sub = self.check(delta, gamma, inner, _literal_hint(inner, None))
                if not isinstance(sub.type, TPrim):
                    raise TypeMismatch(f"cannot cast {format_type(sub.type)}", span)
                if sub.type.prim.max_value > target.max_value:
                    raise TypeMismatch(
                        f"cast from {sub.type.prim.value} to {target.value} narrows", span
                    )
                return self._node("Cast", e, TPrim(target), (sub,))
            case FunRef():
                return self._funref(delta, e, span)
            case App(fn, arg):
                g1, g2 = self._split(delta, gamma, [self.free_vars(fn), self.free_vars(arg)], span)
                fn_tree = self.check(delta, g1, fn)
                if not isinstance(fn_tree.type, TFun):
                    raise TypeMismatch(f"applying non-function {format_type(fn_tree.type)}", span)
                arg_tree = self.check(delta, g2, arg, fn_tree.type.arg)
                return self._node(
                    "App", e, fn_tree.type.result, (fn_tree, arg_tree), _names(g1, g2)
                )
            case Let(name, bound, body):
                fv2 = self.free_vars(body) - {name}
                g1, g2 = self._split(delta, gamma, [self.free_vars(bound), fv2], span)
                b_tree = self.check(delta, g1, bound)
                body_tree = self.check(delta, ((name, b_tree.type), *g2), body, expected)
                return self._node("Let", e, body_tree.type, (b_tree, body_tree), _names(g1, g2))
            case LetBang():
                return self._letbang(delta, gamma, e, expected, span)
            case If(cond, then, orelse):
                branches = self.free_vars(then) | self.free_vars(orelse)
                g1, g2 = self._split(delta, gamma, [self.free_vars(cond), branches], span)
                c_tree = self.check(delta, g1, cond, BOOL)
                t_tree = self.check(delta, g2, then, expected)
                f_tree = self.check(delta, g2, orelse, t_tree.type)
                return self._node("If", e, t_tree.type, (c_tree, t_tree, f_tree), _names(g1, g2))
            case Case(scrut, ctor, bound, match_body, else_name, else_body):
                branches = (self.free_vars(match_body) - {bound}) | (
                    self.free_vars(else_body) - {else_name}
                )
                g1, g2 = self._split(delta, gamma, [self.free_vars(scrut), branches], span)
                s_tree = self.check(delta, g1, scrut)
                variant = s_tree.type
                if not isinstance(variant, TVariant):
                    raise TypeMismatch(f"case on non-variant {format_type(variant)}", span)
                payload = variant.get(ctor)
                if payload is None:
                    raise UnknownConstructor(
                        f"constructor '{ctor}' not in {format_type(variant)}", span
                    )
                m_ctx = _bind(delta, g2, bound, payload, span)
                m_tree = self.check(delta, m_ctx, match_body, expected)
                o_ctx = _bind(delta, g2, else_name, variant.without(ctor), span)
                o_tree = self.check(delta, o_ctx, else_body, m_tree.type)
                return self._node("Case", e, m_tree.type, (s_tree, m_tree, o_tree), _names(g1, g2))
            case Esac(inner):
                sub = self.check(delta, gamma, inner)
                if not isinstance(sub.type, TVariant):
                    raise TypeMismatch(f"esac on non-variant {format_type(sub.type)}", span)
                if len(sub.type.alts) != 1:
                    raise NonTotalEsac(
                        f"esac needs exactly one remaining alternative, found "
                        f"{format_type(sub.type)}",
                        span,
                    )
                return self._node("Esac", e, sub.type.alts[0][1], (sub,))
            case Con(ctor, inner):
                hint = expected.get(ctor) if isinstance(expected, TVariant) else None
                sub = self.check(delta, gamma, inner, _literal_hint(inner, hint))
                return self._node("Cons", e, TVariant(((ctor, sub.type),)), (sub,))
            case Promote(target, inner):
                hint = None
                if isinstance(inner, Con) and target.get(inner.ctor) is not None:
                    hint = TVariant(((inner.ctor, target.get(inner.ctor)),))
                sub = self.check(delta, gamma, inner, hint)
                if not isinstance(sub.type, TVariant):
                    raise TypeMismatch(f"promote of non-variant {format_type(sub.type)}", span)
                for ctor, ty in sub.type.alts:
                    if target.get(ctor) != ty:
                        raise TypeMismatch(
                            f"cannot promote {format_type(sub.type)} to {format_type(target)}",
                            span,
                        )
                return self._node("Prom", e, target, (sub,))
            case Struct(fields):
                return self._struct(delta, gamma, e, expected, span)
            case Member(inner, fname):
                sub = self.check(delta, gamma, inner)
                rec = _record(sub.type, span)
                f = _present_field(rec, fname, span)
                if not kind_check(delta, rec, Kind.SHARE):
                    raise ShareViolation(
                        f"member access needs a shareable record, found {format_type(rec)}", span
                    )
                return self._node("Member", e, f.type, (sub,))
            case Take():
                return self._take(delta, gamma, e, expected, span)
            case Put(record, fname, value):
                fvs = [self.free_vars(record), self.free_vars(value)]
                g1, g2 = self._split(delta, gamma, fvs, span)
                r_tree = self.check(delta, g1, record)
                rec = _writable_record(r_tree.type, span)
                f = rec.field(fname)
                if f is None:
                    raise UnknownField(f"no field '{fname}' in {format_type(rec)}", span)
                v_tree = self.check(delta, g2, value, f.type)
                if f.taken:
                    rule, result = "Put1", rec.with_taken(fname, False)
                elif kind_check(delta, f.type, Kind.DISCARD):
                    rule, result = "Put2", rec
                else:
                    raise DiscardViolation(
                        f"put would overwrite present linear field '{fname}'", span
                    )
                return self._node(rule, e, result, (r_tree, v_tree), _names(g1, g2))
            case Match():
                raise TypeMismatch("match must be desugared before type checking", span)
        raise TypeMismatch(f"unsupported expression {type(e).__name__}", span)

    def _literal(self, e: Lit, expected: CoreType | None, span: Span | None) -> TypingTree:
        if isinstance(e.value, bool):
            return self._node("Literal", e, BOOL)
        prim = e.prim
        if prim is None:
            if isinstance(expected, TPrim) and expected.prim.is_word:
                prim = expected.prim
            else:
                prim = PrimType.U32
        if prim is PrimType.BOOL:
            raise TypeMismatch("integer literal used at type bool", span)
        if e.value >= prim.max_value:
            raise LiteralOutOfRange(f"literal {e.value} does not fit in {prim.value}", span)
        elaborated = e if e.prim is prim else replace(e, prim=prim)
        return TypingTree("Literal", elaborated, TPrim(prim), ())

    def _primop(
        self,
        delta: KindContext,
        gamma: Context,
        e: PrimOp,
        expected: CoreType | None,
        span: Span | None,
    ) -> TypingTree:
        sig = SIGNATURES.get(e.op)
        if sig is None:
            raise UnknownOperator(f"unknown operator '{e.op}'", span)
        if len(e.args) != sig.arity:
            raise ArityError(f"'{e.op}' takes {sig.arity} operand(s), got {len(e.args)}", span)
        parts = self._split(delta, gamma, [self.free_vars(a) for a in e.args], span)
        # Operands that are not bare literals fix the operand type; literals follow it.
        trees: dict[int, TypingTree] = {}
        operand: CoreType | None = None
        if sig.operands is Operands.BOOL:
            operand = BOOL
        elif sig.result is None and isinstance(expected, TPrim):
            operand = expected
        for i, arg in enumerate(e.args):
            if operand is None and not _bare_literal(arg):
                trees[i] = self.check(delta, parts[i], arg)
                operand = trees[i].type
        if operand is None:
            operand = U32
        for i, arg in enumerate(e.args):
            if i not in trees:
                trees[i] = self.check(delta, parts[i], arg, operand)
            elif trees[i].type != operand:
                raise TypeMismatch(
                    f"operands of '{e.op}' differ: {format_type(operand)} and "
                    f"{format_type(trees[i].type)}",
                    span,
                )
        if not isinstance(operand, TPrim) or not accepts(sig, operand.prim):
            raise TypeMismatch(f"'{e.op}' does not apply to {format_type(operand)}", span)
        kids = tuple(trees[i] for i in range(len(e.args)))
        return self._node(
            "PrimOp",
            e,
            TPrim(result_type(sig, operand.prim)),
            kids,
            tuple(frozenset(n for n, _ in p) for p in parts),
        )

    def _funref(self, delta: KindContext, e: FunRef, span: Span | None) -> TypingTree:
        d = self.program.lookup(e.name)
        if d is None:
            raise UnknownFunction(f"no function named '{e.name}'", span)
        binders = d.signature.binders
        if len(binders) != len(e.type_args):
            raise ArityError(
                f"'{e.name}' expects {len(binders)} type argument(s), got {len(e.type_args)}",
                span,
            )
        for (name, kind), arg in zip(binders, e.type_args, strict=True):
            try:
                ok = kind_check(delta, arg, kind)
            except UnboundTypeVar as exc:
                raise UnboundTypeVar(exc.message, span) from None
            if not ok:
                raise KindMismatch(
                    f"type argument {format_type(arg)} for '{name}' lacks kind "
                    f"{{{kind.letters()}}} (has {{{max_kind(delta, arg).letters()}}})",
                    span,
                )
        sigma = {name: arg for (name, _), arg in zip(binders, e.type_args, strict=True)}
        return self._node("Fun", e, subst_type(d.signature.body, sigma))

    def _letbang(
        self,
        delta: KindContext,
        gamma: Context,
        e: LetBang,
        expected: CoreType | None,
        span: Span | None,
    ) -> TypingTree:
        observed = set(e.observed)
        originals = tuple(b for b in gamma if b[0] in observed)
        rest = tuple(b for b in gamma if b[0] not in observed)
        fv1 = self.free_vars(e.bound) - observed
        fv2 = self.free_vars(e.body) - {e.name} - observed
        g1, g2 = self._split(delta, rest, [fv1, fv2], span)
        banged = tuple((name, bang_type(ty)) for name, ty in originals)
        b_tree = self.check(delta, (*banged, *g1), e.bound)
        if not kind_check(delta, b_tree.type, Kind.ESCAPE):
            raise EscapeViolation(
                f"let! result {format_type(b_tree.type)} may not escape its observation", span
            )
        restored = tuple(b for b in originals if b[0] != e.name)
        if len(restored) != len(originals):
            weaken_context(delta, originals, [n for n, _ in restored], span)
        body_tree = self.check(delta, ((e.name, b_tree.type), *restored, *g2), e.body, expected)
        return self._node(
            "LetBang", e, body_tree.type, (b_tree, body_tree), _names(g1, g2), observed=originals
        )

    def _struct(
        self,
        delta: KindContext,
        gamma: Context,
        e: Struct,
        expected: CoreType | None,
        span: Span | None,
    ) -> TypingTree:
        parts = self._split(delta, gamma, [self.free_vars(x) for _, x in e.fields], span)
        hints: dict[str, CoreType] = {}
        if isinstance(expected, TRecord) and expected.mode is Mode.UNBOXED:
            hints = {f.name: f.type for f in expected.fields}
        kids = tuple(
            self.check(delta, part, x, _literal_hint(x, hints.get(name)))
            for (name, x), part in zip(e.fields, parts, strict=True)
        )
        fields = tuple(Field(name, kid.type) for (name, _), kid in zip(e.fields, kids, strict=True))
        return self._node(
            "Struct",
            e,
            TRecord(fields, Mode.UNBOXED),
            kids,
            tuple(frozenset(n for n, _ in p) for p in parts),
        )

    def _take(
        self,
        delta: KindContext,
        gamma: Context,
        e: Take,
        expected: CoreType | None,
        span: Span | None,
    ) -> TypingTree:
        if e.record_name == e.field_name:
            raise TypeMismatch(f"take binds '{e.record_name}' twice", span)
        fv2 = self.free_vars(e.body) - {e.record_name, e.field_name}
        g1, g2 = self._split(delta, gamma, [self.free_vars(e.record), fv2], span)
        r_tree = self.check(delta, g1, e.record)
        rec = _writable_record(r_tree.type, span)
        f = _present_field(rec, e.field, span)
        if kind_check(delta, f.type, Kind.SHARE):
            rule, remaining = "Take2", rec
        else:
            rule, remaining = "Take1", rec.with_taken(e.field, True)
        inner = ((e.field_name, f.type), (e.record_name, remaining), *g2)
        body_tree = self.check(delta, inner, e.body, expected)
        return self._node(rule, e, body_tree.type, (r_tree, body_tree), _names(g1, g2))


def _bind(
    delta: KindContext, gamma: Context, name: str, ty: CoreType, span: Span | None
) -> Context:
    """Push ``name: ty``, weakening any binding it shadows."""
    rest = weaken_context(delta, gamma, [n for n, _ in gamma if n != name], span)
    return ((name, ty), *rest)


def _names(*parts: Context) -> tuple[frozenset[str], ...]:
    return tuple(frozenset(n for n, _ in p) for p in parts)


def _bare_literal(e: Expr) -> bool:
    return isinstance(e, Lit) and e.prim is None and not isinstance(e.value, bool)


def _literal_hint(e: Expr, hint: CoreType | None) -> CoreType | None:
    """Expected type to pass down; only literals and constructors benefit from one."""
    if isinstance(e, Lit | Con | Struct | Promote):
        return hint
    return None


def _record(ty: CoreType, span: Span | None) -> TRecord:
    if not isinstance(ty, TRecord):
        raise TypeMismatch(f"expected a record, found {format_type(ty)}", span)
    return ty


def _writable_record(ty: CoreType, span: Span | None) -> TRecord:
    rec = _record(ty, span)
    if rec.mode is Mode.READ_ONLY:
        raise ReadOnlyWrite(f"cannot modify read-only record {format_type(rec)}", span)
    return rec


def _present_field(rec: TRecord, name: str, span: Span | None) -> Field:
    f = rec.field(name)
    if f is None:
        raise UnknownField(f"no field '{name}' in {format_type(rec)}", span)
    if f.taken:
        raise TakenFieldRead(f"field '{name}' has already been taken", span)
    return f


# --- Programs ---


def call_graph(program: Program) -> dict[str, list[str]]:
    graph: dict[str, list[str]] = {}
    for d in program.fundefs():
        callees: list[str] = []
        for node in walk(d.body):
            if isinstance(node, FunRef) and node.name not in callees:
                callees.append(node.name)
        graph[d.name] = callees
    return graph


def find_cycle(graph: dict[str, list[str]]) -> list[str] | None:
    """First call cycle found by depth-first search in definition order."""
    state: dict[str, int] = {}
    path: list[str] = []

    def visit(name: str) -> list[str] | None:
        state[name] = 1
        path.append(name)
        for callee in graph.get(name, ()):
            if state.get(callee) == 1:
                return path[path.index(callee):]
            if callee not in state and (cycle := visit(callee)) is not None:
                return cycle
        path.pop()
        state[name] = 2
        return None

    for name in graph:
        if name not in state and (cycle := visit(name)) is not None:
            return cycle
    return None


def check_expr(
    program: Program, delta: KindContext, gamma: Context, e: Expr, expected: CoreType | None = None
) -> tuple[CoreType, TypingTree]:
    tree = TypeChecker(program).check(delta, gamma, e, expected)
    return tree.type, tree


def check_program(program: Program) -> dict[str, TypingTree]:
    """Type-check every function; raises ProgramCheckError listing every failure."""
    checker = TypeChecker(program)
    errors: list[tuple[str, CogcError]] = []
    trees: dict[str, TypingTree] = {}
    cycle = find_cycle(call_graph(program))
    if cycle is not None:
        first = program.lookup(cycle[0])
        errors.append((cycle[0], RecursionDetected(cycle, first.span if first else None)))
    for d in program.defs:
        if isinstance(d, AbsFunDecl):
            continue
        try:
            trees[d.name] = checker.check_function(d)
        except CogcError as exc:
            errors.append((d.name, exc))
    if errors:
        raise ProgramCheckError(errors)
    logger.debug("checked %d function(s)", len(trees))
    return trees


def elaborate(program: Program, trees: dict[str, TypingTree]) -> Program:
    """Program with every literal annotated with the type its derivation assigned."""
    defs = []
    for d in program.defs:
        tree = trees.get(d.name)
        if isinstance(d, FunDef) and tree is not None and tree.expr is not d.body:
            d = replace(d, body=tree.expr)
        defs.append(d)
    return Program(tuple(defs))
