"""Concrete s-expression syntax: parsing to the core AST and pretty-printing back."""

from __future__ import annotations

from dataclasses import dataclass

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from cogc.errors import CogcError
from cogc.syntax import (
    UNIT,
    AbsFunDecl,
    App,
    Case,
    Cast,
    Con,
    CoreType,
    Def,
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
    MatchArm,
    Member,
    Mode,
    PolyType,
    PrimOp,
    PrimType,
    Program,
    Promote,
    Put,
    Span,
    Struct,
    TAbstract,
    Take,
    TFun,
    TPrim,
    TRecord,
    TUnit,
    TVar,
    TVariant,
    TVarObserved,
    UnitE,
    Var,
    type_vars,
    walk,
)


class ParseError(CogcError):
    code = "ParseError"

    def __init__(
        self, message: str, span: Span | None = None, expected: frozenset[str] = frozenset()
    ) -> None:
        self.expected = expected
        super().__init__(message, span)


class UnboundTypeVariable(CogcError):
    code = "UnboundTypeVariable"


_GRAMMAR = r"""
start: _sexp*
_sexp: slist | satom
slist: LPAR _sexp* RPAR
satom: INT | SYMBOL

LPAR: "("
RPAR: ")"
INT: /[0-9]+/
SYMBOL: /[A-Za-z_!<>=+\-*\/%&|^~'][A-Za-z0-9_!<>=+\-*\/%&|^~']*/
COMMENT: /;[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_LARK = Lark(_GRAMMAR, parser="lalr")


# --- Generic s-expressions ---


@dataclass(frozen=True, slots=True)
class SAtom:
    text: str
    is_int: bool
    span: Span


@dataclass(frozen=True, slots=True)
class SList:
    items: tuple[SAtom | SList, ...]
    span: Span


SExp = SAtom | SList


def _token_span(tok: Token, end: Token | None = None) -> Span:
    last = end or tok
    return Span(tok.start_pos, last.end_pos, tok.line, tok.column)


class _SexpBuilder(Transformer):
    def start(self, items: list[SExp]) -> list[SExp]:
        return items

    def slist(self, items: list) -> SList:
        lpar, *inner, rpar = items
        return SList(tuple(inner), _token_span(lpar, rpar))

    def satom(self, items: list[Token]) -> SAtom:
        tok = items[0]
        return SAtom(str(tok), tok.type == "INT", _token_span(tok))


def read_sexps(text: str) -> list[SExp]:
    """Tokenise and bracket-match ``text`` into generic s-expressions."""
    try:
        tree = _LARK.parse(text)
    except UnexpectedInput as exc:
        raise _lark_error(exc) from None
    return _SexpBuilder().transform(tree)


def _lark_error(exc: UnexpectedInput) -> ParseError:
    span = Span(exc.pos_in_stream or 0, exc.pos_in_stream or 0, exc.line, exc.column)
    if isinstance(exc, UnexpectedCharacters):
        expected = frozenset(exc.allowed or ())
        return ParseError(f"unexpected character {exc.char!r}", span, expected)
    if isinstance(exc, UnexpectedEOF):
        return ParseError("unexpected end of input", span, frozenset(exc.expected))
    if isinstance(exc, UnexpectedToken):
        return ParseError(f"unexpected token {exc.token!r}", span, frozenset(exc.expected))
    return ParseError(str(exc), span)


# --- S-expressions to AST ---

_PRIMS = {alias: p for p in PrimType for alias in (p.value, p.value.upper(), p.value.capitalize())}
_MODES = {m.value: m for m in Mode}
_EXPR_KEYWORDS = frozenset(
    """
    funref op app let letbang if cast promote con case esac struct member put take match lit
    tuple
    """.split()
)
_RESERVED_ATOMS = frozenset({"unit", "true", "false"})


def _fail(sexp: SExp, message: str, *expected: str) -> ParseError:
    return ParseError(message, sexp.span, frozenset(expected))


def _head(sexp: SExp) -> str | None:
    if isinstance(sexp, SList) and sexp.items and isinstance(sexp.items[0], SAtom):
        return sexp.items[0].text
    return None


def _name(sexp: SExp, what: str = "NAME") -> str:
    if not isinstance(sexp, SAtom) or sexp.is_int or sexp.text in _RESERVED_ATOMS:
        raise _fail(sexp, f"expected {what}", what)
    return sexp.text


def _list(sexp: SExp, what: str) -> tuple[SExp, ...]:
    if not isinstance(sexp, SList):
        raise _fail(sexp, f"expected {what}", what)
    return sexp.items


def _form(sexp: SList, arity: int, shape: str) -> tuple[SExp, ...]:
    """Arguments of ``(head arg...)`` with an exact arity check."""
    args = sexp.items[1:]
    if len(args) != arity:
        raise _fail(sexp, f"malformed form, expected {shape}", shape)
    return args


def parse_type(sexp: SExp) -> CoreType:
    if isinstance(sexp, SAtom):
        if sexp.text in ("unit", "Unit"):
            return UNIT
        if sexp.text in _PRIMS:
            return TPrim(_PRIMS[sexp.text])
        return TVar(_name(sexp, "type"))
    head = _head(sexp)
    args = sexp.items[1:]
    match head:
        case "!":
            (name,) = _form(sexp, 1, "(! NAME)")
            return TVarObserved(_name(name))
        case "fun":
            arg, result = _form(sexp, 2, "(fun type type)")
            return TFun(parse_type(arg), parse_type(result))
        case "variant":
            alts = []
            for alt in args:
                parts = _list(alt, "(CTOR type)")
                if len(parts) != 2:
                    raise _fail(alt, "expected (CTOR type)", "(CTOR type)")
                alts.append((_name(parts[0], "CTOR"), parse_type(parts[1])))
            return _checked(sexp, lambda: TVariant(tuple(alts)))
        case "rec":
            if not args:
                raise _fail(sexp, "expected record mode", "ro", "wr", "ub")
            mode = _mode(args[0])
            fields = [_record_field(f) for f in args[1:]]
            return _checked(sexp, lambda: TRecord(tuple(fields), mode))
        case "abs":
            if len(args) < 2:
                raise _fail(sexp, "expected (abs NAME mode type*)", "(abs NAME mode type*)")
            return TAbstract(_name(args[0]), tuple(parse_type(t) for t in args[2:]), _mode(args[1]))
        case "tuple":
            fields = [Field(f"p{i}", parse_type(t)) for i, t in enumerate(args, start=1)]
            return TRecord(tuple(fields), Mode.UNBOXED)
    raise _fail(sexp, "expected a type", "unit", "u8", "(fun ...)", "(variant ...)", "(rec ...)")


def _checked(sexp: SExp, build):
    try:
        return build()
    except ValueError as exc:
        raise _fail(sexp, str(exc)) from None


def _mode(sexp: SExp) -> Mode:
    if isinstance(sexp, SAtom) and sexp.text in _MODES:
        return _MODES[sexp.text]
    raise _fail(sexp, "expected a mode", *_MODES)


def _record_field(sexp: SExp) -> Field:
    parts = _list(sexp, "(FIELD type [taken])")
    if len(parts) == 3 and isinstance(parts[2], SAtom) and parts[2].text == "taken":
        return Field(_name(parts[0], "FIELD"), parse_type(parts[1]), taken=True)
    if len(parts) != 2:
        raise _fail(sexp, "expected (FIELD type [taken])", "(FIELD type [taken])")
    return Field(_name(parts[0], "FIELD"), parse_type(parts[1]))


def _prim(sexp: SExp) -> PrimType:
    ty = parse_type(sexp)
    if not isinstance(ty, TPrim):
        raise _fail(sexp, "expected a primitive type", *_PRIMS)
    return ty.prim


def _int(sexp: SExp) -> int:
    if not isinstance(sexp, SAtom) or not sexp.is_int:
        raise _fail(sexp, "expected an integer literal", "INT")
    return int(sexp.text)


def parse_expr(sexp: SExp) -> Expr:
    span = sexp.span
    if isinstance(sexp, SAtom):
        if sexp.is_int:
            return Lit(int(sexp.text), span=span)
        if sexp.text == "unit":
            return UnitE(span=span)
        if sexp.text in ("true", "false"):
            return Lit(sexp.text == "true", PrimType.BOOL, span=span)
        return Var(_name(sexp), span=span)
    head = _head(sexp)
    if head not in _EXPR_KEYWORDS:
        raise _fail(sexp, "expected an expression form", *sorted(_EXPR_KEYWORDS))
    args = sexp.items[1:]
    match head:
        case "funref":
            if not args:
                raise _fail(sexp, "expected (funref NAME type*)", "(funref NAME type*)")
            return FunRef(_name(args[0]), tuple(parse_type(t) for t in args[1:]), span=span)
        case "op":
            if len(args) < 2:
                raise _fail(sexp, "expected (op OPNAME expr+)", "(op OPNAME expr+)")
            operands = tuple(parse_expr(a) for a in args[1:])
            return PrimOp(_name(args[0], "OPNAME"), operands, span=span)
        case "app":
            fn, arg = _form(sexp, 2, "(app expr expr)")
            return App(parse_expr(fn), parse_expr(arg), span=span)
        case "let":
            name, bound, body = _form(sexp, 3, "(let NAME expr expr)")
            return Let(_name(name), parse_expr(bound), parse_expr(body), span=span)
        case "letbang":
            observed, name, bound, body = _form(sexp, 4, "(letbang (NAME*) NAME expr expr)")
            ys = tuple(_name(y) for y in _list(observed, "(NAME*)"))
            return LetBang(ys, _name(name), parse_expr(bound), parse_expr(body), span=span)
        case "if":
            c, t, f = _form(sexp, 3, "(if expr expr expr)")
            return If(parse_expr(c), parse_expr(t), parse_expr(f), span=span)
        case "lit":
            ty, value = _form(sexp, 2, "(lit type INT)")
            prim = _prim(ty)
            if isinstance(value, SAtom) and value.text in ("true", "false"):
                return Lit(value.text == "true", prim, span=span)
            return Lit(_int(value), prim, span=span)
        case "cast":
            ty, inner = _form(sexp, 2, "(cast type expr)")
            return Cast(_prim(ty), parse_expr(inner), span=span)
        case "promote":
            alts, inner = _form(sexp, 2, "(promote ((CTOR type)+) expr)")
            target = parse_type(SList((SAtom("variant", False, span), *_list(alts, "alts")), span))
            return Promote(target, parse_expr(inner), span=span)
        case "con":
            ctor, inner = _form(sexp, 2, "(con CTOR expr)")
            return Con(_name(ctor, "CTOR"), parse_expr(inner), span=span)
        case "case":
            s, ctor, x, m, y, o = _form(sexp, 6, "(case expr CTOR NAME expr NAME expr)")
            return Case(
                parse_expr(s),
                _name(ctor, "CTOR"),
                _name(x),
                parse_expr(m),
                _name(y),
                parse_expr(o),
                span=span,
            )
        case "esac":
            (inner,) = _form(sexp, 1, "(esac expr)")
            return Esac(parse_expr(inner), span=span)
        case "struct":
            fields = []
            for item in args:
                parts = _list(item, "(FIELD expr)")
                if len(parts) != 2:
                    raise _fail(item, "expected (FIELD expr)", "(FIELD expr)")
                fields.append((_name(parts[0], "FIELD"), parse_expr(parts[1])))
            names = [n for n, _ in fields]
            if len(set(names)) != len(names):
                raise _fail(sexp, f"duplicate field in struct: {names}")
            return Struct(tuple(fields), span=span)
        case "tuple":
            if len(args) < 2:
                raise _fail(sexp, "expected (tuple expr expr+)", "(tuple expr expr+)")
            items = tuple((f"p{i}", parse_expr(a)) for i, a in enumerate(args, start=1))
            return Struct(items, span=span)
        case "member":
            inner, f = _form(sexp, 2, "(member expr FIELD)")
            return Member(parse_expr(inner), _name(f, "FIELD"), span=span)
        case "put":
            r, f, v = _form(sexp, 3, "(put expr FIELD expr)")
            return Put(parse_expr(r), _name(f, "FIELD"), parse_expr(v), span=span)
        case "take":
            x, f, y, r, b = _form(sexp, 5, "(take NAME FIELD NAME expr expr)")
            return Take(
                _name(x), _name(f, "FIELD"), _name(y), parse_expr(r), parse_expr(b), span=span
            )
        case "match":
            if len(args) < 2:
                raise _fail(sexp, "expected (match expr (CTOR NAME expr)+)", "(CTOR NAME expr)")
            arms = []
            for arm in args[1:]:
                parts = _list(arm, "(CTOR NAME expr)")
                if len(parts) != 3:
                    raise _fail(arm, "expected (CTOR NAME expr)", "(CTOR NAME expr)")
                arms.append(
                    MatchArm(
                        _name(parts[0], "CTOR"),
                        _name(parts[1]),
                        parse_expr(parts[2]),
                        span=arm.span,
                    )
                )
            return Match(parse_expr(args[0]), tuple(arms), span=span)
    raise AssertionError(head)


def _poly_binders(sexp: SExp) -> tuple[tuple[str, Kind], ...]:
    if _head(sexp) != "forall":
        raise _fail(sexp, "expected (forall binder*)", "(forall binder*)")
    binders = []
    for binder in sexp.items[1:]:
        parts = _list(binder, "(NAME kind)")
        if len(parts) != 2:
            raise _fail(binder, "expected (NAME kind)", "(NAME kind)")
        letters = []
        for letter in _list(parts[1], "kind"):
            if not isinstance(letter, SAtom) or letter.text not in ("D", "S", "E"):
                raise _fail(letter, "expected a permission", "D", "S", "E")
            letters.append(letter.text)
        binders.append((_name(parts[0]), Kind.parse("".join(letters))))
    names = [n for n, _ in binders]
    if len(set(names)) != len(names):
        raise _fail(sexp, f"duplicate type binder: {names}")
    return tuple(binders)


def parse_definition(sexp: SExp) -> Def:
    head = _head(sexp)
    if head == "def":
        name, poly, fnbody = _form(sexp, 3, "(def NAME poly fnbody)")
        binders = _poly_binders(poly)
        if _head(fnbody) != "fn":
            raise _fail(fnbody, "expected (fn (NAME type) type expr)", "(fn ...)")
        param, result, body = _form(fnbody, 3, "(fn (NAME type) type expr)")
        param_parts = _list(param, "(NAME type)")
        if len(param_parts) != 2:
            raise _fail(param, "expected (NAME type)", "(NAME type)")
        signature = PolyType(binders, TFun(parse_type(param_parts[1]), parse_type(result)))
        fundef = FunDef(
            _name(name), signature, _name(param_parts[0]), parse_expr(body), span=sexp.span
        )
        _check_bound(fundef)
        return fundef
    if head == "absdef":
        args = sexp.items[1:]
        if len(args) not in (3, 4):
            raise _fail(sexp, "expected (absdef NAME poly type [(of NAME type*)])", "(absdef ...)")
        fn_type = parse_type(args[2])
        if not isinstance(fn_type, TFun):
            raise _fail(args[2], "abstract function type must be (fun type type)", "(fun ...)")
        origin = None
        if len(args) == 4:
            if _head(args[3]) != "of" or len(_list(args[3], "(of NAME type*)")) < 2:
                raise _fail(args[3], "expected (of NAME type*)", "(of NAME type*)")
            of_items = args[3].items
            origin = (_name(of_items[1]), tuple(parse_type(t) for t in of_items[2:]))
        decl = AbsFunDecl(
            _name(args[0]), PolyType(_poly_binders(args[1]), fn_type), origin, span=sexp.span
        )
        _check_bound(decl)
        return decl
    raise _fail(sexp, "expected a definition", "(def ...)", "(absdef ...)")


def _check_bound(d: Def) -> None:
    bound = {name for name, _ in d.signature.binders}
    mentioned = set(type_vars(d.signature.body))
    if isinstance(d, FunDef):
        for node in walk(d.body):
            match node:
                case FunRef(_, targs):
                    for t in targs:
                        mentioned |= type_vars(t)
                case Promote(target, _):
                    mentioned |= type_vars(target)
    unbound = sorted(mentioned - bound)
    if unbound:
        raise UnboundTypeVariable(
            f"unbound type variable(s) {', '.join(unbound)} in '{d.name}'", d.span
        )


def parse_program(text: str) -> Program:
    """Parse core-syntax source into a Program."""
    defs = [parse_definition(s) for s in read_sexps(text)]
    return Program(tuple(defs))


# --- Pretty-printing ---

_WIDTH = 88


def format_type(ty: CoreType) -> str:
    match ty:
        case TUnit():
            return "unit"
        case TPrim(prim):
            return prim.value
        case TVar(name):
            return name
        case TVarObserved(name):
            return f"(! {name})"
        case TFun(arg, result):
            return f"(fun {format_type(arg)} {format_type(result)})"
        case TVariant(alts):
            inner = "".join(f" ({c} {format_type(t)})" for c, t in alts)
            return f"(variant{inner})"
        case TRecord(fields, mode):
            parts = [
                f"({f.name} {format_type(f.type)}{' taken' if f.taken else ''})" for f in fields
            ]
            return f"(rec {mode.value}{''.join(' ' + p for p in parts)})"
        case TAbstract(name, args, mode):
            return f"(abs {name} {mode.value}{''.join(' ' + format_type(t) for t in args)})"
    raise TypeError(f"not a type: {ty!r}")


# A document is an atom string or a list of documents, rendered flat when it fits.
Doc = str | list


def _expr_doc(e: Expr) -> Doc:
    match e:
        case Var(name):
            return name
        case UnitE():
            return "unit"
        case Lit(value, prim):
            if isinstance(value, bool):
                return "true" if value else "false"
            return str(value) if prim is None else ["lit", prim.value, str(value)]
        case FunRef(name, targs):
            return ["funref", name, *(format_type(t) for t in targs)]
        case PrimOp(op, args):
            return ["op", op, *(_expr_doc(a) for a in args)]
        case App(fn, arg):
            return ["app", _expr_doc(fn), _expr_doc(arg)]
        case Let(name, bound, body):
            return ["let", name, _expr_doc(bound), _expr_doc(body)]
        case LetBang(observed, name, bound, body):
            return [
                "letbang",
                "(" + " ".join(observed) + ")",
                name,
                _expr_doc(bound),
                _expr_doc(body),
            ]
        case If(c, t, f):
            return ["if", _expr_doc(c), _expr_doc(t), _expr_doc(f)]
        case Cast(target, inner):
            return ["cast", target.value, _expr_doc(inner)]
        case Promote(target, inner):
            alts = "(" + " ".join(f"({c} {format_type(t)})" for c, t in target.alts) + ")"
            return ["promote", alts, _expr_doc(inner)]
        case Case(s, ctor, x, m, y, o):
            return ["case", _expr_doc(s), ctor, x, _expr_doc(m), y, _expr_doc(o)]
        case Esac(inner):
            return ["esac", _expr_doc(inner)]
        case Con(ctor, inner):
            return ["con", ctor, _expr_doc(inner)]
        case Struct(fields):
            return ["struct", *([name, _expr_doc(x)] for name, x in fields)]
        case Member(inner, f):
            return ["member", _expr_doc(inner), f]
        case Put(r, f, v):
            return ["put", _expr_doc(r), f, _expr_doc(v)]
        case Take(x, f, y, r, b):
            return ["take", x, f, y, _expr_doc(r), _expr_doc(b)]
        case Match(s, arms):
            return ["match", _expr_doc(s), *([a.ctor, a.name, _expr_doc(a.body)] for a in arms)]
    raise TypeError(f"not an expression: {e!r}")


def _flat(doc: Doc) -> str:
    if isinstance(doc, str):
        return doc
    return "(" + " ".join(_flat(d) for d in doc) + ")"


def _render(doc: Doc, indent: int) -> str:
    flat = _flat(doc)
    if isinstance(doc, str) or indent + len(flat) <= _WIDTH:
        return flat
    head, *rest = doc
    pad = " " * (indent + 2)
    lines = [f"({_render(head, indent + 1)}"]
    lines.extend(pad + _render(d, indent + 2) for d in rest)
    return "\n".join(lines) + ")"


def format_expr(e: Expr, indent: int = 0) -> str:
    return _render(_expr_doc(e), indent)


def _binders(poly: PolyType) -> str:
    inner = "".join(f" ({name} ({' '.join(kind.letters())}))" for name, kind in poly.binders)
    return f"(forall{inner})"


def format_definition(d: Def) -> str:
    if isinstance(d, AbsFunDecl):
        origin = ""
        if d.origin is not None:
            name, targs = d.origin
            origin = " (of " + " ".join([name, *(format_type(t) for t in targs)]) + ")"
        return f"(absdef {d.name} {_binders(d.signature)} {format_type(d.signature.body)}{origin})"
    header = (
        f"(def {d.name} {_binders(d.signature)}\n"
        f"  (fn ({d.param} {format_type(d.arg_type)}) {format_type(d.result_type)}\n"
    )
    return header + "    " + format_expr(d.body, 4) + "))"


def format_program(program: Program) -> str:
    return "\n\n".join(format_definition(d) for d in program.defs) + "\n"
