"""Abstract syntax of the desugared core language: types, expressions, programs."""

from __future__ import annotations

import enum
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field, replace
from functools import cached_property

from cogc.errors import CogcError


class DuplicateDefinition(CogcError):
    code = "DuplicateDefinition"


# --- Source positions ---


@dataclass(frozen=True, slots=True)
class Span:
    """Character offsets plus 1-based line/column of the start."""

    start: int
    end: int
    line: int = 0
    column: int = 0


def _span():
    return field(default=None, compare=False, repr=False, kw_only=True)


# --- Primitive types, modes, kinds ---


class PrimType(enum.Enum):
    U8 = "u8"
    U16 = "u16"
    U32 = "u32"
    U64 = "u64"
    BOOL = "bool"

    @property
    def bits(self) -> int:
        return 1 if self is PrimType.BOOL else int(self.value[1:])

    @property
    def max_value(self) -> int:
        """|t|: one more than the largest value of the type."""
        return 2 if self is PrimType.BOOL else 1 << self.bits

    @property
    def is_word(self) -> bool:
        return self is not PrimType.BOOL


class Mode(enum.Enum):
    READ_ONLY = "ro"
    WRITABLE = "wr"
    UNBOXED = "ub"

    @property
    def boxed(self) -> bool:
        return self is not Mode.UNBOXED


class Kind(enum.Flag):
    """A set of permissions drawn from Discard, Share, Escape."""

    DISCARD = 1
    SHARE = 2
    ESCAPE = 4

    @classmethod
    def parse(cls, letters: str) -> Kind:
        kind = cls(0)
        for letter in letters:
            kind |= _KIND_LETTERS[letter]
        return kind

    def letters(self) -> str:
        """Canonical D, S, E rendering, e.g. ``"DS"``."""
        return "".join(c for c, k in _KIND_LETTERS.items() if k in self)

    def issubset(self, other: Kind) -> bool:
        return self & other == self


_KIND_LETTERS = {"D": Kind.DISCARD, "S": Kind.SHARE, "E": Kind.ESCAPE}

EMPTY_KIND = Kind(0)
FULL_KIND = Kind.DISCARD | Kind.SHARE | Kind.ESCAPE


# --- Types ---


@dataclass(frozen=True, slots=True)
class TVar:
    name: str


@dataclass(frozen=True, slots=True)
class TVarObserved:
    name: str


@dataclass(frozen=True, slots=True)
class TUnit:
    pass


@dataclass(frozen=True, slots=True)
class TPrim:
    prim: PrimType


@dataclass(frozen=True, slots=True)
class TFun:
    arg: CoreType
    result: CoreType


@dataclass(frozen=True, slots=True)
class TVariant:
    """Alternatives are kept sorted by constructor, so equality ignores their order."""

    alts: tuple[tuple[str, CoreType], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.alts]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate constructor in variant: {names}")
        object.__setattr__(self, "alts", tuple(sorted(self.alts, key=lambda alt: alt[0])))

    def get(self, ctor: str) -> CoreType | None:
        for name, ty in self.alts:
            if name == ctor:
                return ty
        return None

    def without(self, ctor: str) -> TVariant:
        return TVariant(tuple(alt for alt in self.alts if alt[0] != ctor))

    @property
    def ctors(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.alts)


@dataclass(frozen=True, slots=True)
class Field:
    name: str
    type: CoreType
    taken: bool = False


@dataclass(frozen=True, slots=True)
class TRecord:
    fields: tuple[Field, ...]
    mode: Mode

    def __post_init__(self) -> None:
        names = [f.name for f in self.fields]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate field in record: {names}")
        object.__setattr__(self, "fields", tuple(self.fields))

    def field(self, name: str) -> Field | None:
        for f in self.fields:
            if f.name == name:
                return f
        return None

    def with_taken(self, name: str, taken: bool) -> TRecord:
        return TRecord(
            tuple(replace(f, taken=taken) if f.name == name else f for f in self.fields),
            self.mode,
        )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.fields)


@dataclass(frozen=True, slots=True)
class TAbstract:
    name: str
    args: tuple[CoreType, ...]
    mode: Mode

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))


CoreType = TVar | TVarObserved | TUnit | TPrim | TFun | TVariant | TRecord | TAbstract

UNIT = TUnit()
U8 = TPrim(PrimType.U8)
U16 = TPrim(PrimType.U16)
U32 = TPrim(PrimType.U32)
U64 = TPrim(PrimType.U64)
BOOL = TPrim(PrimType.BOOL)


def type_equal(a: CoreType, b: CoreType) -> bool:
    """Structural equality; variants compare as sets keyed by constructor."""
    return a == b


def type_vars(ty: CoreType) -> frozenset[str]:
    """Names of all plain and observed type variables in ``ty``."""
    match ty:
        case TVar(name) | TVarObserved(name):
            return frozenset((name,))
        case TFun(arg, result):
            return type_vars(arg) | type_vars(result)
        case TVariant(alts):
            return frozenset().union(*(type_vars(t) for _, t in alts))
        case TRecord(fields, _):
            return frozenset().union(*(type_vars(f.type) for f in fields))
        case TAbstract(_, args, _):
            return frozenset().union(*(type_vars(t) for t in args))
    return frozenset()


@dataclass(frozen=True, slots=True)
class PolyType:
    """Rank-1 type scheme ``forall binders. arg -> result``."""

    binders: tuple[tuple[str, Kind], ...]
    body: TFun

    def __post_init__(self) -> None:
        names = [name for name, _ in self.binders]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate type binder: {names}")
        object.__setattr__(self, "binders", tuple(self.binders))

    @property
    def is_mono(self) -> bool:
        return not self.binders


# --- Expressions ---


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class UnitE:
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class FunRef:
    name: str
    type_args: tuple[CoreType, ...] = ()
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class PrimOp:
    op: str
    args: tuple[Expr, ...]
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class App:
    fn: Expr
    arg: Expr
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class Let:
    name: str
    bound: Expr
    body: Expr
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class LetBang:
    observed: tuple[str, ...]
    name: str
    bound: Expr
    body: Expr
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class If:
    cond: Expr
    then: Expr
    orelse: Expr
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class Lit:
    """Literal; ``prim`` is None until the checker fixes it from context."""

    value: int | bool
    prim: PrimType | None = None
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class Cast:
    target: PrimType
    expr: Expr
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class Promote:
    target: TVariant
    expr: Expr
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class Case:
    scrutinee: Expr
    ctor: str
    bound: str
    match_body: Expr
    else_name: str
    else_body: Expr
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class Esac:
    expr: Expr
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class Con:
    ctor: str
    expr: Expr
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class Struct:
    fields: tuple[tuple[str, Expr], ...]
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class Member:
    expr: Expr
    field: str
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class Put:
    record: Expr
    field: str
    value: Expr
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class Take:
    """``take x f y e1 e2``: x binds the record, y the extracted field."""

    record_name: str
    field: str
    field_name: str
    record: Expr
    body: Expr
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class MatchArm:
    ctor: str
    name: str
    body: Expr
    span: Span | None = _span()


@dataclass(frozen=True, slots=True)
class Match:
    """Multi-way match; surface sugar removed by the desugaring pass."""

    scrutinee: Expr
    arms: tuple[MatchArm, ...]
    span: Span | None = _span()


Expr = (
    Var | UnitE | FunRef | PrimOp | App | Let | LetBang | If | Lit | Cast | Promote | Case
    | Esac | Con | Struct | Member | Put | Take | Match
)


# --- Definitions and programs ---


@dataclass(frozen=True, slots=True)
class FunDef:
    name: str
    signature: PolyType
    param: str
    body: Expr
    span: Span | None = _span()

    @property
    def arg_type(self) -> CoreType:
        return self.signature.body.arg

    @property
    def result_type(self) -> CoreType:
        return self.signature.body.result


@dataclass(frozen=True, slots=True)
class AbsFunDecl:
    """Abstract function; ``origin`` names the source instance after monomorphisation."""

    name: str
    signature: PolyType
    origin: tuple[str, tuple[CoreType, ...]] | None = None
    span: Span | None = _span()

    @property
    def ffi_name(self) -> str:
        return self.origin[0] if self.origin else self.name


Def = FunDef | AbsFunDecl


@dataclass(frozen=True)
class Program:
    defs: tuple[Def, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "defs", tuple(self.defs))
        seen: set[str] = set()
        for d in self.defs:
            if d.name in seen:
                raise DuplicateDefinition(f"duplicate definition of '{d.name}'", d.span)
            seen.add(d.name)

    @cached_property
    def by_name(self) -> dict[str, Def]:
        return {d.name: d for d in self.defs}

    def lookup(self, name: str) -> Def | None:
        return self.by_name.get(name)

    def fundefs(self) -> list[FunDef]:
        return [d for d in self.defs if isinstance(d, FunDef)]


# --- Traversals ---


def children(e: Expr) -> tuple[Expr, ...]:
    """Immediate sub-expressions in evaluation order."""
    match e:
        case PrimOp(_, args):
            return args
        case App(fn, arg):
            return (fn, arg)
        case Let(_, bound, body) | LetBang(_, _, bound, body):
            return (bound, body)
        case If(c, t, f):
            return (c, t, f)
        case Cast(_, x) | Promote(_, x) | Esac(x) | Con(_, x) | Member(x, _):
            return (x,)
        case Case(s, _, _, m, _, o):
            return (s, m, o)
        case Struct(fields):
            return tuple(x for _, x in fields)
        case Put(r, _, v):
            return (r, v)
        case Take(_, _, _, r, b):
            return (r, b)
        case Match(s, arms):
            return (s, *(arm.body for arm in arms))
    return ()


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal of every node."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def free_vars(e: Expr) -> frozenset[str]:
    """Variables occurring free in ``e``; function names are FunRefs and never count."""
    match e:
        case Var(name):
            return frozenset((name,))
        case Let(name, bound, body):
            return free_vars(bound) | (free_vars(body) - {name})
        case LetBang(observed, name, bound, body):
            return frozenset(observed) | free_vars(bound) | (free_vars(body) - {name})
        case Case(s, _, bound, m, else_name, o):
            return free_vars(s) | (free_vars(m) - {bound}) | (free_vars(o) - {else_name})
        case Take(x, _, y, r, b):
            return free_vars(r) | (free_vars(b) - {x, y})
        case Match(s, arms):
            result = free_vars(s)
            for arm in arms:
                result |= free_vars(arm.body) - {arm.name}
            return result
    result: frozenset[str] = frozenset()
    for child in children(e):
        result |= free_vars(child)
    return result


def bound_names(e: Expr) -> set[str]:
    """Every variable name mentioned in ``e``, bound or free."""
    names: set[str] = set()
    for node in walk(e):
        match node:
            case Var(name):
                names.add(name)
            case Let(name, _, _):
                names.add(name)
            case LetBang(observed, name, _, _):
                names.update(observed)
                names.add(name)
            case Case(_, _, bound, _, else_name, _):
                names.update((bound, else_name))
            case Take(x, _, y, _, _):
                names.update((x, y))
            case Match(_, arms):
                names.update(arm.name for arm in arms)
    return names


def _same(new: tuple, old: tuple) -> bool:
    return len(new) == len(old) and all(a is b for a, b in zip(new, old, strict=True))


def map_expr(
    e: Expr,
    on_expr: Callable[[Expr], Expr],
    on_type: Callable[[CoreType], CoreType] | None = None,
) -> Expr:
    """Rebuild ``e`` with children mapped; returns ``e`` itself when nothing changed."""
    ft = on_type or (lambda t: t)
    match e:
        case FunRef(_, targs):
            new_targs = tuple(ft(t) for t in targs)
            return e if _same(new_targs, targs) else replace(e, type_args=new_targs)
        case PrimOp(_, args):
            new_args = tuple(on_expr(a) for a in args)
            return e if _same(new_args, args) else replace(e, args=new_args)
        case App(fn, arg):
            f2, a2 = on_expr(fn), on_expr(arg)
            return e if (f2 is fn and a2 is arg) else replace(e, fn=f2, arg=a2)
        case Let(_, bound, body) | LetBang(_, _, bound, body):
            b2, body2 = on_expr(bound), on_expr(body)
            return e if (b2 is bound and body2 is body) else replace(e, bound=b2, body=body2)
        case If(c, t, f):
            c2, t2, f2 = on_expr(c), on_expr(t), on_expr(f)
            if c2 is c and t2 is t and f2 is f:
                return e
            return replace(e, cond=c2, then=t2, orelse=f2)
        case Cast(_, x) | Esac(x) | Con(_, x) | Member(x, _):
            x2 = on_expr(x)
            return e if x2 is x else replace(e, expr=x2)
        case Promote(target, x):
            x2, t2 = on_expr(x), ft(target)
            return e if (x2 is x and t2 is target) else replace(e, expr=x2, target=t2)
        case Case(s, _, _, m, _, o):
            s2, m2, o2 = on_expr(s), on_expr(m), on_expr(o)
            if s2 is s and m2 is m and o2 is o:
                return e
            return replace(e, scrutinee=s2, match_body=m2, else_body=o2)
        case Struct(fields):
            new_fields = tuple((name, on_expr(x)) for name, x in fields)
            if all(n[1] is o[1] for n, o in zip(new_fields, fields, strict=True)):
                return e
            return replace(e, fields=new_fields)
        case Put(r, _, v):
            r2, v2 = on_expr(r), on_expr(v)
            return e if (r2 is r and v2 is v) else replace(e, record=r2, value=v2)
        case Take(_, _, _, r, b):
            r2, b2 = on_expr(r), on_expr(b)
            return e if (r2 is r and b2 is b) else replace(e, record=r2, body=b2)
        case Match(s, arms):
            s2 = on_expr(s)
            new_arms = tuple(replace(arm, body=on_expr(arm.body)) for arm in arms)
            if s2 is s and all(n.body is o.body for n, o in zip(new_arms, arms, strict=True)):
                return e
            return replace(e, scrutinee=s2, arms=new_arms)
    return e
