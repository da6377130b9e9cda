"""C backend: monomorphic A-normal programs to a readable C11 translation unit.

Records become structs (boxed ones are heap pointers), variants become tagged unions with
program-wide constructor tags, functions become C functions taking and returning one
value. Word arithmetic is done in 64 bits and narrowed, which gives the same wrap-around
as the interpreters.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from dataclasses import dataclass, field
from pathlib import Path

import jinja2

from cogc.errors import CogcError
from cogc.library import MAX_WORDARRAY_LENGTH, WORDARRAY, allocator_for
from cogc.parser import format_type
from cogc.primops import SIGNATURES
from cogc.syntax import (
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
    Let,
    LetBang,
    Lit,
    Member,
    Mode,
    PrimOp,
    PrimType,
    Program,
    Promote,
    Put,
    Struct,
    Take,
    TAbstract,
    TFun,
    TPrim,
    TRecord,
    TUnit,
    TVariant,
    UnitE,
    Var,
)
from cogc.typecheck import TypingTree, check_program, elaborate
from cogc.values import AbstractV, ConV, LitV, RecordV, Value

logger = logging.getLogger("cogc.codegen")

_TEMPLATE_DIR = Path(__file__).parent / "templates"

_jinja_env = jinja2.Environment(
    loader=jinja2.FileSystemLoader(str(_TEMPLATE_DIR)),
    autoescape=False,
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
    undefined=jinja2.StrictUndefined,
)

RUNTIME_HEADER = "cogc_runtime.h"

C_KEYWORDS = frozenset(
    """
    auto bool break case char const continue default do double else enum extern false float
    for goto if inline int long register restrict return short signed sizeof static struct
    switch true typedef union unsigned void volatile while _Alignas _Alignof _Atomic _Bool
    _Complex _Generic _Imaginary _Noreturn _Static_assert _Thread_local
    """.split()
)

# Prefixes owned by the generated code and the runtime.
_RESERVED_PREFIXES = ("cg_", "cogc_", "COGC_")

_C_PRIM = {
    PrimType.U8: "uint8_t",
    PrimType.U16: "uint16_t",
    PrimType.U32: "uint32_t",
    PrimType.U64: "uint64_t",
    PrimType.BOOL: "bool",
}


class CodegenError(CogcError):
    code = "CodegenError"


class UnsupportedConstruct(CodegenError):
    code = "UnsupportedConstruct"


# --- Text building ---


@dataclass
class CCodeBuilder:
    lines: list[str] = field(default_factory=list)
    indent_level: int = 0
    indent_str: str = "    "

    def emit(self, line: str = "") -> None:
        self.lines.append(f"{self.indent_str * self.indent_level}{line}" if line else "")

    def indent(self) -> None:
        self.indent_level += 1

    def dedent(self) -> None:
        self.indent_level -= 1

    def to_string(self) -> str:
        return "\n".join(self.lines)


def c_identifier(name: str) -> str:
    """Deterministic C spelling of a source identifier."""
    out = []
    for ch in name:
        if ch.isascii() and (ch.isalnum() or ch == "_"):
            out.append(ch)
        else:
            out.append(f"_x{ord(ch):02x}")
    ident = "".join(out)
    if ident in C_KEYWORDS:
        ident += "_"
    return ident


def _member(name: str) -> str:
    return c_identifier(name)


def _decl(ctype: str, name: str) -> str:
    return f"{ctype}{name}" if ctype.endswith("*") else f"{ctype} {name}"


def _c_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _literal(value: int | bool, prim: PrimType) -> str:
    if prim is PrimType.BOOL:
        return "true" if value else "false"
    return f"(({_C_PRIM[prim]})UINT64_C({int(value)}))"


def _layout(ty: CoreType) -> CoreType:
    """The part of a type that decides its C representation: no taken flags, no ro/wr."""
    match ty:
        case TRecord(fields, mode):
            return TRecord(
                tuple(Field(f.name, _layout(f.type)) for f in fields),
                Mode.WRITABLE if mode.boxed else Mode.UNBOXED,
            )
        case TVariant(alts):
            return TVariant(tuple((ctor, _layout(t)) for ctor, t in alts))
        case TFun(arg, result):
            return TFun(_layout(arg), _layout(result))
        case TAbstract(name, args, mode):
            return TAbstract(
                name,
                tuple(_layout(a) for a in args),
                Mode.WRITABLE if mode.boxed else Mode.UNBOXED,
            )
    return ty


def _contains_function(ty: CoreType) -> bool:
    match ty:
        case TFun():
            return True
        case TRecord(fields, _):
            return any(_contains_function(f.type) for f in fields)
        case TVariant(alts):
            return any(_contains_function(t) for _, t in alts)
        case TAbstract(_, args, _):
            return any(_contains_function(a) for a in args)
    return False


# --- Types ---


class _TypeTable:
    """C names for types, with definitions recorded in dependency order."""

    def __init__(self) -> None:
        self._names: dict[CoreType, str] = {}
        self.definitions: list[str] = []
        self.ctors: set[str] = set()
        self._converters: dict[tuple[CoreType, CoreType], str] = {}
        self.converters: list[str] = []
        self.frozen = False

    def c_type(self, ty: CoreType) -> str:
        match ty:
            case TPrim(prim):
                return _C_PRIM[prim]
            case TUnit():
                return "cogc_unit"
            case TRecord(_, mode):
                layout = _layout(ty)
                name = self._named(TRecord(layout.fields, Mode.UNBOXED))
                return f"{name} *" if mode.boxed else name
            case TVariant(alts) if alts:
                return self._named(_layout(ty))
            case TFun():
                return self._named(_layout(ty))
            case TAbstract(name, args, mode) if name == WORDARRAY:
                if mode.boxed and len(args) == 1 and isinstance(args[0], TPrim):
                    return "cogc_wordarray *"
        raise UnsupportedConstruct(f"type {format_type(ty)} has no C representation")

    def struct_name(self, rec: TRecord) -> str:
        return self._named(TRecord(_layout(rec).fields, Mode.UNBOXED))

    def tag(self, ctor: str) -> str:
        self.ctors.add(ctor)
        return f"COGC_TAG_{c_identifier(ctor)}"

    def tags(self) -> list[tuple[str, int]]:
        return [(self.tag(ctor), i) for i, ctor in enumerate(sorted(self.ctors))]

    def _named(self, key: CoreType) -> str:
        name = self._names.get(key)
        if name is not None:
            return name
        if self.frozen:
            raise CodegenError(f"type {format_type(key)} was not declared by the module")
        out = CCodeBuilder()
        match key:
            case TRecord(fields, _):
                members = [(self.c_type(f.type), _member(f.name)) for f in fields]
                name = f"cogc_rec_{len(self._names)}"
                out.emit("typedef struct {")
                out.indent()
                for ctype, m in members or [("char", "cogc_dummy")]:
                    out.emit(f"{_decl(ctype, m)};")
                out.dedent()
                out.emit(f"}} {name};")
            case TVariant(alts):
                members = [(self.c_type(t), _member(ctor)) for ctor, t in alts]
                self.ctors.update(ctor for ctor, _ in alts)
                name = f"cogc_var_{len(self._names)}"
                out.emit("typedef struct {")
                out.indent()
                out.emit("uint32_t tag;")
                out.emit("union {")
                out.indent()
                for ctype, m in members:
                    out.emit(f"{_decl(ctype, m)};")
                out.dedent()
                out.emit("} u;")
                out.dedent()
                out.emit(f"}} {name};")
            case TFun(arg, result):
                a, r = self.c_type(arg), self.c_type(result)
                name = f"cogc_fn_{len(self._names)}"
                out.emit(f"typedef {_decl(r, f'(*{name})')}({a});")
            case _:
                raise UnsupportedConstruct(f"type {format_type(key)} has no C representation")
        self._names[key] = name
        self.definitions.append(out.to_string())
        return name

    def convert(self, src: TVariant, dst: TVariant, expr: str) -> str:
        """Re-tag a variant value as another variant type sharing its live constructors."""
        ls, ld = _layout(src), _layout(dst)
        if ls == ld:
            return expr
        name = self._converters.get((ls, ld))
        if name is None:
            s, d = self.c_type(src), self.c_type(dst)
            name = f"cogc_conv_{len(self._converters)}"
            out = CCodeBuilder()
            out.emit(f"static inline {d} {name}({s} x)")
            out.emit("{")
            out.indent()
            out.emit("switch (x.tag) {")
            for ctor, _ in ld.alts:
                if ls.get(ctor) is None:
                    continue
                m = _member(ctor)
                out.emit(f"case {self.tag(ctor)}:")
                out.indent()
                out.emit(f"return ({d}){{ .tag = x.tag, .u = {{ .{m} = x.u.{m} }} }};")
                out.dedent()
            out.emit("default:")
            out.indent()
            out.emit("cogc_unreachable();")
            out.dedent()
            out.emit("}")
            out.dedent()
            out.emit("}")
            self._converters[(ls, ld)] = name
            self.converters.append(out.to_string())
        return f"{name}({expr})"


# --- Functions ---


class _FunctionEmitter:
    """One C function; ``dest`` None means the value is returned."""

    def __init__(self, module: CEmitter, fundef: FunDef, tree: TypingTree) -> None:
        self.module = module
        self.types = module.types
        self.fundef = fundef
        self.node_types = {id(node.expr): node.type for node in tree.iter_nodes()}
        self.counter = 0
        self.out = CCodeBuilder()

    def emit(self) -> str:
        d = self.fundef
        param = self.local(d.param)
        arg_c = self.types.c_type(d.arg_type)
        res_c = self.types.c_type(d.result_type)
        self.out.emit(f"{_decl(res_c, self.module.function_name(d.name))}({_decl(arg_c, param)})")
        self.out.emit("{")
        self.out.indent()
        self.out.emit(f"(void){param};")
        self.stmt(d.body, None, {d.param: param})
        self.out.dedent()
        self.out.emit("}")
        return self.out.to_string()

    def local(self, name: str) -> str:
        self.counter += 1
        base = c_identifier(name)
        if base.startswith(_RESERVED_PREFIXES):
            base = "v" + base
        return f"{base}_{self.counter}"

    def type_of(self, e: Expr) -> CoreType:
        try:
            return self.node_types[id(e)]
        except KeyError:
            raise CodegenError(f"no typing for {type(e).__name__} node", e.span) from None

    def declare(self, name: str, ty: CoreType, init: str | None = None) -> str:
        c = self.local(name)
        decl = _decl(self.types.c_type(ty), c)
        self.out.emit(f"{decl} = {init};" if init is not None else f"{decl};")
        return c

    def assign(self, dest: str | None, value: str) -> None:
        self.out.emit(f"return {value};" if dest is None else f"{dest} = {value};")

    def block(self, e: Expr, dest: str | None, scope: dict[str, str]) -> None:
        self.out.indent()
        self.stmt(e, dest, scope)
        self.out.dedent()

    def stmt(self, e: Expr, dest: str | None, scope: dict[str, str]) -> None:
        match e:
            case Let(name, bound, body) | LetBang(_, name, bound, body):
                c = self.declare(name, self.type_of(bound))
                self.stmt(bound, c, scope)
                self.out.emit(f"(void){c};")
                self.stmt(body, dest, {**scope, name: c})
            case If(cond, then, orelse):
                self.out.emit(f"if ({self.value(cond, scope)}) {{")
                self.block(then, dest, scope)
                self.out.emit("} else {")
                self.block(orelse, dest, scope)
                self.out.emit("}")
            case Case(scrut, ctor, bound, match_body, else_name, else_body):
                self.case(scrut, ctor, bound, match_body, else_name, else_body, dest, scope)
            case Take(rec_name, fname, field_name, record, body):
                r = self.value(record, scope)
                rty = self.type_of(record)
                f = rty.field(fname)
                x = self.declare(rec_name, rty, r)
                y = self.declare(field_name, f.type, f"{x}{self.access(rty)}{_member(fname)}")
                self.out.emit(f"(void){x};")
                self.out.emit(f"(void){y};")
                self.stmt(body, dest, {**scope, rec_name: x, field_name: y})
            case Put(record, fname, value):
                rty = self.type_of(record)
                r = self.declare("put", rty, self.value(record, scope))
                v = self.value(value, scope)
                self.out.emit(f"{r}{self.access(rty)}{_member(fname)} = {v};")
                self.assign(dest, r)
            case _:
                self.assign(dest, self.value(e, scope))

    def case(
        self,
        scrut: Expr,
        ctor: str,
        bound: str,
        match_body: Expr,
        else_name: str,
        else_body: Expr,
        dest: str | None,
        scope: dict[str, str],
    ) -> None:
        s = self.value(scrut, scope)
        sty = self.type_of(scrut)
        rest = sty.without(ctor)
        self.out.emit(f"switch ({s}.tag) {{")
        self.out.emit(f"case {self.types.tag(ctor)}: {{")
        self.out.indent()
        b = self.declare(bound, sty.get(ctor), f"{s}.u.{_member(ctor)}")
        self.out.emit(f"(void){b};")
        self.stmt(match_body, dest, {**scope, bound: b})
        self.out.emit("break;")
        self.out.dedent()
        self.out.emit("}")
        self.out.emit("default: {")
        self.out.indent()
        if rest.alts:
            o = self.declare(else_name, rest, self.types.convert(sty, rest, s))
            self.out.emit(f"(void){o};")
            self.stmt(else_body, dest, {**scope, else_name: o})
        else:
            self.out.emit("cogc_unreachable();")
        self.out.emit("break;")
        self.out.dedent()
        self.out.emit("}")
        self.out.emit("}")

    @staticmethod
    def access(rty: TRecord) -> str:
        return "->" if rty.mode.boxed else "."

    def value(self, e: Expr, scope: dict[str, str]) -> str:
        """C expression for an operand-position term."""
        match e:
            case Var(name):
                if name not in scope:
                    raise CodegenError(f"unbound variable '{name}'", e.span)
                return scope[name]
            case Lit(value, prim):
                if prim is None:
                    prim = self.type_of(e).prim
                return _literal(value, prim)
            case UnitE():
                return "cogc_unit_value"
            case FunRef(name, type_args):
                if type_args:
                    raise UnsupportedConstruct(f"'{name}' is not monomorphised", e.span)
                return self.module.function_name(name)
            case PrimOp(op, args):
                return self.primop(e, [self.value(a, scope) for a in args])
            case App(fn, arg):
                return f"{self.value(fn, scope)}({self.value(arg, scope)})"
            case Cast(target, x):
                return f"(({_C_PRIM[target]}){self.value(x, scope)})"
            case Promote(target, x):
                return self.types.convert(self.type_of(x), target, self.value(x, scope))
            case Esac(x):
                ctor = self.type_of(x).alts[0][0]
                return f"{self.value(x, scope)}.u.{_member(ctor)}"
            case Con(ctor, x):
                ty = self.types.c_type(self.type_of(e))
                payload = self.value(x, scope)
                tag = self.types.tag(ctor)
                return f"(({ty}){{ .tag = {tag}, .u = {{ .{_member(ctor)} = {payload} }} }})"
            case Struct(fields):
                ty = self.types.c_type(self.type_of(e))
                inits = [f".{_member(name)} = {self.value(x, scope)}" for name, x in fields]
                return f"(({ty}){{ {', '.join(inits) or '.cogc_dummy = 0'} }})"
            case Member(x, fname):
                rty = self.type_of(x)
                return f"{self.value(x, scope)}{self.access(rty)}{_member(fname)}"
        raise UnsupportedConstruct(
            f"{type(e).__name__} in operand position; A-normalise the program first", e.span
        )

    def primop(self, e: PrimOp, args: list[str]) -> str:
        operand = self.type_of(e.args[0])
        prim = operand.prim
        t = _C_PRIM[prim]
        c_op = SIGNATURES[e.op].c_op
        match e.op:
            case "not":
                return f"(!{args[0]})"
            case "~":
                return f"(({t})~(uint64_t){args[0]})"
            case "&&" | "||" | "<" | "<=" | ">" | ">=" | "==" | "!=":
                return f"({args[0]} {c_op} {args[1]})"
            case "/" | "%":
                helper = "cogc_div" if e.op == "/" else "cogc_mod"
                return f"(({t}){helper}((uint64_t){args[0]}, (uint64_t){args[1]}))"
            case "<<" | ">>":
                helper = "cogc_shl" if e.op == "<<" else "cogc_shr"
                return f"(({t}){helper}((uint64_t){args[0]}, (uint64_t){args[1]}, {prim.bits}u))"
        return f"(({t})((uint64_t){args[0]} {c_op} (uint64_t){args[1]}))"


# --- Output ---


@dataclass(frozen=True)
class CUnit:
    """Emitted C sources, keyed by file name."""

    name: str
    runtime: str
    header: str
    source: str

    @property
    def header_name(self) -> str:
        return f"{self.name}.h"

    @property
    def source_name(self) -> str:
        return f"{self.name}.c"

    def files(self) -> dict[str, str]:
        return {
            RUNTIME_HEADER: self.runtime,
            self.header_name: self.header,
            self.source_name: self.source,
        }

    def write(self, directory: str | Path) -> list[Path]:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for filename, text in self.files().items():
            path = out / filename
            path.write_text(text)
            paths.append(path)
        return paths


class CEmitter:
    """Emits one program; also produces drivers that run one of its functions."""

    def __init__(self, program: Program, name: str = "prog") -> None:
        self.trees = check_program(program)
        self.program = elaborate(program, self.trees)
        self.name = c_identifier(name)
        self.types = _TypeTable()
        self._functions: dict[str, str] = {}
        for d in self.program.defs:
            if d.signature.binders:
                raise UnsupportedConstruct(f"'{d.name}' is polymorphic; monomorphise first", d.span)
            cname = "cg_" + c_identifier(d.name)
            if cname in self._functions.values():
                raise CodegenError(f"C name {cname} of '{d.name}' is already in use", d.span)
            self._functions[d.name] = cname
        self._unit: CUnit | None = None

    def function_name(self, name: str) -> str:
        try:
            return self._functions[name]
        except KeyError:
            raise CodegenError(f"no definition of '{name}'") from None

    def emit(self) -> CUnit:
        if self._unit is not None:
            return self._unit
        builtins, functions, prototypes = [], [], []
        for d in self.program.defs:
            fn = d.signature.body
            arg_c, res_c = self.types.c_type(fn.arg), self.types.c_type(fn.result)
            prototypes.append(f"{_decl(res_c, self._functions[d.name])}({_decl(arg_c, 'arg')})")
            if isinstance(d, AbsFunDecl):
                builtins.append(self._builtin(d))
            else:
                functions.append(_FunctionEmitter(self, d, self.trees[d.name]).emit())
        self.types.frozen = True
        guard = f"COGC_{self.name.upper()}_H"
        runtime = _jinja_env.get_template("runtime.h.j2").render(
            max_wordarray_length=MAX_WORDARRAY_LENGTH,
        )
        header = _jinja_env.get_template("header.h.j2").render(
            name=self.name,
            guard=guard,
            tags=self.types.tags(),
            types=self.types.definitions,
            prototypes=prototypes,
        )
        source = _jinja_env.get_template("module.c.j2").render(
            name=self.name,
            header=f"{self.name}.h",
            converters=self.types.converters,
            builtins=builtins,
            functions=functions,
        )
        logger.debug(
            "emitted %d function(s), %d builtin(s), %d type(s)",
            len(functions),
            len(builtins),
            len(self.types.definitions),
        )
        self._unit = CUnit(self.name, runtime, header, source)
        return self._unit

    # --- Built-in abstract functions ---

    def _builtin(self, d: AbsFunDecl) -> str:
        fn = d.signature.body
        res_c = self.types.c_type(fn.result)
        out = CCodeBuilder()
        arg_c = self.types.c_type(fn.arg)
        out.emit(f"{_decl(res_c, self._functions[d.name])}({_decl(arg_c, 'arg')})")
        out.emit("{")
        out.indent()
        for line in self._builtin_body(d, fn, res_c):
            out.emit(line)
        out.dedent()
        out.emit("}")
        return out.to_string()

    def _builtin_body(self, d: AbsFunDecl, fn: TFun, res_c: str) -> Iterator[str]:
        name = d.ffi_name
        match name:
            case "wordarray_create":
                yield "return cogc_wa_create(arg);"
            case "wordarray_free":
                yield "cogc_wa_free(arg);"
                yield "return cogc_unit_value;"
            case "wordarray_length":
                yield "return arg->len;"
            case "wordarray_get":
                elem = _C_PRIM[fn.result.get("Ok").prim]
                ok, err = self.types.tag("Ok"), self.types.tag("Err")
                yield "if (arg.idx < arg.arr->len) {"
                get = f"({elem})arg.arr->data[arg.idx]"
                yield f"    return ({res_c}){{ .tag = {ok}, .u = {{ .Ok = {get} }} }};"
                yield "}"
                yield f"return ({res_c}){{ .tag = {err}, .u = {{ .Err = cogc_unit_value }} }};"
            case "wordarray_put":
                ok, err = self.types.tag("Ok"), self.types.tag("Err")
                yield "if (arg.idx < arg.arr->len) {"
                yield "    arg.arr->data[arg.idx] = (uint64_t)arg.val;"
                yield f"    return ({res_c}){{ .tag = {ok}, .u = {{ .Ok = arg.arr }} }};"
                yield "}"
                yield f"return ({res_c}){{ .tag = {err}, .u = {{ .Err = arg.arr }} }};"
            case "wordarray_map_no_break":
                step = fn.arg.field("f").type.arg
                step_c = self.types.c_type(step)
                elem = _C_PRIM[step.field("elem").type.prim]
                yield "for (uint32_t i = 0; i < arg.arr->len; i++) {"
                yield f"    {step_c} s = {{ .elem = ({elem})arg.arr->data[i], .acc = arg.acc }};"
                yield "    s = arg.f(s);"
                yield "    arg.arr->data[i] = (uint64_t)s.elem;"
                yield "    arg.acc = s.acc;"
                yield "}"
                yield f"return ({res_c}){{ .arr = arg.arr, .acc = arg.acc }};"
            case _ if name.startswith("alloc_") and allocator_for(d) is not None:
                yield "(void)arg;"
                yield f"{_decl(res_c, 'p')} = cogc_alloc(sizeof *p);"
                yield "return p;"
            case _ if name.startswith("free_") and allocator_for(d) is not None:
                yield "free(arg);"
                yield "return cogc_unit_value;"
            case _:
                raise UnsupportedConstruct(
                    f"no C implementation of abstract function '{name}'", d.span
                )

    # --- Drivers ---

    def driver(self, fname: str, arg: Value) -> str:
        """A ``main`` that applies ``fname`` to ``arg`` and prints the result as typed JSON.

        ``arg`` is a value-semantics value (pointer-free) of the function's argument type.
        """
        unit = self.emit()
        d = self.program.lookup(fname)
        if not isinstance(d, FunDef):
            raise CodegenError(f"'{fname}' is not a defined function")
        for ty in (d.arg_type, d.result_type):
            if _contains_function(ty):
                raise UnsupportedConstruct(
                    f"values of type {format_type(ty)} cannot cross the driver boundary", d.span
                )
        inputs = _InputBuilder(self.types)
        arg_expr = inputs.value(arg, d.arg_type)
        builder = CCodeBuilder()
        builder.emit(f"static {_decl(self.types.c_type(d.arg_type), 'cogc_input')}(void)")
        builder.emit("{")
        builder.indent()
        builder.lines.extend(f"    {line}" for line in inputs.out.lines)
        builder.emit(f"return {arg_expr};")
        builder.dedent()
        builder.emit("}")
        printers = _Printers(self.types)
        print_result = printers.printer(d.result_type)
        return _jinja_env.get_template("driver.c.j2").render(
            header=unit.header_name,
            entry=self._functions[fname],
            printers=printers.definitions,
            input=builder.to_string(),
            arg_decl=_decl(self.types.c_type(d.arg_type), "arg"),
            result_decl=_decl(self.types.c_type(d.result_type), "result"),
            print_result=print_result,
        )


class _InputBuilder:
    """C statements and an expression rebuilding an input value on the C heap."""

    def __init__(self, types: _TypeTable) -> None:
        self.types = types
        self.out = CCodeBuilder()
        self.count = 0

    def fresh(self) -> str:
        self.count += 1
        return f"in_{self.count}"

    def value(self, v: Value, ty: CoreType) -> str:
        match ty, v:
            case TPrim(prim), LitV(value, _):
                return _literal(value, prim)
            case TUnit(), _:
                return "cogc_unit_value"
            case TVariant(), ConV(ctor, payload):
                p = self.value(payload, ty.get(ctor))
                return (
                    f"(({self.types.c_type(ty)}){{ .tag = {self.types.tag(ctor)}, "
                    f".u = {{ .{_member(ctor)} = {p} }} }})"
                )
            case TRecord(fields, mode), RecordV():
                present = [(f, self.value(v.get(f.name), f.type)) for f in fields if not f.taken]
                struct = self.types.struct_name(ty)
                name = self.fresh()
                if mode.boxed:
                    self.out.emit(f"{struct} *{name} = cogc_alloc(sizeof *{name});")
                else:
                    self.out.emit(f"{struct} {name};")
                    self.out.emit(f"memset(&{name}, 0, sizeof {name});")
                access = "->" if mode.boxed else "."
                for f, expr in present:
                    self.out.emit(f"{name}{access}{_member(f.name)} = {expr};")
                return name
            case TAbstract(name, _, _), AbstractV(_, items) if name == WORDARRAY:
                self.types.c_type(ty)
                if not items:
                    return "cogc_wa_from(NULL, 0u)"
                data = ", ".join(f"UINT64_C({int(x)})" for x in items)
                return f"cogc_wa_from((const uint64_t[]){{ {data} }}, {len(items)}u)"
        raise UnsupportedConstruct(f"cannot embed an input of type {format_type(ty)}")


class _Printers:
    """Per-type C functions printing a value in the interpreter's typed JSON form."""

    def __init__(self, types: _TypeTable) -> None:
        self.types = types
        self._names: dict[CoreType, str] = {}
        self.definitions: list[str] = []

    def printer(self, ty: CoreType) -> str:
        name = self._names.get(ty)
        if name is not None:
            return name
        body = CCodeBuilder(indent_level=1)
        self._body(ty, body)
        name = f"cogc_print_{len(self._names)}"
        self._names[ty] = name
        out = CCodeBuilder()
        out.emit(f"static void {name}({_decl(self.types.c_type(ty), 'v')})")
        out.emit("{")
        out.lines.extend(body.lines)
        out.emit("}")
        self.definitions.append(out.to_string())
        return name

    @staticmethod
    def _puts(out: CCodeBuilder, text: str) -> None:
        out.emit(f"fputs({_c_string(text)}, stdout);")

    def _pointer(self, out: CCodeBuilder) -> None:
        out.emit("int fresh;")
        out.emit("unsigned id = cogc_ptr_number(v, &fresh);")
        out.emit("if (!fresh) {")
        out.indent()
        out.emit('printf("{\\"ptr\\": %u}", id);')
        out.emit("return;")
        out.dedent()
        out.emit("}")
        out.emit('printf("{\\"ptr\\": %u, ", id);')

    def _body(self, ty: CoreType, out: CCodeBuilder) -> None:
        match ty:
            case TPrim(PrimType.BOOL):
                self._puts(out, '{"lit": ')
                out.emit('fputs(v ? "true" : "false", stdout);')
                self._puts(out, ', "ty": "bool"}')
            case TPrim(prim):
                self._puts(out, '{"lit": ')
                out.emit('printf("%" PRIu64, (uint64_t)v);')
                self._puts(out, f', "ty": "{prim.value}"}}')
            case TUnit():
                out.emit("(void)v;")
                self._puts(out, '{"unit": true}')
            case TVariant(alts):
                out.emit("switch (v.tag) {")
                for ctor, payload in alts:
                    inner = self.printer(payload)
                    out.emit(f"case {self.types.tag(ctor)}:")
                    out.indent()
                    self._puts(out, f'{{"con": ["{ctor}", ')
                    out.emit(f"{inner}(v.u.{_member(ctor)});")
                    self._puts(out, "]}")
                    out.emit("break;")
                    out.dedent()
                out.emit("default:")
                out.indent()
                out.emit("cogc_unreachable();")
                out.dedent()
                out.emit("}")
            case TRecord(fields, mode):
                access = "->" if mode.boxed else "."
                if mode.boxed:
                    self._pointer(out)
                    self._puts(out, '"rec": {')
                else:
                    self._puts(out, '{"rec": {')
                present = [f for f in fields if not f.taken]
                if not present:
                    out.emit("(void)v;")
                for i, f in enumerate(present):
                    inner = self.printer(f.type)
                    self._puts(out, f'{", " if i else ""}"{f.name}": ')
                    out.emit(f"{inner}(v{access}{_member(f.name)});")
                self._puts(out, "}}")
            case TAbstract(name, (TPrim(prim),), mode) if name == WORDARRAY and mode.boxed:
                self._pointer(out)
                self._puts(out, f'"abs": "{WORDARRAY}", "data": [')
                out.emit("for (uint32_t i = 0; i < v->len; i++) {")
                out.indent()
                out.emit("if (i) {")
                out.emit('    fputs(", ", stdout);')
                out.emit("}")
                if prim is PrimType.BOOL:
                    out.emit('fputs(v->data[i] ? "true" : "false", stdout);')
                else:
                    out.emit('printf("%" PRIu64, v->data[i]);')
                out.dedent()
                out.emit("}")
                self._puts(out, "]}")
            case _:
                raise UnsupportedConstruct(f"cannot print values of type {format_type(ty)}")


def emit_c(program: Program, name: str = "prog") -> CUnit:
    """Emit C for a monomorphic, A-normal program."""
    return CEmitter(program, name).emit()
