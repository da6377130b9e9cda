"""Primitive operator table: operand classes, result types and unsigned wrap-around evaluation."""

from __future__ import annotations

import enum
import operator
from collections.abc import Callable
from dataclasses import dataclass

from cogc.syntax import PrimType


class Operands(enum.Enum):
    WORD = "word"
    BOOL = "bool"
    ANY = "any"


@dataclass(frozen=True, slots=True)
class OpSignature:
    arity: int
    operands: Operands
    # None: the result has the operand type
    result: PrimType | None
    c_op: str


def _sig(arity: int, operands: Operands, c_op: str, result: PrimType | None = None):
    return OpSignature(arity, operands, result, c_op)


SIGNATURES: dict[str, OpSignature] = {
    "+": _sig(2, Operands.WORD, "+"),
    "-": _sig(2, Operands.WORD, "-"),
    "*": _sig(2, Operands.WORD, "*"),
    "/": _sig(2, Operands.WORD, "/"),
    "%": _sig(2, Operands.WORD, "%"),
    "&": _sig(2, Operands.WORD, "&"),
    "|": _sig(2, Operands.WORD, "|"),
    "^": _sig(2, Operands.WORD, "^"),
    "<<": _sig(2, Operands.WORD, "<<"),
    ">>": _sig(2, Operands.WORD, ">>"),
    "~": _sig(1, Operands.WORD, "~"),
    "<": _sig(2, Operands.WORD, "<", PrimType.BOOL),
    "<=": _sig(2, Operands.WORD, "<=", PrimType.BOOL),
    ">": _sig(2, Operands.WORD, ">", PrimType.BOOL),
    ">=": _sig(2, Operands.WORD, ">=", PrimType.BOOL),
    "==": _sig(2, Operands.ANY, "==", PrimType.BOOL),
    "!=": _sig(2, Operands.ANY, "!=", PrimType.BOOL),
    "&&": _sig(2, Operands.BOOL, "&&", PrimType.BOOL),
    "||": _sig(2, Operands.BOOL, "||", PrimType.BOOL),
    "not": _sig(1, Operands.BOOL, "!", PrimType.BOOL),
}


def accepts(sig: OpSignature, prim: PrimType) -> bool:
    if sig.operands is Operands.WORD:
        return prim.is_word
    if sig.operands is Operands.BOOL:
        return prim is PrimType.BOOL
    return True


def result_type(sig: OpSignature, operand: PrimType) -> PrimType:
    return sig.result or operand


def _shift_left(a: int, b: int, bits: int) -> int:
    return 0 if b >= bits else a << b


def _shift_right(a: int, b: int, bits: int) -> int:
    return 0 if b >= bits else a >> b


_WORD_BINARY: dict[str, Callable[[int, int], int]] = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.floordiv,
    "%": operator.mod,
    "&": operator.and_,
    "|": operator.or_,
    "^": operator.xor,
}

_COMPARE: dict[str, Callable[[int, int], bool]] = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
    "!=": operator.ne,
}


def apply_primop(op: str, operand: PrimType, args: list[int | bool]) -> int | bool:
    """Evaluate ``op`` on already-evaluated operands of type ``operand``.

    Word results wrap modulo 2^bits. Raises ZeroDivisionError on ``/`` or ``%`` by zero.
    """
    if op in _COMPARE:
        return _COMPARE[op](args[0], args[1])
    match op:
        case "&&":
            return bool(args[0]) and bool(args[1])
        case "||":
            return bool(args[0]) or bool(args[1])
        case "not":
            return not args[0]
    mask = operand.max_value - 1
    match op:
        case "~":
            return ~args[0] & mask
        case "<<":
            return _shift_left(args[0], args[1], operand.bits) & mask
        case ">>":
            return _shift_right(args[0], args[1], operand.bits)
    return _WORD_BINARY[op](args[0], args[1]) & mask
