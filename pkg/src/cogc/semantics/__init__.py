"""Value and update big-step semantics."""

from cogc.semantics.base import (
    DEFAULT_FUEL,
    DanglingPointer,
    DivisionByZero,
    DoubleFree,
    EvalError,
    EvalObserver,
    FuelExhausted,
    MissingAbstractImpl,
    StuckError,
)
from cogc.semantics.store import Store
from cogc.semantics.update import UpdateInterpreter, apply_fn_u, eval_u
from cogc.semantics.value import ValueInterpreter, apply_fn_v, eval_v

__all__ = [
    "DEFAULT_FUEL",
    "DanglingPointer",
    "DivisionByZero",
    "DoubleFree",
    "EvalError",
    "EvalObserver",
    "FuelExhausted",
    "MissingAbstractImpl",
    "Store",
    "StuckError",
    "UpdateInterpreter",
    "ValueInterpreter",
    "apply_fn_u",
    "apply_fn_v",
    "eval_u",
    "eval_v",
]
