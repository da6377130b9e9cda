"""Runtime values shared by both semantics, environments, and their JSON forms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from cogc.parser import format_type
from cogc.syntax import CoreType, Expr, PrimType


@dataclass(frozen=True, slots=True)
class LitV:
    value: int | bool
    prim: PrimType


@dataclass(frozen=True, slots=True)
class UnitV:
    pass


@dataclass(frozen=True, slots=True)
class FunV:
    """Top-level function with its type arguments already substituted into ``body``."""

    param: str
    body: Expr
    origin: tuple[str, tuple[CoreType, ...]] | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class AbsFunV:
    name: str
    type_args: tuple[CoreType, ...] = ()


@dataclass(frozen=True, slots=True)
class ConV:
    ctor: str
    payload: Value


@dataclass(frozen=True, slots=True)
class RecordV:
    """Record contents; taken fields keep a slot whose value is ignored."""

    fields: tuple[tuple[str, Value], ...]

    def get(self, name: str) -> Value:
        for n, v in self.fields:
            if n == name:
                return v
        raise KeyError(name)

    def replace(self, name: str, value: Value) -> RecordV:
        return RecordV(tuple((n, value if n == name else v) for n, v in self.fields))


@dataclass(frozen=True, slots=True)
class AbstractV:
    """Value of an abstract type; ``payload`` is immutable JSON-like data owned by the FFI."""

    tag: str
    payload: Any


@dataclass(frozen=True, slots=True, order=True)
class Ptr:
    id: int


Value = LitV | UnitV | FunV | AbsFunV | ConV | RecordV | AbstractV | Ptr


class Environment:
    """Persistent variable environment; ``bind`` returns a new environment."""

    __slots__ = ("_name", "_parent", "_value")

    def __init__(
        self, name: str | None = None, value: Value | None = None, parent: Environment | None = None
    ) -> None:
        self._name = name
        self._value = value
        self._parent = parent

    @classmethod
    def of(cls, **bindings: Value) -> Environment:
        env = cls()
        for name, value in bindings.items():
            env = env.bind(name, value)
        return env

    def bind(self, name: str, value: Value) -> Environment:
        return Environment(name, value, self)

    def lookup(self, name: str) -> Value:
        env: Environment | None = self
        while env is not None and env._name is not None:
            if env._name == name:
                return env._value
            env = env._parent
        raise KeyError(name)

    def items(self) -> list[tuple[str, Value]]:
        """Visible bindings, innermost first."""
        seen: set[str] = set()
        out = []
        env: Environment | None = self
        while env is not None and env._name is not None:
            if env._name not in seen:
                seen.add(env._name)
                out.append((env._name, env._value))
            env = env._parent
        return out


def _plain(data: Any) -> Any:
    if isinstance(data, tuple | list):
        return [_plain(x) for x in data]
    return data


def value_to_json(value: Value) -> Any:
    """Shallow JSON form; pointers are printed by id, not followed."""
    match value:
        case LitV(v, prim):
            return {"lit": v, "ty": prim.value}
        case UnitV():
            return {"unit": True}
        case ConV(ctor, payload):
            return {"con": [ctor, value_to_json(payload)]}
        case RecordV(fields):
            return {"rec": {name: value_to_json(v) for name, v in fields}}
        case Ptr(pid):
            return {"ptr": pid}
        case AbstractV(tag, payload):
            return {"abs": tag, "data": _plain(payload)}
        case FunV(param, _, origin):
            name, targs = origin or ("<fn>", ())
            return {"fun": name, "args": [format_type(t) for t in targs], "param": param}
        case AbsFunV(name, targs):
            return {"absfun": name, "args": [format_type(t) for t in targs]}
    raise TypeError(f"not a value: {value!r}")
