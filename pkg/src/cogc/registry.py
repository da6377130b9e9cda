"""FFI registry -- maps abstract type and function names to their paired semantics."""

from __future__ import annotations

import logging
import random
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from cogc.errors import CogcError
from cogc.kinding import subst_type
from cogc.syntax import AbsFunDecl, CoreType, Mode, PolyType, Program, TVar

if TYPE_CHECKING:
    from cogc.semantics.store import Store
    from cogc.semantics.update import UpdateInterpreter
    from cogc.semantics.value import ValueInterpreter
    from cogc.values import AbstractV, Ptr, Value

logger = logging.getLogger("cogc.registry")

CorrSets = tuple[frozenset["Ptr"], frozenset["Ptr"]]


class FFIError(CogcError):
    code = "FFIError"


class DuplicateRegistration(FFIError):
    code = "DuplicateRegistration"


class UnknownAbstract(FFIError):
    code = "UnknownAbstract"


class SignatureMismatch(FFIError):
    code = "SignatureMismatch"


class CorrFailure(Exception):
    """Raised by an abstract type's correspondence rule when its values do not relate."""

    def __init__(self, rule: str, reason: str) -> None:
        self.rule = rule
        self.reason = reason
        super().__init__(f"{rule}: {reason}")


# corr(a_u, store, a_v, type_args, mode) -> (read-only, writable) pointers owned by the
# payload. Either side may be None when only one semantics is being checked.
CorrRule = Callable[
    ["AbstractV | None", "Store | None", "AbstractV | None", tuple[CoreType, ...], Mode],
    CorrSets,
]


@dataclass(frozen=True)
class AbstractTypeSpec:
    name: str
    arity: int
    corr: CorrRule
    zero: Callable[[tuple[CoreType, ...]], AbstractV]
    from_json: Callable[[Any, tuple[CoreType, ...]], AbstractV]
    random_json: Callable[[tuple[CoreType, ...], random.Random], Any]


@dataclass(frozen=True)
class AbstractFnSpec:
    """Paired implementations; ``impl_u`` may read and write the store it is handed."""

    name: str
    signature: PolyType
    impl_v: Callable[[ValueInterpreter, tuple[CoreType, ...], Value], Value]
    impl_u: Callable[[UpdateInterpreter, tuple[CoreType, ...], Value, Store], Value]


class FFIRegistry:
    """Central registry of abstract types and functions; read-only once evaluation starts."""

    def __init__(self) -> None:
        self._types: dict[str, AbstractTypeSpec] = {}
        self._functions: dict[str, AbstractFnSpec] = {}

    def register_type(self, spec: AbstractTypeSpec) -> None:
        if spec.name in self._types:
            raise DuplicateRegistration(f"abstract type '{spec.name}' is already registered")
        self._types[spec.name] = spec

    def register_fn(self, spec: AbstractFnSpec) -> None:
        if spec.name in self._functions:
            raise DuplicateRegistration(f"abstract function '{spec.name}' is already registered")
        self._functions[spec.name] = spec

    def lookup(self, name: str) -> AbstractTypeSpec | AbstractFnSpec:
        """Return the type or function registered under ``name``."""
        spec = self._types.get(name) or self._functions.get(name)
        if spec is None:
            raise UnknownAbstract(f"nothing registered under '{name}'")
        return spec

    def find_type(self, name: str) -> AbstractTypeSpec | None:
        return self._types.get(name)

    def find_function(self, name: str) -> AbstractFnSpec | None:
        return self._functions.get(name)

    def abstract_type(self, name: str) -> AbstractTypeSpec:
        spec = self._types.get(name)
        if spec is None:
            raise UnknownAbstract(f"abstract type '{name}' is not registered")
        return spec

    def all_types(self) -> list[AbstractTypeSpec]:
        return list(self._types.values())

    def all_functions(self) -> list[AbstractFnSpec]:
        return list(self._functions.values())

    def validate_program(self, program: Program) -> None:
        """Check each abstract declaration against the registered signature, if any."""
        for d in program.defs:
            if not isinstance(d, AbsFunDecl):
                continue
            spec = self._functions.get(d.ffi_name)
            if spec is None:
                logger.debug("no implementation for abstract function '%s'", d.ffi_name)
                continue
            if d.origin is None and not same_signature(d.signature, spec.signature):
                raise SignatureMismatch(
                    f"'{d.name}' is declared with a signature different from the "
                    f"registered implementation",
                    d.span,
                )


def same_signature(a: PolyType, b: PolyType) -> bool:
    """Alpha-equivalence of two type schemes."""
    if len(a.binders) != len(b.binders):
        return False
    if [k for _, k in a.binders] != [k for _, k in b.binders]:
        return False
    renaming = {
        name: TVar(other) for (name, _), (other, _) in zip(a.binders, b.binders, strict=True)
    }
    return subst_type(a.body, renaming) == b.body


def build_registry(
    types: Iterable[AbstractTypeSpec], functions: Iterable[AbstractFnSpec]
) -> FFIRegistry:
    """Build an FFIRegistry; raises DuplicateRegistration on repeated names."""
    registry = FFIRegistry()
    for t in types:
        registry.register_type(t)
    for f in functions:
        registry.register_fn(f)
    return registry
