"""Errors and fresh-name supply shared by the source-to-source passes."""

from __future__ import annotations

from collections.abc import Iterable

from cogc.errors import CogcError
from cogc.syntax import FunDef, Program, bound_names


class PassError(CogcError):
    code = "PassError"


class NameSupply:
    """Deterministic fresh names that avoid every name already in use."""

    def __init__(self, taken: Iterable[str] = ()) -> None:
        self.taken = set(taken)
        self.counter = 0
        self.issued = 0

    @classmethod
    def for_program(cls, program: Program) -> NameSupply:
        taken: set[str] = set()
        for d in program.defs:
            taken.add(d.name)
            if isinstance(d, FunDef):
                taken.add(d.param)
                taken |= bound_names(d.body)
        return cls(taken)

    def temp(self) -> str:
        """Next unused ``t<n>``."""
        while True:
            name = f"t{self.counter}"
            self.counter += 1
            if name not in self.taken:
                return self._issue(name)

    def primed(self, base: str) -> str:
        """``base'``, ``base''``, ... whichever is first unused."""
        name = base + "'"
        while name in self.taken:
            name += "'"
        return self._issue(name)

    def _issue(self, name: str) -> str:
        self.taken.add(name)
        self.issued += 1
        return name
