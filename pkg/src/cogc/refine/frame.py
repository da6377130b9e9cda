"""Framing: how an evaluation may change the store."""

from __future__ import annotations

import enum
from collections.abc import Iterable
from dataclasses import dataclass

from cogc.semantics.store import Store
from cogc.values import Ptr


class FrameRule(enum.Enum):
    INERTIA = "Inertia"
    LEAK_FREEDOM = "LeakFreedom"
    FRESH_ALLOCATION = "FreshAllocation"


@dataclass(frozen=True, slots=True)
class FrameViolation:
    ptr: Ptr
    rule: FrameRule

    def to_json(self) -> dict[str, object]:
        return {"rule": self.rule.value, "ptr": self.ptr.id}

    def __str__(self) -> str:
        return f"{self.rule.value}({self.ptr.id})"


def frame_check(
    w_in: Iterable[Ptr], store_in: Store, w_out: Iterable[Ptr], store_out: Store
) -> list[FrameViolation]:
    """Violations of the framing contract, ordered by pointer.

    Pointers outside both writable sets keep their contents; writable inputs that do not
    come back are freed; writable outputs that were not inputs are fresh.
    """
    w_in, w_out = frozenset(w_in), frozenset(w_out)
    universe = store_in.pointers() | store_out.pointers() | w_in | w_out
    violations = []
    for p in sorted(universe):
        if p not in w_in and p not in w_out:
            if store_in.get(p) != store_out.get(p):
                violations.append(FrameViolation(p, FrameRule.INERTIA))
        elif p in w_in and p not in w_out:
            if p in store_out:
                violations.append(FrameViolation(p, FrameRule.LEAK_FREEDOM))
        elif p not in w_in and p in store_in:
            violations.append(FrameViolation(p, FrameRule.FRESH_ALLOCATION))
    return violations
