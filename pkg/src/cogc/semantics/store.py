"""The update-semantics heap: a partial map from pointers to values."""

from __future__ import annotations

from collections.abc import Iterator
from typing import Any

from cogc.semantics.base import DanglingPointer, DoubleFree
from cogc.values import Ptr, Value, value_to_json


class Store:
    """Pointer-addressed cells with a monotone allocation counter; ids are never reused."""

    def __init__(self, cells: dict[int, Value] | None = None, next_id: int = 1) -> None:
        self._cells: dict[int, Value] = dict(cells or {})
        self._next = max(next_id, max(self._cells, default=0) + 1)

    def alloc(self, value: Value) -> Ptr:
        ptr = Ptr(self._next)
        self._next += 1
        self._cells[ptr.id] = value
        return ptr

    def free(self, ptr: Ptr) -> None:
        if ptr.id not in self._cells:
            raise DoubleFree(f"pointer {ptr.id} freed twice or never allocated")
        del self._cells[ptr.id]

    def lookup(self, ptr: Ptr) -> Value:
        try:
            return self._cells[ptr.id]
        except KeyError:
            raise DanglingPointer(f"pointer {ptr.id} is not allocated") from None

    def get(self, ptr: Ptr) -> Value | None:
        return self._cells.get(ptr.id)

    def update(self, ptr: Ptr, value: Value) -> None:
        if ptr.id not in self._cells:
            raise DanglingPointer(f"write through unallocated pointer {ptr.id}")
        self._cells[ptr.id] = value

    def copy(self) -> Store:
        return Store(self._cells, self._next)

    @property
    def next_id(self) -> int:
        return self._next

    def pointers(self) -> frozenset[Ptr]:
        return frozenset(Ptr(i) for i in self._cells)

    def __contains__(self, ptr: Ptr) -> bool:
        return ptr.id in self._cells

    def __iter__(self) -> Iterator[Ptr]:
        return (Ptr(i) for i in sorted(self._cells))

    def __len__(self) -> int:
        return len(self._cells)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Store) and self._cells == other._cells

    def to_json(self) -> dict[str, Any]:
        return {str(i): value_to_json(self._cells[i]) for i in sorted(self._cells)}
