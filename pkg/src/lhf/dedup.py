"""Generic interning engine: unique immutable values <-> dense integer ids."""

from __future__ import annotations

from typing import Generic, Hashable, Iterator, TypeVar

V = TypeVar("V", bound=Hashable)


class UnknownIdentifier(IndexError):
    """Raised when an identifier was never handed out by the interner."""


class Interner(Generic[V]):
    """Append-only store mapping each distinct value to a dense identifier.

    The reverse dictionary keys are the very objects held in storage, so a
    value is kept once no matter how large it is.  Identifiers are never
    reused or re-keyed.

    Slots can be emptied with :meth:`drop` and filled again with
    :meth:`restore`; callers one level up use that for eviction.  A dropped
    slot keeps its identifier but no longer answers :meth:`lookup`.
    """

    __slots__ = ("_storage", "_reverse")

    def __init__(self) -> None:
        self._storage: list[V | None] = []
        self._reverse: dict[V, int] = {}

    def intern(self, value: V) -> int:
        ident = self._reverse.get(value)
        if ident is None:
            ident = len(self._storage)
            self._storage.append(value)
            self._reverse[value] = ident
        return ident

    def intern_new(self, value: V) -> tuple[int, bool]:
        """Like :meth:`intern` but also report whether the value was fresh."""
        ident = self._reverse.get(value)
        if ident is not None:
            return ident, False
        ident = len(self._storage)
        self._storage.append(value)
        self._reverse[value] = ident
        return ident, True

    def lookup(self, value: V) -> int | None:
        return self._reverse.get(value)

    def resolve(self, ident: int) -> V:
        if not 0 <= ident < len(self._storage):
            raise UnknownIdentifier(f"identifier {ident} out of range [0, {len(self._storage)})")
        value = self._storage[ident]
        if value is None:
            raise UnknownIdentifier(f"identifier {ident} has been dropped")
        return value

    def is_present(self, ident: int) -> bool:
        return 0 <= ident < len(self._storage) and self._storage[ident] is not None

    def drop(self, ident: int) -> V:
        """Empty the slot for `ident`, returning the value that was there."""
        value = self.resolve(ident)
        del self._reverse[value]
        self._storage[ident] = None
        return value

    def restore(self, ident: int, value: V) -> None:
        if not 0 <= ident < len(self._storage):
            raise UnknownIdentifier(f"identifier {ident} out of range")
        if self._storage[ident] is not None:
            raise ValueError(f"identifier {ident} is occupied")
        if value in self._reverse:
            raise ValueError(f"value already interned as {self._reverse[value]}")
        self._storage[ident] = value
        self._reverse[value] = ident

    def count(self) -> int:
        return len(self._storage)

    def __len__(self) -> int:
        return len(self._storage)

    def __contains__(self, value: object) -> bool:
        return value in self._reverse

    def __iter__(self) -> Iterator[V | None]:
        return iter(self._storage)
