"""LatticeHashForest for flat (non-nested) property sets.

Every distinct sorted tuple of properties is stored once and named by a
dense integer index; index 0 is always the empty set.  Binary operations
run through a fixed ladder of cheap checks before doing any real work:

1. an operand is the empty set,
2. both operands are the same index,
3. the operation map already holds the result,
4. a recorded subset relation decides the result,
5. compute with a linear merge, register the result, memoize it.

Each rung bumps one counter in :class:`KindStats`.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, fields
from typing import Any, Hashable, Iterable, Iterator

from lhf import sortedops
from lhf.dedup import Interner

EMPTY = 0


class OpKind(enum.Enum):
    UNION = "union"
    INTERSECTION = "intersection"
    DIFFERENCE = "difference"
    INSERT = "insert"
    REMOVE = "remove"
    UPDATE_KEY = "update_key"
    REMOVE_KEY = "remove_key"


BINARY_KINDS = (OpKind.UNION, OpKind.INTERSECTION, OpKind.DIFFERENCE)


class LHFError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(LHFError, ValueError):
    """Input to ``register`` is not sorted and duplicate free."""


class InvalidIndex(LHFError, IndexError):
    pass


class SetEvicted(LHFError):
    """``resolve`` was asked for a set whose content has been evicted."""


class UnrecoverableEviction(LHFError):
    """An evicted set has no recorded producing operation to replay."""


class EvictionError(LHFError):
    pass


@dataclass
class KindStats:
    hits: int = 0
    equal_hits: int = 0
    subset_hits: int = 0
    empty_hits: int = 0
    cold_misses: int = 0
    edge_misses: int = 0

    @property
    def invocations(self) -> int:
        return (self.hits + self.equal_hits + self.subset_hits
                + self.empty_hits + self.cold_misses + self.edge_misses)

    def copy(self) -> "KindStats":
        return KindStats(**{f.name: getattr(self, f.name) for f in fields(self)})

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


class OpStats(dict):
    """Snapshot of per-kind counters, ``OpKind -> KindStats``."""

    def total(self) -> KindStats:
        out = KindStats()
        for ks in self.values():
            for f in fields(ks):
                setattr(out, f.name, getattr(out, f.name) + getattr(ks, f.name))
        return out


def fingerprint(content: tuple) -> bytes:
    return hashlib.blake2b(repr(content).encode(), digest_size=16).digest()


class LatticeHashForest:
    """Deduplicating, operation-memoizing store of immutable property sets.

    Properties can be any totally ordered, hashable values; sets are passed
    in as sorted duplicate-free sequences.  With ``check_input`` on (the
    default) :meth:`register` rejects anything else.
    """

    nested = False

    def __init__(self, *, check_input: bool = True, name: str | None = None) -> None:
        self.check_input = check_input
        self.name = name
        self._sets: Interner[tuple] = Interner()
        self._sets.intern(())
        self._memo: dict[OpKind, dict[tuple, int]] = {kind: {} for kind in OpKind}
        self._subsets: set[tuple[int, int]] = set()
        # result index -> (kind, *operands); only for sets an operation created
        self._producers: dict[int, tuple] = {}
        # evicted sets, so re-registering equal content revives the old index
        self._tombstones: dict[int, list[int]] = {}
        self._evicted_fp: dict[int, bytes] = {}
        self._stats: dict[OpKind, KindStats] = {kind: KindStats() for kind in OpKind}

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<{type(self).__name__}{label} sets={self.count()}>"

    # -- registration and access -------------------------------------------

    def register(self, elements: Iterable) -> int:
        content = tuple(elements)
        if self.check_input:
            self._validate(content)
        return self._store(content)[0]

    def _validate(self, content: tuple) -> None:
        if not sortedops.is_strictly_sorted(content):
            raise ValidationError(f"elements must be strictly increasing: {content!r:.200}")

    def _store(self, content: tuple) -> tuple[int, bool]:
        idx = self._sets.lookup(content)
        if idx is not None:
            return idx, False
        if self._tombstones:
            idx = self._revive(content)
            if idx is not None:
                return idx, False
        return self._sets.intern_new(content)

    def _check(self, a: int) -> None:
        if not 0 <= a < len(self._sets):
            raise InvalidIndex(f"index {a} is not registered (count={len(self._sets)})")

    def resolve(self, a: int) -> tuple:
        self._check(a)
        if not self._sets.is_present(a):
            raise SetEvicted(f"set {a} is evicted; use access_or_recompute")
        return self._sets.resolve(a)

    __getitem__ = resolve

    def count(self) -> int:
        return len(self._sets)

    def __len__(self) -> int:
        return len(self._sets)

    def size_of(self, a: int) -> int:
        return len(self.access_or_recompute(a))

    def equal(self, a: int, b: int) -> bool:
        return a == b

    def contains(self, a: int, p: Hashable) -> bool:
        return sortedops.contains(self.access_or_recompute(a), p)

    def is_evicted(self, a: int) -> bool:
        self._check(a)
        return not self._sets.is_present(a)

    # -- the operation ladder ----------------------------------------------

    def _commutative(self, kind: OpKind) -> bool:
        return kind is OpKind.UNION or kind is OpKind.INTERSECTION

    def _subset_shortcut(self, kind: OpKind) -> bool:
        return True

    def set_union(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        st = self._stats[OpKind.UNION]
        if a == EMPTY or b == EMPTY:
            st.empty_hits += 1
            return b if a == EMPTY else a
        if a == b:
            st.equal_hits += 1
            return a
        key = (a, b) if a < b else (b, a)
        memo = self._memo[OpKind.UNION]
        r = memo.get(key)
        if r is not None:
            st.hits += 1
            return r
        if self._subset_shortcut(OpKind.UNION):
            if (a, b) in self._subsets:
                st.subset_hits += 1
                memo[key] = b
                return b
            if (b, a) in self._subsets:
                st.subset_hits += 1
                memo[key] = a
                return a
        c = self._compute(OpKind.UNION, key, a, b)
        self._add_subset(a, c)
        self._add_subset(b, c)
        return c

    def set_intersection(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        st = self._stats[OpKind.INTERSECTION]
        if a == EMPTY or b == EMPTY:
            st.empty_hits += 1
            return EMPTY
        if a == b:
            st.equal_hits += 1
            return a
        key = (a, b) if a < b else (b, a)
        memo = self._memo[OpKind.INTERSECTION]
        r = memo.get(key)
        if r is not None:
            st.hits += 1
            return r
        if self._subset_shortcut(OpKind.INTERSECTION):
            if (a, b) in self._subsets:
                st.subset_hits += 1
                memo[key] = a
                return a
            if (b, a) in self._subsets:
                st.subset_hits += 1
                memo[key] = b
                return b
        c = self._compute(OpKind.INTERSECTION, key, a, b)
        self._add_subset(c, a)
        self._add_subset(c, b)
        return c

    def set_difference(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        st = self._stats[OpKind.DIFFERENCE]
        if a == EMPTY:
            st.empty_hits += 1
            return EMPTY
        if b == EMPTY:
            st.empty_hits += 1
            return a
        if a == b and self._subset_shortcut(OpKind.DIFFERENCE):
            st.equal_hits += 1
            return EMPTY
        key = (a, b)
        memo = self._memo[OpKind.DIFFERENCE]
        r = memo.get(key)
        if r is not None:
            st.hits += 1
            return r
        if self._subset_shortcut(OpKind.DIFFERENCE) and (a, b) in self._subsets:
            st.subset_hits += 1
            memo[key] = EMPTY
            return EMPTY
        c = self._compute(OpKind.DIFFERENCE, key, a, b)
        self._add_subset(c, a)
        return c

    def operate(self, kind: OpKind, a: int, b: int) -> int:
        if kind is OpKind.UNION:
            return self.set_union(a, b)
        if kind is OpKind.INTERSECTION:
            return self.set_intersection(a, b)
        if kind is OpKind.DIFFERENCE:
            return self.set_difference(a, b)
        raise ValueError(f"{kind} is not a binary set operation")

    def insert_element(self, a: int, p: Hashable) -> int:
        self._check(a)
        st = self._stats[OpKind.INSERT]
        key = (a, p)
        r = self._memo[OpKind.INSERT].get(key)
        if r is not None:
            st.hits += 1
            return r
        if a != EMPTY and sortedops.contains(self.access_or_recompute(a), p):
            st.equal_hits += 1
            return a
        c = self._compute(OpKind.INSERT, key, a, p)
        self._add_subset(a, c)
        return c

    def remove_element(self, a: int, p: Hashable) -> int:
        self._check(a)
        st = self._stats[OpKind.REMOVE]
        if a == EMPTY:
            st.empty_hits += 1
            return EMPTY
        key = (a, p)
        r = self._memo[OpKind.REMOVE].get(key)
        if r is not None:
            st.hits += 1
            return r
        if not sortedops.contains(self.access_or_recompute(a), p):
            st.equal_hits += 1
            return a
        c = self._compute(OpKind.REMOVE, key, a, p)
        self._add_subset(c, a)
        return c

    def is_subset(self, a: int, b: int) -> bool:
        """True iff set `a` is contained in set `b`."""
        self._check(a)
        self._check(b)
        if a == EMPTY or a == b:
            return True
        if b == EMPTY:
            return False
        if (a, b) in self._subsets:
            return True
        if self._subset_raw(self.access_or_recompute(a), self.access_or_recompute(b)):
            self._subsets.add((a, b))
            return True
        return False

    def _compute(self, kind: OpKind, key: tuple, *operands: Any) -> int:
        content = self._raw(kind, operands)
        c, fresh = self._store(content)
        st = self._stats[kind]
        if fresh:
            st.cold_misses += 1
            self._producers[c] = (kind, *operands)
        else:
            st.edge_misses += 1
        self._memo[kind][key] = c
        return c

    def _add_subset(self, sub: int, sup: int) -> None:
        if sub != sup and sub != EMPTY:
            self._subsets.add((sub, sup))

    # -- raw computation (no memo, no stats) --------------------------------

    def _raw(self, kind: OpKind, operands: tuple) -> tuple:
        if kind in BINARY_KINDS:
            a, b = operands
            return self._combine(kind, self.access_or_recompute(a), self.access_or_recompute(b))
        if kind is OpKind.INSERT:
            a, p = operands
            return sortedops.insert(self.access_or_recompute(a), p)
        if kind is OpKind.REMOVE:
            a, p = operands
            return sortedops.remove(self.access_or_recompute(a), p)
        raise ValueError(f"{type(self).__name__} cannot replay {kind}")

    def _combine(self, kind: OpKind, ca: tuple, cb: tuple) -> tuple:
        if kind is OpKind.UNION:
            return sortedops.union(ca, cb)
        if kind is OpKind.INTERSECTION:
            return sortedops.intersection(ca, cb)
        return sortedops.difference(ca, cb)

    def _subset_raw(self, ca: tuple, cb: tuple) -> bool:
        return sortedops.is_subset(ca, cb)

    # -- eviction ------------------------------------------------------------

    def evict(self, a: int) -> None:
        """Drop the stored content of `a`; the index stays reserved.

        The caller must not hold on to tuples obtained for `a`.  Memo edges
        that mention `a` are kept, and the content is rebuilt on access.
        """
        self._check(a)
        if a == EMPTY:
            raise EvictionError("the empty set cannot be evicted")
        if not self._sets.is_present(a):
            return
        content = self._sets.drop(a)
        self._tombstones.setdefault(hash(content), []).append(a)
        self._evicted_fp[a] = fingerprint(content)

    def access_or_recompute(self, a: int) -> tuple:
        self._check(a)
        if self._sets.is_present(a):
            return self._sets.resolve(a)
        producer = self._producers.get(a)
        if producer is None:
            raise UnrecoverableEviction(f"set {a} was registered directly and has been evicted")
        content = self._raw(producer[0], producer[1:])
        self._bury(a, content)
        self._sets.restore(a, content)
        return content

    def _revive(self, content: tuple) -> int | None:
        candidates = self._tombstones.get(hash(content))
        if not candidates:
            return None
        fp = fingerprint(content)
        for idx in candidates:
            if self._evicted_fp[idx] == fp:
                self._bury(idx, content)
                self._sets.restore(idx, content)
                return idx
        return None

    def _bury(self, idx: int, content: tuple) -> None:
        h = hash(content)
        candidates = self._tombstones[h]
        candidates.remove(idx)
        if not candidates:
            del self._tombstones[h]
        del self._evicted_fp[idx]

    # -- introspection -------------------------------------------------------

    def stats(self) -> OpStats:
        return OpStats((kind, ks.copy()) for kind, ks in self._stats.items())

    def memo_entries(self) -> int:
        return sum(len(m) for m in self._memo.values())

    def memo_edges(self) -> Iterator[tuple[OpKind, tuple, int]]:
        for kind, memo in self._memo.items():
            for key, r in memo.items():
                yield kind, key, r

    def subset_pairs(self) -> Iterator[tuple[int, int]]:
        return iter(self._subsets)

    def stored_elements(self) -> int:
        return sum(len(s) for s in self._sets if s is not None)

    def indices(self) -> range:
        return range(len(self._sets))
