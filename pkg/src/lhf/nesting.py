"""Nested LHFs: elements are ``(key, (child_index, ...))`` pairs.

Each position of the children tuple names a set inside the matching child
LHF.  Binary operations follow natural nesting: keys present on only one
side survive or vanish according to what the operation does to a lone key
against the empty set, and keys on both sides get their children combined
position by position inside the child LHFs.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Callable, Hashable, Iterable, Iterator, Sequence

from lhf import sortedops
from lhf.core import (
    BINARY_KINDS,
    EMPTY,
    LatticeHashForest,
    OpKind,
    ValidationError,
)

_key = itemgetter(0)

_SCALAR = {
    OpKind.UNION: sortedops.union,
    OpKind.INTERSECTION: sortedops.intersection,
    OpKind.DIFFERENCE: sortedops.difference,
}


def _survives_left(kind: OpKind) -> bool:
    return bool(_SCALAR[kind]((0,), ()))


def _survives_right(kind: OpKind) -> bool:
    return bool(_SCALAR[kind]((), (0,)))


Combiner = Callable[["NestedLHF", OpKind, tuple, tuple], tuple]


@dataclass(frozen=True)
class NestingRules:
    """How a nested LHF treats one-sided keys and common keys.

    ``combine`` replaces the default positional recursion into the child
    LHFs.  Any rule set other than :data:`NATURAL` gets memoization only:
    the empty, equal and subset shortcuts assume natural nesting.
    """

    left_survives: frozenset[OpKind]
    right_survives: frozenset[OpKind]
    commutative: frozenset[OpKind] = frozenset({OpKind.UNION, OpKind.INTERSECTION})
    combine: Combiner | None = None


NATURAL = NestingRules(
    left_survives=frozenset(k for k in BINARY_KINDS if _survives_left(k)),
    right_survives=frozenset(k for k in BINARY_KINDS if _survives_right(k)),
)


class NestedLHF(LatticeHashForest):
    """An LHF whose properties carry indices into child LHFs.

    With ``drop_all_empty`` (the default) an element whose children are all
    the empty set is not kept: operations drop it and :meth:`register`
    rejects it.  Turn it off to keep such elements, as the bare algebra
    would.
    """

    nested = True

    def __init__(
        self,
        children: Sequence[LatticeHashForest],
        *,
        drop_all_empty: bool = True,
        rules: NestingRules = NATURAL,
        check_input: bool = True,
        name: str | None = None,
    ) -> None:
        if not children:
            raise ValueError("a nested LHF needs at least one child LHF")
        super().__init__(check_input=check_input, name=name)
        self.children: tuple[LatticeHashForest, ...] = tuple(children)
        self.arity = len(self.children)
        self.drop_all_empty = drop_all_empty
        self.rules = rules
        self._all_empty = (EMPTY,) * self.arity

    def register(self, elements: Iterable) -> int:
        content = tuple((k, self._as_children(v)) for k, v in elements)
        if self.check_input:
            self._validate(content)
        return self._store(content)[0]

    def register_map(self, mapping: dict) -> int:
        return self.register(sorted(mapping.items(), key=_key))

    def _as_children(self, value) -> tuple:
        if isinstance(value, int):
            return (value,)
        return tuple(value)

    def _validate(self, content: tuple) -> None:
        prev = None
        for n, (k, vals) in enumerate(content):
            if n and not prev < k:
                raise ValidationError(f"keys must be strictly increasing: {prev!r} then {k!r}")
            prev = k
            self._validate_children(vals)

    def _validate_children(self, vals: tuple) -> None:
        if len(vals) != self.arity:
            raise ValidationError(f"expected {self.arity} child indices, got {len(vals)}")
        for child, v in zip(self.children, vals):
            child._check(v)
        if self.drop_all_empty and vals == self._all_empty:
            raise ValidationError("element with only empty children (drop_all_empty is on)")

    # -- ladder hooks -------------------------------------------------------

    def _commutative(self, kind: OpKind) -> bool:
        return kind in self.rules.commutative

    def _subset_shortcut(self, kind: OpKind) -> bool:
        # a ⊑ b  =>  a - b = ∅ needs the all-empty elements to be dropped
        return kind is not OpKind.DIFFERENCE or self.drop_all_empty

    def set_union(self, a: int, b: int) -> int:
        if self.rules is NATURAL:
            return super().set_union(a, b)
        return self._memo_only(OpKind.UNION, a, b)

    def set_intersection(self, a: int, b: int) -> int:
        if self.rules is NATURAL:
            return super().set_intersection(a, b)
        return self._memo_only(OpKind.INTERSECTION, a, b)

    def set_difference(self, a: int, b: int) -> int:
        if self.rules is NATURAL:
            return super().set_difference(a, b)
        return self._memo_only(OpKind.DIFFERENCE, a, b)

    def _memo_only(self, kind: OpKind, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        key = (b, a) if self._commutative(kind) and b < a else (a, b)
        r = self._memo[kind].get(key)
        if r is not None:
            self._stats[kind].hits += 1
            return r
        return self._compute(kind, key, a, b)

    def insert_element(self, a, p):
        raise TypeError("nested sets are updated with set_key_value / remove_key")

    remove_element = insert_element

    # -- raw computation ----------------------------------------------------

    def _combine(self, kind: OpKind, ca: tuple, cb: tuple) -> tuple:
        left = kind in self.rules.left_survives
        right = kind in self.rules.right_survives
        drop = self.drop_all_empty
        all_empty = self._all_empty
        out = []
        append = out.append
        i = j = 0
        na, nb = len(ca), len(cb)
        while i < na and j < nb:
            ea, eb = ca[i], cb[j]
            ka, kb = ea[0], eb[0]
            if ka < kb:
                if left:
                    append(ea)
                i += 1
            elif kb < ka:
                if right:
                    append(eb)
                j += 1
            else:
                vals = self._recurse(kind, ea[1], eb[1])
                if not (drop and vals == all_empty):
                    append((ka, vals))
                i += 1
                j += 1
        if left and i < na:
            out.extend(ca[i:])
        if right and j < nb:
            out.extend(cb[j:])
        return tuple(out)

    def _recurse(self, kind: OpKind, va: tuple, vb: tuple) -> tuple:
        if self.rules.combine is not None:
            return self.rules.combine(self, kind, va, vb)
        return tuple(child.operate(kind, x, y) for child, x, y in zip(self.children, va, vb))

    def _subset_raw(self, ca: tuple, cb: tuple) -> bool:
        """Pointwise order: every key of `ca` is in `cb` with smaller children."""
        if len(ca) > len(cb):
            return False
        j = 0
        nb = len(cb)
        for k, va in ca:
            while j < nb and cb[j][0] < k:
                j += 1
            if j == nb or cb[j][0] != k:
                return False
            vb = cb[j][1]
            if va != vb and not all(
                child.is_subset(x, y) for child, x, y in zip(self.children, va, vb)
            ):
                return False
            j += 1
        return True

    def _raw(self, kind: OpKind, operands: tuple) -> tuple:
        if kind is OpKind.UPDATE_KEY:
            a, k, vals = operands
            return self._with_key(self.access_or_recompute(a), k, vals)
        if kind is OpKind.REMOVE_KEY:
            a, k = operands
            return self._without_key(self.access_or_recompute(a), k)
        return super()._raw(kind, operands)

    def _with_key(self, content: tuple, k: Hashable, vals: tuple) -> tuple:
        if self.drop_all_empty and vals == self._all_empty:
            return self._without_key(content, k)
        pos = bisect_left(content, k, key=_key)
        if pos < len(content) and content[pos][0] == k:
            return content[:pos] + ((k, vals),) + content[pos + 1:]
        return content[:pos] + ((k, vals),) + content[pos:]

    def _without_key(self, content: tuple, k: Hashable) -> tuple:
        pos = bisect_left(content, k, key=_key)
        if pos < len(content) and content[pos][0] == k:
            return content[:pos] + content[pos + 1:]
        return content

    # -- element-level updates ---------------------------------------------

    def set_key_value(self, a: int, k: Hashable, children) -> int:
        """Strong update: the element keyed `k` gets exactly `children`."""
        self._check(a)
        vals = self._as_children(children)
        if self.check_input:
            if len(vals) != self.arity:
                raise ValidationError(f"expected {self.arity} child indices, got {len(vals)}")
            for child, v in zip(self.children, vals):
                child._check(v)
        st = self._stats[OpKind.UPDATE_KEY]
        key = (a, k, vals)
        r = self._memo[OpKind.UPDATE_KEY].get(key)
        if r is not None:
            st.hits += 1
            return r
        current = self.value_of(a, k)
        if current == vals or (current is None and self.drop_all_empty and vals == self._all_empty):
            st.equal_hits += 1
            return a
        return self._compute(OpKind.UPDATE_KEY, key, a, k, vals)

    def remove_key(self, a: int, k: Hashable) -> int:
        self._check(a)
        st = self._stats[OpKind.REMOVE_KEY]
        if a == EMPTY:
            st.empty_hits += 1
            return EMPTY
        key = (a, k)
        r = self._memo[OpKind.REMOVE_KEY].get(key)
        if r is not None:
            st.hits += 1
            return r
        if self.value_of(a, k) is None:
            st.equal_hits += 1
            return a
        c = self._compute(OpKind.REMOVE_KEY, key, a, k)
        self._add_subset(c, a)
        return c

    # -- queries ---------------------------------------------------------------

    def keys_of(self, a: int) -> tuple:
        return tuple(k for k, _ in self.access_or_recompute(a))

    def value_of(self, a: int, k: Hashable) -> tuple | None:
        content = self.access_or_recompute(a)
        pos = bisect_left(content, k, key=_key)
        if pos < len(content) and content[pos][0] == k:
            return content[pos][1]
        return None

    def as_dict(self, a: int) -> dict:
        return dict(self.access_or_recompute(a))


def construction(root: LatticeHashForest) -> list[LatticeHashForest]:
    """Every LHF reachable from `root`, each listed once, children first."""
    seen: dict[int, LatticeHashForest] = {}

    def visit(lhf: LatticeHashForest) -> None:
        if id(lhf) in seen:
            return
        for child in getattr(lhf, "children", ()):
            visit(child)
        seen[id(lhf)] = lhf

    visit(root)
    return list(seen.values())


def logical_size(root: LatticeHashForest) -> int:
    """Stored elements plus memo entries over a whole construction."""
    return sum(l.stored_elements() + l.memo_entries() for l in construction(root))
