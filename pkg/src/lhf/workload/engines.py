"""Execute instruction streams on the LHF or on a plain naive engine.

Both engines produce the same digest: one ``(position, hash)`` pair per
corpus entry, where the hash is a 64-bit BLAKE2b of a canonical encoding
of the entry's content.  Equal digests mean equal results, entry by
entry.

Only registration and set operations are timed; hashing for the digest
is not.
"""

from __future__ import annotations

import hashlib
from array import array
from dataclasses import dataclass, field
from time import perf_counter_ns
from typing import Any

from lhf.core import LatticeHashForest, OpKind, OpStats
from lhf.nesting import NestedLHF, construction, logical_size
from lhf.workload.instructions import Grow, Op, Reg, RegPt, Workload

TIMED_KINDS = ("register", "union", "intersection", "difference")


def scalar_hash(elements: tuple) -> str:
    return hashlib.blake2b(b"S" + array("Q", elements).tobytes(), digest_size=8).hexdigest()


def pointsto_hash(pairs) -> str:
    flat = array("Q", [len(pairs)])
    for k, pointees in pairs:
        flat.append(k)
        flat.append(len(pointees))
        flat.extend(pointees)
    return hashlib.blake2b(b"P" + flat.tobytes(), digest_size=8).hexdigest()


# -- naive engines: plain containers, every result materialized ------------

class NaiveScalar:
    name = "naive"

    def register(self, elements: tuple) -> tuple:
        return tuple(elements)

    def operate(self, kind: OpKind, a: tuple, b: tuple) -> tuple:
        if kind is OpKind.UNION:
            return tuple(sorted(set(a).union(b)))
        if kind is OpKind.INTERSECTION:
            sb = set(b)
            return tuple([x for x in a if x in sb])
        sb = set(b)
        return tuple([x for x in a if x not in sb])

    def digest_of(self, h: tuple) -> str:
        return scalar_hash(h)

    def size(self, h: tuple) -> int:
        return len(h)


class NaivePointsTo:
    """Points-to sets as sorted ``(pointer, pointees)`` tuples built via dicts."""

    name = "naive"

    def register(self, pairs: tuple) -> tuple:
        return tuple((k, tuple(p)) for k, p in pairs if p)

    def operate(self, kind: OpKind, a: tuple, b: tuple) -> tuple:
        da, db = dict(a), dict(b)
        out = {}
        if kind is OpKind.UNION:
            out.update(da)
            for k, pb in db.items():
                pa = da.get(k)
                out[k] = pb if pa is None else tuple(sorted(set(pa).union(pb)))
        elif kind is OpKind.INTERSECTION:
            for k, pa in da.items():
                pb = db.get(k)
                if pb is not None:
                    s = set(pb)
                    common = tuple([x for x in pa if x in s])
                    if common:
                        out[k] = common
        else:
            for k, pa in da.items():
                pb = db.get(k)
                if pb is None:
                    out[k] = pa
                else:
                    s = set(pb)
                    rest = tuple([x for x in pa if x not in s])
                    if rest:
                        out[k] = rest
        return tuple(sorted(out.items()))

    def digest_of(self, h: tuple) -> str:
        return pointsto_hash(h)

    def size(self, h: tuple) -> int:
        return sum(1 + len(p) for _, p in h)


# -- LHF engines --------------------------------------------------------------

class LhfScalar:
    name = "lhf"

    def __init__(self) -> None:
        self.lhf = LatticeHashForest(check_input=False, name="sets")
        self._digests: dict[int, str] = {}

    @property
    def root(self) -> LatticeHashForest:
        return self.lhf

    def register(self, elements: tuple) -> int:
        return self.lhf.register(elements)

    def operate(self, kind: OpKind, a: int, b: int) -> int:
        return self.lhf.operate(kind, a, b)

    def digest_of(self, h: int) -> str:
        d = self._digests.get(h)
        if d is None:
            d = self._digests[h] = scalar_hash(self.lhf.access_or_recompute(h))
        return d

    def size(self, h: int) -> int:
        return self.lhf.size_of(h)


class LhfPointsTo:
    name = "lhf"

    def __init__(self) -> None:
        self.pointees = LatticeHashForest(check_input=False, name="pointees")
        self.pts = NestedLHF([self.pointees], check_input=False, name="points-to")
        self._digests: dict[int, str] = {}

    @property
    def root(self) -> LatticeHashForest:
        return self.pts

    def register(self, pairs: tuple) -> int:
        reg = self.pointees.register
        return self.pts.register([(k, (reg(p),)) for k, p in pairs if p])

    def operate(self, kind: OpKind, a: int, b: int) -> int:
        return self.pts.operate(kind, a, b)

    def materialize(self, h: int) -> tuple:
        get = self.pointees.access_or_recompute
        return tuple((k, get(v[0])) for k, v in self.pts.access_or_recompute(h))

    def digest_of(self, h: int) -> str:
        d = self._digests.get(h)
        if d is None:
            d = self._digests[h] = pointsto_hash(self.materialize(h))
        return d

    def size(self, h: int) -> int:
        return sum(1 + len(p) for _, p in self.materialize(h))


ENGINES = {
    ("naive", "scalar"): NaiveScalar,
    ("naive", "pointsto"): NaivePointsTo,
    ("lhf", "scalar"): LhfScalar,
    ("lhf", "pointsto"): LhfPointsTo,
}


@dataclass
class RunResult:
    engine: str
    target: str
    digest: list[tuple[int, str]] = field(default_factory=list)
    op_ns: dict[str, int] = field(default_factory=lambda: dict.fromkeys(TIMED_KINDS, 0))
    invocations: dict[str, int] = field(default_factory=lambda: dict.fromkeys(TIMED_KINDS, 0))
    # summed size of every corpus entry produced, as if each were its own copy
    materialized_elements: int = 0
    distinct_results: int = 0
    sets_registered: int = 0
    memo_entries: int = 0
    stored_elements: int = 0
    logical_size: int = 0
    stats: OpStats | None = None
    # OP step number -> registered-set count just after it (when tracked)
    growth: list[int] | None = None

    @property
    def total_ns(self) -> int:
        return sum(self.op_ns.values())

    @property
    def logical_bytes(self) -> int:
        # 8 bytes per stored element, 24 per memo entry (two operands, result)
        if self.engine == "naive":
            return 8 * self.materialized_elements
        return 8 * self.stored_elements + 24 * self.memo_entries


def _referenced(wl: Workload) -> bytearray:
    """Mark corpus positions that a later instruction reads."""
    n = 0
    marks = bytearray()
    for ins in wl.instructions:
        if isinstance(ins, Op):
            marks[ins.i] = 1
            marks[ins.j] = 1
            marks.append(0)
            n += 1
        elif isinstance(ins, Grow):
            for p in range(ins.src, ins.src + ins.length):
                marks[p] = 1
            marks.extend(b"\0" * ins.length)
            n += ins.length
        else:
            marks.append(0)
            n += 1
    return marks


def run(wl: Workload, engine: str, *, track_growth: bool = False) -> RunResult:
    target = wl.target
    try:
        eng: Any = ENGINES[engine, target]()
    except KeyError:
        raise ValueError(f"no engine {engine!r} for target {target!r}") from None
    res = RunResult(engine=engine, target=target)
    keep = _referenced(wl)
    corpus: list = [None] * len(keep)
    digest = res.digest
    op_ns = res.op_ns
    inv = res.invocations
    result_hashes: set[str] = set()
    growth: list[int] | None = [] if track_growth else None
    count = getattr(getattr(eng, "root", None), "count", None)
    pos = 0
    materialized = 0
    expected_reg = RegPt if target == "pointsto" else Reg
    for ins in wl.instructions:
        if isinstance(ins, Op):
            kind = ins.kind
            a, b = corpus[ins.i], corpus[ins.j]
            t0 = perf_counter_ns()
            h = eng.operate(kind, a, b)
            op_ns[kind.value] += perf_counter_ns() - t0
            inv[kind.value] += 1
            d = eng.digest_of(h)
            result_hashes.add(d)
            if growth is not None and count is not None:
                growth.append(count())
        elif isinstance(ins, Grow):
            for p in range(ins.src, ins.src + ins.length):
                h = corpus[p]
                if keep[pos]:
                    corpus[pos] = h
                digest.append((pos, eng.digest_of(h)))
                materialized += eng.size(h)
                pos += 1
            continue
        else:
            if not isinstance(ins, expected_reg):
                raise ValueError(f"{type(ins).__name__} in a {target} workload")
            payload = ins.elements if target == "scalar" else ins.pairs
            t0 = perf_counter_ns()
            h = eng.register(payload)
            op_ns["register"] += perf_counter_ns() - t0
            inv["register"] += 1
            d = eng.digest_of(h)
        if keep[pos]:
            corpus[pos] = h
        digest.append((pos, d))
        materialized += eng.size(h)
        pos += 1
    res.materialized_elements = materialized
    res.distinct_results = len(result_hashes)
    res.growth = growth
    if engine == "lhf":
        root = eng.root
        lhfs = construction(root)
        res.sets_registered = sum(l.count() for l in lhfs)
        res.memo_entries = sum(l.memo_entries() for l in lhfs)
        res.logical_size = logical_size(root)
        res.stored_elements = sum(l.stored_elements() for l in lhfs)
        res.stats = root.stats()
    else:
        res.sets_registered = pos
        res.stored_elements = materialized
        res.logical_size = materialized
    return res


def run_naive(wl: Workload) -> RunResult:
    return run(wl, "naive")


def run_lhf(wl: Workload, *, track_growth: bool = False) -> RunResult:
    return run(wl, "lhf", track_growth=track_growth)


def write_digest(digest: list[tuple[int, str]], path) -> None:
    with open(path, "w") as fh:
        for pos, h in digest:
            fh.write(f"{pos} {h}\n")


def read_digest(path) -> list[tuple[int, str]]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                pos, h = line.split()
                out.append((int(pos), h))
    return out


def first_divergence(a: list[tuple[int, str]], b: list[tuple[int, str]]) -> int | None:
    """Position of the first differing entry, or None when digests agree."""
    for (pa, ha), (pb, hb) in zip(a, b):
        if pa != pb or ha != hb:
            return min(pa, pb)
    if len(a) != len(b):
        shorter = a if len(a) < len(b) else b
        return shorter[-1][0] + 1 if shorter else 0
    return None
