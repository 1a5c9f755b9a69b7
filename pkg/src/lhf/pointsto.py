"""Flow-sensitive intraprocedural points-to analysis on top of LHF.

Pointee sets live in a flat LHF over variable ids; points-to sets live in
a nested LHF keyed by pointer whose single child is that pointee LHF.
Live-variable sets are the same kind of data as pointee sets, so they are
stored in the very same LHF instance.

CFG text format::

    # comment
    block1:
        p1 = &a
    block2:
    block3:
        p1 = &b
    block4:
    block1 -> block2
    block2 -> block3
    block2 -> block4
    block3 -> block4
    entry block1        # optional, defaults to the first block

Statements are ``p = &x``, ``p = q``, ``p = *q`` and ``*p = q``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Union

from lhf.core import EMPTY, LatticeHashForest
from lhf.dedup import Interner
from lhf.nesting import NestedLHF


@dataclass(frozen=True)
class AddrOf:
    """``p = &x``"""
    p: str
    x: str


@dataclass(frozen=True)
class Copy:
    """``p = q``"""
    p: str
    q: str


@dataclass(frozen=True)
class Load:
    """``p = *q``"""
    p: str
    q: str


@dataclass(frozen=True)
class Store:
    """``*p = q``"""
    p: str
    q: str


Stmt = Union[AddrOf, Copy, Load, Store]


class CfgError(ValueError):
    pass


@dataclass
class Cfg:
    blocks: dict[str, list[Stmt]] = field(default_factory=dict)
    edges: list[tuple[str, str]] = field(default_factory=list)
    entry: str | None = None

    def add_block(self, name: str, stmts: Iterable[Stmt] = ()) -> None:
        if name in self.blocks:
            raise CfgError(f"duplicate block {name!r}")
        self.blocks[name] = list(stmts)
        if self.entry is None:
            self.entry = name

    def add_edge(self, src: str, dst: str) -> None:
        self.edges.append((src, dst))

    def successors(self) -> dict[str, list[str]]:
        succ: dict[str, list[str]] = {b: [] for b in self.blocks}
        for s, d in self.edges:
            succ[s].append(d)
        return succ

    def predecessors(self) -> dict[str, list[str]]:
        pred: dict[str, list[str]] = {b: [] for b in self.blocks}
        for s, d in self.edges:
            pred[d].append(s)
        return pred

    def validate(self) -> None:
        if not self.blocks:
            raise CfgError("CFG has no blocks")
        if self.entry not in self.blocks:
            raise CfgError(f"entry block {self.entry!r} is not defined")
        for s, d in self.edges:
            for b in (s, d):
                if b not in self.blocks:
                    raise CfgError(f"edge mentions unknown block {b!r}")
        succ = self.successors()
        seen = {self.entry}
        todo = [self.entry]
        while todo:
            for nxt in succ[todo.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        missing = [b for b in self.blocks if b not in seen]
        if missing:
            raise CfgError(f"blocks unreachable from entry: {', '.join(missing)}")


_NAME = r"[A-Za-z_][A-Za-z0-9_.]*"
_STMTS = [
    (re.compile(rf"^({_NAME})\s*=\s*&\s*({_NAME})$"), AddrOf),
    (re.compile(rf"^({_NAME})\s*=\s*\*\s*({_NAME})$"), Load),
    (re.compile(rf"^\*\s*({_NAME})\s*=\s*({_NAME})$"), Store),
    (re.compile(rf"^({_NAME})\s*=\s*({_NAME})$"), Copy),
]
_BLOCK = re.compile(rf"^({_NAME}):$")
_EDGE = re.compile(rf"^({_NAME})\s*->\s*({_NAME})$")
_ENTRY = re.compile(rf"^entry\s+({_NAME})$")


def parse_stmt(text: str) -> Stmt:
    text = text.strip()
    for pattern, cls in _STMTS:
        m = pattern.match(text)
        if m:
            return cls(*m.groups())
    raise CfgError(f"cannot parse statement {text!r}")


def parse_cfg(text: str) -> Cfg:
    cfg = Cfg()
    current: str | None = None
    entry = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if m := _BLOCK.match(line):
                current = m.group(1)
                cfg.add_block(current)
            elif m := _EDGE.match(line):
                cfg.add_edge(*m.groups())
            elif m := _ENTRY.match(line):
                entry = m.group(1)
            else:
                if current is None:
                    raise CfgError("statement outside of a block")
                cfg.blocks[current].append(parse_stmt(line))
        except CfgError as exc:
            raise CfgError(f"line {lineno}: {exc}") from None
    if entry is not None:
        cfg.entry = entry
    cfg.validate()
    return cfg


class PtaConstruction:
    """The two-level LHF construction used by the analysis."""

    def __init__(self) -> None:
        self.vars: Interner[str] = Interner()
        self.pointee_lhf = LatticeHashForest(name="pointees")
        self.pts_lhf = NestedLHF([self.pointee_lhf], name="points-to")
        self.live_lhf = self.pointee_lhf

    def var(self, name: str) -> int:
        return self.vars.intern(name)

    def var_name(self, ident: int) -> str:
        return self.vars.resolve(ident)

    def pointee_set(self, names: Iterable[str]) -> int:
        return self.pointee_lhf.register(sorted({self.var(n) for n in names}))

    def live_set(self, names: Iterable[str]) -> int:
        return self.live_lhf.register(sorted({self.var(n) for n in names}))

    def points_to(self, mapping: dict[str, Iterable[str]]) -> int:
        """Register ``{pointer: pointees}`` given by variable names."""
        elements = {}
        for ptr, names in mapping.items():
            child = self.pointee_set(names)
            if child != EMPTY:
                elements[self.var(ptr)] = (child,)
        return self.pts_lhf.register_map(elements)

    def pointees(self, pts: int, p: int) -> int:
        v = self.pts_lhf.value_of(pts, p)
        return EMPTY if v is None else v[0]

    def transfer(self, stmt: Stmt, pts: int) -> int:
        L = self.pts_lhf
        if isinstance(stmt, AddrOf):
            return L.set_key_value(pts, self.var(stmt.p), (self.pointee_lhf.register((self.var(stmt.x),)),))
        if isinstance(stmt, Copy):
            q = self.pointees(pts, self.var(stmt.q))
            return L.set_key_value(pts, self.var(stmt.p), (q,))
        if isinstance(stmt, Load):
            acc = EMPTY
            for r in self.pointee_lhf.access_or_recompute(self.pointees(pts, self.var(stmt.q))):
                acc = self.pointee_lhf.set_union(acc, self.pointees(pts, r))
            return L.set_key_value(pts, self.var(stmt.p), (acc,))
        if isinstance(stmt, Store):
            targets = self.pointee_lhf.access_or_recompute(self.pointees(pts, self.var(stmt.p)))
            q = self.pointees(pts, self.var(stmt.q))
            if len(targets) == 1:
                return L.set_key_value(pts, targets[0], (q,))
            out = pts
            for r in targets:
                merged = self.pointee_lhf.set_union(self.pointees(pts, r), q)
                out = L.set_key_value(out, r, (merged,))
            return out
        raise TypeError(f"not a statement: {stmt!r}")

    def merge(self, a: int, b: int) -> int:
        return self.pts_lhf.set_union(a, b)

    def as_names(self, pts: int) -> dict[str, list[str]]:
        get = self.pointee_lhf.access_or_recompute
        return {
            self.var_name(k): [self.var_name(x) for x in get(v[0])]
            for k, v in self.pts_lhf.access_or_recompute(pts)
        }

    def format(self, pts: int) -> str:
        items = self.as_names(pts)
        if not items:
            return "{}"
        return "; ".join(f"{p} -> {{{', '.join(xs)}}}" for p, xs in items.items())


@dataclass
class BlockFacts:
    inp: int
    out: int


def analyze(cfg: Cfg, pta: PtaConstruction | None = None) -> tuple[dict[str, BlockFacts], PtaConstruction]:
    """Forward worklist iteration to a fixed point.

    Change detection compares indices only, which is exact because equal
    points-to sets always share one index.
    """
    cfg.validate()
    pta = pta or PtaConstruction()
    preds = cfg.predecessors()
    succs = cfg.successors()
    facts = {b: BlockFacts(EMPTY, EMPTY) for b in cfg.blocks}
    visited: set[str] = set()
    work = deque(cfg.blocks)
    queued = set(work)
    while work:
        b = work.popleft()
        queued.discard(b)
        inp = EMPTY
        for p in preds[b]:
            inp = pta.merge(inp, facts[p].out)
        out = inp
        for stmt in cfg.blocks[b]:
            out = pta.transfer(stmt, out)
        changed = out != facts[b].out or b not in visited
        visited.add(b)
        facts[b] = BlockFacts(inp, out)
        if changed:
            for s in succs[b]:
                if s not in queued:
                    queued.add(s)
                    work.append(s)
    return facts, pta


def report(cfg: Cfg, facts: dict[str, BlockFacts], pta: PtaConstruction) -> str:
    lines = []
    for b in cfg.blocks:
        lines.append(f"{b}.in: {pta.format(facts[b].inp)}")
        lines.append(f"{b}.out: {pta.format(facts[b].out)}")
    return "\n".join(lines) + "\n"
