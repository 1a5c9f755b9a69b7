"""Instruction streams and their line-oriented text format.

::

    # lhf-workload mode=claim1 target=scalar seed=1 ...
    REG 3 1 2 3
    REGPT 2 4 2 1 2 | 5 1 7
    OP UNION 0 1
    GROW 0 10

Every REG, REGPT and OP appends one entry to the corpus; ``GROW s l``
appends copies of entries ``s .. s+l-1``.  Operands are corpus positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from lhf.core import OpKind

HEADER_TAG = "lhf-workload"

OP_NAMES = {
    OpKind.UNION: "UNION",
    OpKind.INTERSECTION: "INTER",
    OpKind.DIFFERENCE: "DIFF",
}
OP_KINDS = {name: kind for kind, name in OP_NAMES.items()}


@dataclass(frozen=True, slots=True)
class Reg:
    elements: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class RegPt:
    pairs: tuple[tuple[int, tuple[int, ...]], ...]


@dataclass(frozen=True, slots=True)
class Op:
    kind: OpKind
    i: int
    j: int


@dataclass(frozen=True, slots=True)
class Grow:
    src: int
    length: int


Instruction = Union[Reg, RegPt, Op, Grow]


@dataclass
class Workload:
    instructions: list[Instruction] = field(default_factory=list)
    meta: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    @property
    def target(self) -> str:
        if "target" in self.meta:
            return self.meta["target"]
        for ins in self.instructions:
            if isinstance(ins, Reg):
                return "scalar"
            if isinstance(ins, RegPt):
                return "pointsto"
        return "scalar"

    def op_count(self) -> int:
        return sum(1 for ins in self.instructions if isinstance(ins, Op))


class WorkloadSyntaxError(ValueError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        out = [int(t) for t in tokens]
    except ValueError as exc:
        raise WorkloadSyntaxError(lineno, f"expected integers: {exc}") from None
    if any(v < 0 for v in out):
        raise WorkloadSyntaxError(lineno, "negative value")
    return out


def _increasing(values: list[int], lineno: int) -> None:
    for x, y in zip(values, values[1:]):
        if not x < y:
            raise WorkloadSyntaxError(lineno, f"elements not strictly increasing at {x}, {y}")


def _parse_reg(tokens: list[str], lineno: int) -> Reg:
    nums = _ints(tokens, lineno)
    if not nums or nums[0] != len(nums) - 1:
        raise WorkloadSyntaxError(lineno, "REG count does not match number of elements")
    elems = nums[1:]
    _increasing(elems, lineno)
    return Reg(tuple(elems))


def _parse_regpt(tokens: list[str], lineno: int) -> RegPt:
    if not tokens:
        raise WorkloadSyntaxError(lineno, "REGPT needs a key count")
    n = _ints(tokens[:1], lineno)[0]
    groups: list[list[str]] = []
    if n:
        groups = [[]]
        for tok in tokens[1:]:
            if tok == "|":
                groups.append([])
            else:
                groups[-1].append(tok)
    elif len(tokens) > 1:
        raise WorkloadSyntaxError(lineno, "REGPT 0 takes no groups")
    if len(groups) != n:
        raise WorkloadSyntaxError(lineno, f"REGPT declares {n} keys, found {len(groups)}")
    pairs = []
    for g in groups:
        nums = _ints(g, lineno)
        if len(nums) < 2 or nums[1] != len(nums) - 2:
            raise WorkloadSyntaxError(lineno, "REGPT group must be: key count pointee...")
        pointees = nums[2:]
        _increasing(pointees, lineno)
        pairs.append((nums[0], tuple(pointees)))
    _increasing([k for k, _ in pairs], lineno)
    return RegPt(tuple(pairs))


def parse(text: str) -> Workload:
    wl = Workload()
    corpus = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].split()
            if body and body[0] == HEADER_TAG and not wl.instructions:
                for item in body[1:]:
                    k, sep, v = item.partition("=")
                    if not sep:
                        raise WorkloadSyntaxError(lineno, f"bad header field {item!r}")
                    wl.meta[k] = v
            continue
        tokens = line.split()
        head, rest = tokens[0], tokens[1:]
        if head == "REG":
            ins: Instruction = _parse_reg(rest, lineno)
            corpus += 1
        elif head == "REGPT":
            ins = _parse_regpt(rest, lineno)
            corpus += 1
        elif head == "OP":
            if len(rest) != 3 or rest[0] not in OP_KINDS:
                raise WorkloadSyntaxError(lineno, "expected OP {UNION|INTER|DIFF} i j")
            i, j = _ints(rest[1:], lineno)
            if i >= corpus or j >= corpus:
                raise WorkloadSyntaxError(lineno, f"corpus position out of range (corpus has {corpus})")
            ins = Op(OP_KINDS[rest[0]], i, j)
            corpus += 1
        elif head == "GROW":
            if len(rest) != 2:
                raise WorkloadSyntaxError(lineno, "expected GROW src len")
            src, length = _ints(rest, lineno)
            if src + length > corpus:
                raise WorkloadSyntaxError(lineno, f"GROW segment past end of corpus ({corpus})")
            ins = Grow(src, length)
            corpus += length
        else:
            raise WorkloadSyntaxError(lineno, f"unknown instruction {head!r}")
        wl.instructions.append(ins)
    return wl


def format_instruction(ins: Instruction) -> str:
    if isinstance(ins, Reg):
        return " ".join(["REG", str(len(ins.elements)), *map(str, ins.elements)])
    if isinstance(ins, Op):
        return f"OP {OP_NAMES[ins.kind]} {ins.i} {ins.j}"
    if isinstance(ins, RegPt):
        groups = [" ".join([str(k), str(len(p)), *map(str, p)]) for k, p in ins.pairs]
        return " ".join(["REGPT", str(len(ins.pairs))] + ([" | ".join(groups)] if groups else []))
    if isinstance(ins, Grow):
        return f"GROW {ins.src} {ins.length}"
    raise TypeError(f"not an instruction: {ins!r}")


def header_line(meta: dict[str, str]) -> str:
    return " ".join(["#", HEADER_TAG, *(f"{k}={v}" for k, v in meta.items())])


def iter_lines(wl: Workload) -> Iterable[str]:
    if wl.meta:
        yield header_line(wl.meta)
    for ins in wl.instructions:
        yield format_instruction(ins)


def serialize(wl: Workload) -> str:
    return "".join(line + "\n" for line in iter_lines(wl))


def corpus_length(instructions: Iterable[Instruction]) -> int:
    n = 0
    for ins in instructions:
        n += ins.length if isinstance(ins, Grow) else 1
    return n
