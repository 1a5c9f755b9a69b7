"""Seeded workload generators.

Three modes:

``claim1``
    Open world.  Every step registers a brand new random set and then
    operates on two uniformly chosen earlier corpus entries.
``pessimistic``
    Closed world.  ``corpus_size`` random sets up front, then random
    operations over that data; now and then a random segment of the data
    is duplicated onto the end of the corpus (GROW).
``optimistic``
    Closed world with planted redundancy.  A pool D of ``corpus_size/4``
    random sets fills three quarters of the corpus (the rest stays empty),
    and operations are sampled from a fixed pool of operation triples that
    only grows, by at most the data increment, when the data grows.

Operation results get corpus positions but in the closed-world modes they
are never used as operands: only registered data and its GROW copies are.

Every random decision site draws from its own PCG64 stream derived from
the seed, so adding a site never perturbs the others.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import IntEnum

import numpy as np

from lhf.core import OpKind
from lhf.workload.instructions import Grow, Instruction, Op, Reg, RegPt, Workload

MODES = ("claim1", "pessimistic", "optimistic")
TARGETS = ("scalar", "pointsto")
_KINDS = (OpKind.UNION, OpKind.INTERSECTION, OpKind.DIFFERENCE)
# optimistic growth is faster so its operation pool can catch up with the
# closed set of reachable results inside ~10**6 steps
DEFAULT_GROW_PROB = {"pessimistic": 1e-3, "optimistic": 3e-2}


class Site(IntEnum):
    VALUES = 0
    SIZES = 1
    POSITIONS = 2
    KINDS = 3
    GROW = 4
    KEYS = 5
    SAMPLING = 6
    OP_POOL = 7


@dataclass(frozen=True)
class GenParams:
    mode: str = "claim1"
    target: str = "scalar"
    op_count: int = 1000
    seed: int = 0
    max_value: int = 10_000
    max_size: int = 200
    corpus_size: int = 300
    # per-step GROW probability; None picks the mode default
    grow_prob: float | None = None
    max_grow: int | None = None  # default corpus_size // 10
    # points-to sets: at most max_keys pointers, max_size pairs in total
    max_keys: int = 20

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}; expected one of {TARGETS}")
        if self.op_count < 0:
            raise ValueError("op_count must be >= 0")
        for name in ("max_value", "max_size", "corpus_size", "max_keys"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.mode == "optimistic" and self.corpus_size < 4:
            raise ValueError("optimistic mode needs corpus_size >= 4")
        if self.grow_prob is not None and not 0.0 <= self.grow_prob <= 1.0:
            raise ValueError("grow_prob must be in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.max_grow is not None and self.max_grow <= 0:
            raise ValueError("max_grow must be positive")

    @property
    def growth_probability(self) -> float:
        if self.grow_prob is not None:
            return self.grow_prob
        return DEFAULT_GROW_PROB.get(self.mode, 0.0)

    @property
    def grow_limit(self) -> int:
        if self.max_grow is not None:
            return min(self.max_grow, self.corpus_size)
        return max(1, self.corpus_size // 10)

    def meta(self) -> dict[str, str]:
        d = asdict(self)
        d["grow_prob"] = self.growth_probability
        d["max_grow"] = self.grow_limit
        return {k: str(v) for k, v in d.items()}


class _Draws:
    def __init__(self, seed: int) -> None:
        self._gens = {
            site: np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(int(site),))))
            for site in Site
        }

    def __getitem__(self, site: Site) -> np.random.Generator:
        return self._gens[site]


class _SetMaker:
    def __init__(self, params: GenParams, draws: _Draws) -> None:
        self.p = params
        self.values = draws[Site.VALUES]
        self.sizes = draws[Site.SIZES]
        self.keys = draws[Site.KEYS]
        self.per_key = max(1, params.max_size // params.max_keys)

    def scalar(self) -> tuple[int, ...]:
        n = int(self.sizes.integers(0, self.p.max_size + 1))
        return tuple(sorted(set(self.values.integers(0, self.p.max_value + 1, n).tolist())))

    def pointsto(self) -> tuple[tuple[int, tuple[int, ...]], ...]:
        nkeys = int(self.sizes.integers(0, self.p.max_keys + 1))
        keys = sorted(set(self.keys.integers(0, self.p.max_value + 1, nkeys).tolist()))
        counts = self.sizes.integers(1, self.per_key + 1, len(keys)).tolist()
        flat = self.values.integers(0, self.p.max_value + 1, sum(counts)).tolist()
        pairs = []
        at = 0
        for k, c in zip(keys, counts):
            pairs.append((k, tuple(sorted(set(flat[at:at + c])))))
            at += c
        return tuple(pairs)

    def make(self) -> Instruction:
        if self.p.target == "scalar":
            return Reg(self.scalar())
        return RegPt(self.pointsto())

    def empty(self) -> Instruction:
        return Reg(()) if self.p.target == "scalar" else RegPt(())


def generate(params: GenParams) -> Workload:
    draws = _Draws(params.seed)
    maker = _SetMaker(params, draws)
    gen = {"claim1": _claim1, "pessimistic": _pessimistic, "optimistic": _optimistic}[params.mode]
    return Workload(gen(params, draws, maker), params.meta())


def _claim1(p: GenParams, draws: _Draws, maker: _SetMaker) -> list[Instruction]:
    out: list[Instruction] = []
    positions = draws[Site.POSITIONS]
    kinds = draws[Site.KINDS].integers(0, 3, p.op_count).tolist()
    corpus = 0
    for step in range(p.op_count):
        out.append(maker.make())
        corpus += 1
        i, j = positions.integers(0, corpus, 2).tolist()
        out.append(Op(_KINDS[kinds[step]], i, j))
        corpus += 1
    return out


def _grow_steps(p: GenParams, draws: _Draws) -> list[int]:
    """Steps (0-based) before which a GROW is emitted."""
    prob = p.growth_probability
    if prob <= 0.0 or p.op_count == 0:
        return []
    rng = draws[Site.GROW]
    steps = []
    at = -1
    while True:
        at += int(rng.geometric(prob))
        if at >= p.op_count:
            return steps
        steps.append(at)


def _grow(p: GenParams, draws: _Draws) -> Grow:
    rng = draws[Site.GROW]
    length = int(rng.integers(1, p.grow_limit + 1))
    src = int(rng.integers(0, p.corpus_size - length + 1))
    return Grow(src, length)


def _segments(p: GenParams, grow_at: list[int]):
    """Split the steps into runs of plain operations; ``(None, g)`` marks a GROW."""
    start = 0
    for g in grow_at:
        if g > start:
            yield start, g
        yield None, g
        start = g
    if p.op_count > start:
        yield start, p.op_count


def _pessimistic(p: GenParams, draws: _Draws, maker: _SetMaker) -> list[Instruction]:
    out: list[Instruction] = [maker.make() for _ in range(p.corpus_size)]
    corpus = p.corpus_size
    data = list(range(p.corpus_size))
    positions = draws[Site.POSITIONS]
    kinds = draws[Site.KINDS]
    for start, stop in _segments(p, _grow_steps(p, draws)):
        if start is None:
            g = _grow(p, draws)
            out.append(g)
            data.extend(range(corpus, corpus + g.length))
            corpus += g.length
            continue
        n = stop - start
        picks = positions.integers(0, len(data), (n, 2)).tolist()
        ks = kinds.integers(0, 3, n).tolist()
        for (i, j), k in zip(picks, ks):
            out.append(Op(_KINDS[k], data[i], data[j]))
        corpus += n
    return out


def _optimistic(p: GenParams, draws: _Draws, maker: _SetMaker) -> list[Instruction]:
    pool = [maker.make() for _ in range(p.corpus_size // 4)]
    sampling = draws[Site.SAMPLING]
    filled = set(sampling.choice(p.corpus_size, 3 * p.corpus_size // 4, replace=False).tolist())
    picks = sampling.integers(0, len(pool), p.corpus_size).tolist()
    out: list[Instruction] = [
        pool[picks[pos]] if pos in filled else maker.empty() for pos in range(p.corpus_size)
    ]
    corpus = p.corpus_size
    data = list(range(p.corpus_size))
    op_rng = draws[Site.OP_POOL]

    def new_ops(n: int) -> list[Op]:
        ij = op_rng.integers(0, len(data), (n, 2)).tolist()
        ks = op_rng.integers(0, 3, n).tolist()
        return [Op(_KINDS[k], data[i], data[j]) for (i, j), k in zip(ij, ks)]

    ops = new_ops(p.corpus_size)
    for start, stop in _segments(p, _grow_steps(p, draws)):
        if start is None:
            g = _grow(p, draws)
            out.append(g)
            data.extend(range(corpus, corpus + g.length))
            corpus += g.length
            # the operation pool grows by at most the data increment
            ops.extend(new_ops(int(op_rng.integers(0, g.length + 1))))
            continue
        n = stop - start
        out.extend(ops[k] for k in sampling.integers(0, len(ops), n).tolist())
        corpus += n
    return out
