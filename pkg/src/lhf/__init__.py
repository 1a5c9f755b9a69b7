"""LatticeHashForest: deduplicated, operation-memoizing storage for sets."""

from lhf.core import (
    EMPTY,
    InvalidIndex,
    KindStats,
    LatticeHashForest,
    LHFError,
    OpKind,
    OpStats,
    SetEvicted,
    UnrecoverableEviction,
    ValidationError,
)
from lhf.dedup import Interner
from lhf.nesting import NATURAL, NestedLHF, NestingRules

__all__ = [
    "EMPTY", "Interner", "InvalidIndex", "KindStats", "LHFError",
    "LatticeHashForest", "NATURAL", "NestedLHF", "NestingRules", "OpKind",
    "OpStats", "SetEvicted", "UnrecoverableEviction", "ValidationError",
]
