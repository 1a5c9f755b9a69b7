"""Construction specs: which LHFs exist and how they nest.

A spec is a JSON tree of ``{"prop": str, "ops": [str, ...], "nests": [...]}``
nodes.  :func:`normalize` merges structurally identical sub-trees bottom-up,
the same way the LHF deduplicates sets, so a structure that occurs twice
(say pointee sets and live-variable sets) becomes a single shared node.
:func:`bind` turns a plan into live LHF instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import jsonschema

from lhf.core import BINARY_KINDS, LatticeHashForest
from lhf.dedup import Interner
from lhf.nesting import NestedLHF

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$ref": "#/$defs/node",
    "$defs": {
        "node": {
            "type": "object",
            "properties": {
                "prop": {"type": "string", "minLength": 1},
                "ops": {
                    "type": "array",
                    "items": {"type": "string", "minLength": 1},
                    "minItems": 1,
                },
                "nests": {"type": "array", "items": {"$ref": "#/$defs/node"}},
            },
            "required": ["prop", "ops"],
            "additionalProperties": False,
        }
    },
}

_validator = jsonschema.Draft202012Validator(SCHEMA)


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class ConstructionSpec:
    prop: str
    ops: frozenset[str]
    nests: tuple["ConstructionSpec", ...] = ()

    @classmethod
    def from_obj(cls, obj: dict) -> "ConstructionSpec":
        return cls(obj["prop"], frozenset(obj["ops"]), tuple(cls.from_obj(n) for n in obj.get("nests", ())))

    def to_obj(self) -> dict:
        obj: dict = {"prop": self.prop, "ops": sorted(self.ops)}
        if self.nests:
            obj["nests"] = [n.to_obj() for n in self.nests]
        return obj

    def node_count(self) -> int:
        return 1 + sum(n.node_count() for n in self.nests)


def parse_spec(text: str) -> ConstructionSpec:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from None
    errors = sorted(_validator.iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        raise SpecError("; ".join(f"{e.json_path}: {e.message}" for e in errors))
    return ConstructionSpec.from_obj(obj)


@dataclass(frozen=True)
class PlanNode:
    plan_id: int
    prop: str
    ops: frozenset[str]
    children: tuple[int, ...]


@dataclass(frozen=True)
class NormalizedPlan:
    nodes: tuple[PlanNode, ...]
    root: int

    def __len__(self) -> int:
        return len(self.nodes)


def normalize(spec: ConstructionSpec) -> NormalizedPlan:
    table: Interner[tuple] = Interner()

    def visit(node: ConstructionSpec) -> int:
        kids = tuple(visit(n) for n in node.nests)
        return table.intern((node.prop, node.ops, kids))

    root = visit(spec)
    nodes = tuple(PlanNode(i, *table.resolve(i)) for i in range(table.count()))
    return NormalizedPlan(nodes, root)


def emit_plan(plan: NormalizedPlan) -> str:
    lines = []
    for n in plan.nodes:
        args = [n.prop, "{" + ", ".join(sorted(n.ops)) + "}"] + [f"#{c}" for c in n.children]
        lines.append(f"#{n.plan_id} = LHF({', '.join(args)})")
    return "\n".join(lines) + "\n"


SUPPORTED_OPS = {k.value for k in BINARY_KINDS}


def bind(plan: NormalizedPlan) -> dict[int, LatticeHashForest]:
    """One LHF instance per plan node; shared nodes yield shared instances."""
    out: dict[int, LatticeHashForest] = {}
    for n in plan.nodes:
        unknown = n.ops - SUPPORTED_OPS
        if unknown:
            raise SpecError(f"node #{n.plan_id}: unsupported operations {sorted(unknown)}")
        label = f"#{n.plan_id}:{n.prop}"
        if n.children:
            out[n.plan_id] = NestedLHF([out[c] for c in n.children], name=label)
        else:
            out[n.plan_id] = LatticeHashForest(name=label)
    return out
