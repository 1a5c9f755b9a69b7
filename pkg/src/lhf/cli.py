"""Command line: generate workloads, run engines, demos.

Exit codes: 0 success, 1 digest mismatch, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import csv
import sys
from importlib import resources
from pathlib import Path

from lhf.construct import SpecError, emit_plan, normalize, parse_spec
from lhf.pointsto import CfgError, analyze, parse_cfg, report
from lhf.workload.engines import (
    TIMED_KINDS,
    first_divergence,
    read_digest,
    run,
    write_digest,
)
from lhf.workload.generate import MODES, TARGETS, GenParams, generate
from lhf.workload.instructions import WorkloadSyntaxError, iter_lines, parse

CSV_COLUMNS = [
    "engine", "mode", "target", "ops", "kind", "invocations", "hits",
    "equal_hits", "subset_hits", "empty_hits", "cold_misses", "edge_misses",
    "cumulative_ns", "sets_registered", "memo_entries", "logical_bytes",
]
_COUNTERS = ["hits", "equal_hits", "subset_hits", "empty_hits", "cold_misses", "edge_misses"]


class UsageError(Exception):
    pass


def _bundled(name: str) -> str:
    return resources.files("lhf.data").joinpath(name).read_text()


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        params = GenParams(
            mode=args.mode, target=args.target, op_count=args.ops, seed=args.seed,
            max_value=args.max_value, max_size=args.max_size, corpus_size=args.corpus,
            grow_prob=args.grow_prob, max_grow=args.max_grow, max_keys=args.max_keys,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    wl = generate(params)
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w")
    try:
        for line in iter_lines(wl):
            out.write(line + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _report_rows(res, meta: dict[str, str], ops: int) -> list[dict]:
    rows = []
    stats = res.stats
    for kind in TIMED_KINDS:
        row = {
            "engine": res.engine,
            "mode": meta.get("mode", "unknown"),
            "target": res.target,
            "ops": ops,
            "kind": kind,
            "invocations": res.invocations[kind],
            "cumulative_ns": res.op_ns[kind],
            "sets_registered": res.sets_registered,
            "memo_entries": res.memo_entries,
            "logical_bytes": res.logical_bytes,
        }
        ks = None
        if stats is not None and kind != "register":
            ks = next(v for k, v in stats.items() if k.value == kind)
        for c in _COUNTERS:
            row[c] = getattr(ks, c) if ks is not None else 0
        rows.append(row)
    return rows


def cmd_run(args: argparse.Namespace) -> int:
    try:
        wl = parse(_read(args.input))
    except WorkloadSyntaxError as exc:
        raise UsageError(f"{args.input}: {exc}") from None
    expected = read_digest(args.verify_against) if args.verify_against else None
    res = run(wl, args.engine)
    ops = wl.op_count()
    if args.report:
        with open(args.report, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            w.writeheader()
            w.writerows(_report_rows(res, wl.meta, ops))
    if args.digest:
        write_digest(res.digest, args.digest)
    print(
        f"engine={res.engine} target={res.target} ops={ops} "
        f"op_ms={res.total_ns / 1e6:.1f} sets={res.sets_registered} memo={res.memo_entries}"
    )
    if expected is not None:
        at = first_divergence(res.digest, expected)
        if at is not None:
            print(f"digest mismatch: first divergence at corpus position {at}", file=sys.stderr)
            return 1
        print("digest verified")
    return 0


def cmd_demo_pointsto(args: argparse.Namespace) -> int:
    text = _read(args.cfg) if args.cfg else _bundled("two_branch.cfg")
    try:
        cfg = parse_cfg(text)
    except CfgError as exc:
        raise UsageError(str(exc)) from None
    facts, pta = analyze(cfg)
    sys.stdout.write(report(cfg, facts, pta))
    return 0


def cmd_normalize(args: argparse.Namespace) -> int:
    text = _read(args.spec) if args.spec else _bundled("lfcpa.json")
    try:
        plan = normalize(parse_spec(text))
    except SpecError as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(emit_plan(plan))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lhf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded instruction stream")
    g.add_argument("--mode", choices=MODES, default="claim1")
    g.add_argument("--target", choices=TARGETS, default="scalar")
    g.add_argument("--ops", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-value", type=int, default=10_000)
    g.add_argument("--max-size", type=int, default=200)
    g.add_argument("--corpus", type=int, default=300)
    g.add_argument("--grow-prob", type=float, default=None)
    g.add_argument("--max-grow", type=int, default=None)
    g.add_argument("--max-keys", type=int, default=20)
    g.add_argument("--out", help="output file (default: stdout)")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="execute an instruction file")
    r.add_argument("--engine", choices=("lhf", "naive"), required=True)
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--report", help="CSV report path")
    r.add_argument("--digest", help="digest output path")
    r.add_argument("--verify-against", help="digest file to compare with")
    r.set_defaults(func=cmd_run)

    d = sub.add_parser("demo-pointsto", help="run the points-to demo on a CFG")
    d.add_argument("--cfg", help="CFG file (default: bundled two-branch example)")
    d.set_defaults(func=cmd_demo_pointsto)

    n = sub.add_parser("normalize", help="deduplicate a JSON construction spec")
    n.add_argument("--spec", help="spec file (default: bundled points-to + liveness spec)")
    n.set_defaults(func=cmd_normalize)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
