from lhf.workload.engines import RunResult, run, run_lhf, run_naive
from lhf.workload.generate import GenParams, generate
from lhf.workload.instructions import (
    Grow,
    Op,
    Reg,
    RegPt,
    Workload,
    WorkloadSyntaxError,
    parse,
    serialize,
)

__all__ = [
    "GenParams", "Grow", "Op", "Reg", "RegPt", "RunResult", "Workload",
    "WorkloadSyntaxError", "generate", "parse", "run", "run_lhf", "run_naive",
    "serialize",
]
