#!/usr/bin/env python3
"""Run a command and report its peak resident set size.

    python scripts/peak_rss.py lhf run --engine lhf --in w.txt

The child's exit status is passed through.  The peak is printed to stderr
as ``peak_rss_kib=N``.
"""

import resource
import subprocess
import sys


def main(argv: list[str]) -> int:
    if not argv:
        print(__doc__, file=sys.stderr)
        return 2
    code = subprocess.call(argv)
    peak = resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss
    if sys.platform == "darwin":
        peak //= 1024  # bytes there, KiB on Linux
    print(f"peak_rss_kib={peak}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
