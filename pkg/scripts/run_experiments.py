#!/usr/bin/env python3
"""Run every experiment spec and write result tables.

Usage: python scripts/run_experiments.py [--out DIR] [--repeats N] [--only NAME]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from elang.bench import load_spec, run_experiment

SPEC_DIR = Path(__file__).resolve().parent.parent / "experiments"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--repeats", type=int, help="override each spec's repeat count")
    ap.add_argument("--only", help="run a single spec by name")
    args = ap.parse_args()

    specs = sorted(SPEC_DIR.glob("*.spec"))
    if args.only:
        specs = [p for p in specs if p.stem == args.only]
        if not specs:
            print("no spec named %s under %s" % (args.only, SPEC_DIR), file=sys.stderr)
            return 2
    for path in specs:
        spec = load_spec(path)
        if args.repeats is not None:
            spec.repeats = args.repeats
        start = time.perf_counter()
        table = run_experiment(spec)
        elapsed = time.perf_counter() - start
        written = table.write(args.out)
        print("%-16s %5.1fs  %s" % (spec.name, elapsed, ", ".join(str(w) for w in written)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
