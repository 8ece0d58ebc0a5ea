#!/usr/bin/env python3
"""Verify and classify every shipped system and print a summary table.

Usage: python scripts/run_benchmarks.py [--timeout SECS] [--specs DIR]
"""
import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from rasv.dsl import load
from rasv.fragments import classify
from rasv.search import UNSAFE, breach, replay_any


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--timeout", type=float, default=300.0)
    ap.add_argument("--specs", default=None, help="directory with .ras files")
    args = ap.parse_args()

    specs_dir = pathlib.Path(args.specs) if args.specs else \
        pathlib.Path(__file__).resolve().parent.parent / "specs"
    rows = []
    for path in sorted(specs_dir.glob("*.ras")):
        system = load(str(path))
        cl = classify(system)
        print(f"== {system.name} ({path.name}): {cl.verdict}")
        for prop in system.properties:
            t0 = time.monotonic()
            v = breach(system, prop, timeout=args.timeout)
            note = ""
            if v.verdict == UNSAFE:
                trace = " -> ".join(name for name, _ in v.trace)
                note = f"  trace: {trace}"
                if replay_any(system, v) is not None:
                    note += "  (replayed)"
            rows.append((system.name, prop, v.verdict, v.nodes,
                         v.decision_calls, time.monotonic() - t0))
            print(f"   {prop}: {v.verdict}  nodes={v.nodes} "
                  f"calls={v.decision_calls} time={rows[-1][-1]:.1f}s{note}")

    print()
    print(f"{'system':<22}{'property':<24}{'verdict':<18}"
          f"{'nodes':>6}{'calls':>8}{'time':>8}")
    for name, prop, verdict, nodes, calls, secs in rows:
        print(f"{name:<22}{prop:<24}{verdict:<18}{nodes:>6}{calls:>8}"
              f"{secs:>7.1f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
