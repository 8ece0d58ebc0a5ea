#!/usr/bin/env python3
"""Differential fuzzing of the symbolic engine against brute-force
enumeration: quantifier elimination, constraint and exists/forall
decisions, one-step preimages, and whole variable-only systems.

The seed comes from RASV_SEED or --seed; every mismatch is printed with
enough detail to rebuild the failing case.

Usage: python scripts/random_differential.py [--rounds N] [--seed S]
       [--suite qe|constraint|ef|preimage|sas|all]
"""
import argparse
import os
import pathlib
import random
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from rasv.decide import Decider
from rasv.dsl import load
from rasv.randgen import (
    all_fragments,
    constraint_mismatch,
    ef_mismatch,
    mini_setting,
    preimage_mismatch,
    qe_mismatch,
    random_constraint,
    random_ef,
    random_mini_transition,
    random_primitive,
    random_sas,
    random_state_cubes,
)
from rasv.search import BUDGET, UNSAFE, breach, replay_any

SPECS = pathlib.Path(__file__).resolve().parent.parent / "specs"


def run_suite(name, rounds, rng, emit):
    fragments = all_fragments()
    deciders = [Decider(th) for th in fragments]
    done = bad = 0
    while done < rounds:
        if name == "qe":
            k = rng.randrange(len(fragments))
            draw = random_primitive(rng, fragments[k])
            if draw is None:
                continue
            mismatch = qe_mismatch(deciders[k], *draw)
            case = draw
        elif name == "constraint":
            k = rng.randrange(len(fragments))
            draw = random_constraint(rng, fragments[k])
            if draw is None:
                continue
            mismatch = constraint_mismatch(deciders[k], *draw)
            case = draw
        elif name == "ef":
            system = load(str(SPECS / rng.choice(["jobhiring.ras",
                                                  "flight.ras"])))
            ef = random_ef(rng, system.setting)
            if ef is None:
                continue
            mismatch = ef_mismatch(Decider(system.setting.theory),
                                   system.setting, ef)
            case = ef
        elif name == "preimage":
            st = mini_setting()
            ct = random_mini_transition(rng, st)
            cubes = random_state_cubes(rng, st)
            if ct is None or cubes is None:
                continue
            mismatch = preimage_mismatch(Decider(st.theory), st, ct, cubes)
            case = (ct.tau, cubes)
        elif name == "sas":
            system = random_sas(rng, f"sas{done}")
            if system is None:
                continue
            v = breach(system, "target", timeout=60)
            mismatch = None
            if v.verdict == BUDGET:
                mismatch = "search budget exhausted"
            elif v.verdict == UNSAFE and replay_any(system, v) is None:
                mismatch = "violation not replayable"
            case = system
        else:
            raise ValueError(name)
        done += 1
        if mismatch is not None:
            bad += 1
            emit(f"MISMATCH [{name} #{done}]: {mismatch}\n  case: {case!r}")
    return done, bad


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rounds", type=int, default=100, help="cases per suite")
    ap.add_argument("--seed", type=int,
                    default=int(os.environ.get("RASV_SEED", "0")))
    ap.add_argument("--suite", default="all",
                    choices=["qe", "constraint", "ef", "preimage", "sas", "all"])
    args = ap.parse_args()

    suites = (["qe", "constraint", "ef", "preimage", "sas"]
              if args.suite == "all" else [args.suite])
    total_bad = 0
    for name in suites:
        rng = random.Random(f"{args.seed}:{name}")
        t0 = time.monotonic()
        done, bad = run_suite(name, args.rounds, rng, print)
        total_bad += bad
        print(f"{name}: {done - bad}/{done} agree "
              f"({time.monotonic() - t0:.1f}s)")
    return 1 if total_bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
