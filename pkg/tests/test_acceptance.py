"""End-to-end acceptance suite.

One test per shipped guarantee; each prints a single PASS/FAIL line with
the measured numbers so a full run reads as a checklist. Random checks are
seeded through RASV_SEED (see conftest) and compare the symbolic engine
against exhaustive enumeration on bounded instances.
"""
import random
import time

from rasv.concrete import Evaluator
from rasv.decide import Decider
from rasv.fragments import TERMINATES_TREE, classify
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
from rasv.search import BUDGET, SAFE, UNSAFE, breach, replay_any
from rasv.syntax import Cst, Read, TRUE, Var
from rasv.updates import (
    BulkMacro,
    DeleteMacro,
    InsertMacro,
    KEEP,
    LOCAL,
    PropagateMacro,
    STRONGLY_LOCAL,
)

from conftest import SEED


def report(ok: bool, label: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'}: {label}", flush=True)
    assert ok, label


def _rng(tag: str) -> random.Random:
    return random.Random(f"{SEED}:{tag}")


def test_acceptance_1_jobhiring_p1_safe(jobhiring):
    v = breach(jobhiring, "P1", timeout=120)
    report(v.verdict == SAFE and v.elapsed <= 120,
           f"job-hiring P1 verified {v.verdict} in {v.elapsed:.1f}s "
           f"({v.nodes} nodes)")


def test_acceptance_2_jobhiring_p3_unsafe_with_replay(jobhiring):
    v = breach(jobhiring, "P3", timeout=120)
    ok = v.verdict == UNSAFE and v.elapsed <= 120
    small = False
    replayed = False
    if ok:
        hit = replay_any(jobhiring, v)
        if hit is not None:
            inst, _sizes, states = hit
            small = all(len(es) <= 2 for s, es in inst.carriers.items()
                        if s.kind == "id")
            final = Evaluator(inst, jobhiring.setting, states[-1])
            replayed = (len(states) - 1 == len(v.trace)
                        and any(final.cube(c)
                                for c in jobhiring.properties["P3"]))
    report(ok and small and replayed,
           f"job-hiring P3 {v.verdict} in {v.elapsed:.1f}s, trace "
           f"{[n for n, _ in (v.trace or [])]} replayed on a 2-element "
           f"instance: {replayed}")


def test_acceptance_3_flight_classified_and_verified(flight):
    cl = classify(flight)
    shape_ok = cl.tree_like and cl.verdict == TERMINATES_TREE
    t0 = time.monotonic()
    safe = breach(flight, "phantom-flight", timeout=300)
    unsafe = breach(flight, "any-registration", timeout=300)
    elapsed = time.monotonic() - t0
    report(shape_ok and safe.verdict == SAFE and unsafe.verdict == UNSAFE,
           f"flight-management is tree-like ({cl.verdict}); phantom-flight "
           f"{safe.verdict}, any-registration {unsafe.verdict} in "
           f"{elapsed:.1f}s")


def test_acceptance_4_locality_matrix(flight):
    st = mini_setting()
    sig = st.theory.sig
    A = st.artifact_sorts[0]
    c1, c2 = st.components["c1"], st.components["c2"]
    x, y = st.variables["x"], st.variables["y"]
    a = Cst(sig.consts["a"])
    uP = Cst(sig.undef(sig.sorts["P"]))
    uV = Cst(sig.undef(sig.sorts["V"]))
    i = Var("i", A)

    rows = {
        "delete without propagation": (
            DeleteMacro("d", st, A, i, sets={x: uV, y: uP}).compile()
            .certificate, STRONGLY_LOCAL),
        "insert": (
            InsertMacro("i", st, A, i, row_values={c1: y, c2: x}).compile()
            .certificate, STRONGLY_LOCAL),
        "propagate": (
            PropagateMacro("p", st, (), TRUE, {x: a}).compile()
            .certificate, STRONGLY_LOCAL),
        "bulk": (
            BulkMacro("b", st, A, updates={c2: (a, KEEP)}).compile()
            .certificate, STRONGLY_LOCAL),
        "delete with propagation": (
            DeleteMacro("dp", st, A, i, sets={y: Read(c1, i)}).compile()
            .certificate, LOCAL),
    }
    cl = classify(flight)
    overbook = next(g.grade for g in cl.transitions if g.name == "overbook")
    rows["overbooking"] = (overbook, "not-local")

    bad = {k: v for k, (v, want) in rows.items() if v != want}
    report(not bad, "locality matrix exact on all 6 shapes"
           + (f" (mismatches: {bad})" if bad else ""))


def test_acceptance_5_quantifier_elimination_differential():
    rng = _rng("qe")
    fragments = all_fragments()
    deciders = [Decider(th) for th in fragments]
    checked = mismatches = 0
    t0 = time.monotonic()
    while checked < 200:
        k = rng.randrange(len(fragments))
        draw = random_primitive(rng, fragments[k])
        if draw is None:
            continue
        variables, kill, atoms = draw
        if qe_mismatch(deciders[k], variables, kill, atoms) is not None:
            mismatches += 1
        checked += 1
    report(mismatches == 0,
           f"quantifier elimination agrees with enumeration on "
           f"{checked}/200 random primitive formulas "
           f"({time.monotonic() - t0:.1f}s)")


def test_acceptance_6_constraints_and_sentences(jobhiring, flight):
    rng = _rng("constraints")
    fragments = all_fragments()
    deciders = [Decider(th) for th in fragments]
    checked = mismatches = 0
    t0 = time.monotonic()
    while checked < 500:
        k = rng.randrange(len(fragments))
        draw = random_constraint(rng, fragments[k])
        if draw is None:
            continue
        variables, atoms = draw
        if constraint_mismatch(deciders[k], variables, atoms) is not None:
            mismatches += 1
        checked += 1

    ef_checked = 0
    for system in (jobhiring, flight):
        dec = Decider(system.setting.theory)
        done = 0
        while done < 200:
            ef = random_ef(rng, system.setting)
            if ef is None:
                continue
            if ef_mismatch(dec, system.setting, ef) is not None:
                mismatches += 1
            done += 1
        ef_checked += done
    report(mismatches == 0,
           f"constraint and exists/forall decisions oracle-exact on "
           f"{checked} constraints + {ef_checked} sentences "
           f"({time.monotonic() - t0:.1f}s)")


def test_acceptance_7_one_step_preimages():
    rng = _rng("preimage")
    st = mini_setting()
    dec = Decider(st.theory)
    checked = mismatches = 0
    t0 = time.monotonic()
    while checked < 100:
        ct = random_mini_transition(rng, st)
        cubes = random_state_cubes(rng, st)
        if ct is None or cubes is None:
            continue
        if preimage_mismatch(dec, st, ct, cubes) is not None:
            mismatches += 1
        checked += 1
    report(mismatches == 0,
           f"symbolic preimages match concrete one-step semantics on "
           f"{checked}/100 transition/formula pairs "
           f"({time.monotonic() - t0:.1f}s)")


def test_acceptance_8_variable_only_systems_terminate():
    rng = _rng("sas")
    checked = failures = unsafe = 0
    t0 = time.monotonic()
    while checked < 50:
        system = random_sas(rng, f"sas{checked}")
        if system is None:
            continue
        v = breach(system, "target", timeout=60)
        if v.verdict == BUDGET:
            failures += 1
        elif v.verdict == UNSAFE:
            unsafe += 1
            if replay_any(system, v) is None:
                failures += 1
        checked += 1
    report(failures == 0,
           f"backward search terminated on {checked}/50 random "
           f"variable-only systems, {unsafe} violations all replayed "
           f"({time.monotonic() - t0:.1f}s)")
