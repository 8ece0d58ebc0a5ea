"""Backward reachability: verdicts, certificates, traces, replay."""
import jsonschema
import pytest

from rasv.search import BUDGET, SAFE, UNSAFE, breach, replay_any


def test_jobhiring_p1_safe(jobhiring):
    v = breach(jobhiring, "P1")
    assert v.verdict == SAFE
    assert (v.nodes, v.depth, v.decision_calls) == (1, 0, 7)
    assert len(v.fixpoint) == 1 and v.trace is None


def test_flight_phantom_flight_safe(flight):
    # the root cube is unsatisfiable, the search never expands a node
    v = breach(flight, "phantom-flight")
    assert v.verdict == SAFE and v.nodes == 0


def test_flight_duplicate_safe_city_safe(flight):
    v = breach(flight, "duplicate-safe-city")
    assert v.verdict == SAFE and v.nodes == 1 and len(v.fixpoint) == 1


def test_flight_any_registration_unsafe(flight):
    v = breach(flight, "any-registration")
    assert v.verdict == UNSAFE
    assert (v.nodes, v.depth) == (3, 2)
    assert [name for name, _ in v.trace] == ["mark-safe", "register"]


def test_replay_counterexample(flight):
    v = breach(flight, "any-registration")
    hit = replay_any(flight, v)
    assert hit is not None
    inst, sizes, states = hit
    assert len(states) - 1 == 2
    # states walk the trace: the final one satisfies the property
    from rasv.concrete import Evaluator
    final = Evaluator(inst, flight.setting, states[-1])
    assert any(final.cube(c) for c in flight.properties["any-registration"])


def test_budget_exhaustion(jobhiring):
    v = breach(jobhiring, "P3", max_nodes=1)
    assert v.verdict == BUDGET
    v = breach(jobhiring, "P3", max_depth=1)
    assert v.verdict == BUDGET
    v = breach(jobhiring, "P3", timeout=0.0)
    assert v.verdict == BUDGET


def test_observer_events(flight):
    events = []
    breach(flight, "any-registration",
           observer=lambda node, ev: events.append((node.via, ev)))
    assert events[0] == (None, "expanded")
    assert events[-1][1] == "hit"
    assert all(ev in ("expanded", "covered", "hit") for _via, ev in events)


def test_verdict_json_validates(flight, jobhiring, verdict_schema):
    docs = []
    for system, prop in ((flight, "any-registration"),
                         (flight, "duplicate-safe-city"),
                         (jobhiring, "P1")):
        doc = breach(system, prop).to_json()
        doc["system"] = system.name
        jsonschema.validate(doc, verdict_schema)
        docs.append(doc)
    jsonschema.validate(docs, verdict_schema)
    unsafe = docs[0]
    assert unsafe["trace"] == ["mark-safe", "register"]
    assert "fixpoint_size" not in unsafe
    assert docs[1]["fixpoint_size"] == 1 and "trace" not in docs[1]
