"""Termination-fragment classification of the shipped systems."""
import pytest

from rasv.fragments import (
    NO_GUARANTEE,
    TERMINATES_LOCAL,
    TERMINATES_NO_RELATIONS,
    TERMINATES_TREE,
    classify,
    grade_cube,
)
from rasv.search import RasSystem
from rasv.schema import ArtifactSetting, Signature, Theory
from rasv.syntax import Cst, Cube, Read, TRUE, Var, eq, neq
from rasv.updates import PropagateMacro


def grades(cl):
    return {g.name: (g.grade, g.basis) for g in cl.transitions}


def test_classify_jobhiring(jobhiring):
    cl = classify(jobhiring)
    assert cl.verdict == TERMINATES_LOCAL
    assert cl.acyclic and not cl.tree_like and not cl.sas
    assert grades(cl) == {
        "enable": ("strongly-local", "shape"),
        "insert-step1": ("strongly-local", "shape"),
        "insert-step2": ("strongly-local", "shape"),
        "evaluate": ("strongly-local", "shape"),
        "notify": ("strongly-local", "shape"),
    }
    assert all(g.strongly_local for g in cl.properties.values())


def test_classify_flight(flight):
    cl = classify(flight)
    assert cl.verdict == TERMINATES_TREE
    assert cl.tree_like
    assert grades(cl) == {
        "mark-safe": ("unknown", "probe"),
        "register": ("unknown", "probe"),
        "overbook": ("not-local", "probe"),
        "cancel-route": ("not-local", "probe"),
    }
    witnesses = {g.name: g.witness for g in cl.transitions}
    assert witnesses["overbook"] == "regdPassenger[p1] = regdPassenger[p2]"
    assert witnesses["cancel-route"] == \
        "safeCity[i] != destination(regdPassenger[@q0])"
    locality = {n: g.strongly_local for n, g in cl.properties.items()}
    assert locality == {"phantom-flight": True, "duplicate-safe-city": False,
                        "any-registration": True}


def test_classify_jobhiring_ext(jobhiring_ext):
    cl = classify(jobhiring_ext)
    assert cl.verdict == NO_GUARANTEE
    assert cl.acyclic and not cl.tree_like and not cl.sas
    g = grades(cl)
    # suppressing inserts and the raw selection step lose the certificate
    assert g["publish-step2"] == ("unknown", "probe")
    assert g["apply-step3"] == ("unknown", "probe")
    assert g["select-offer"] == ("unknown", "probe")
    for name in ("enable", "publish-step1", "apply-step2", "evaluate",
                 "close-offers", "notify"):
        assert g[name] == ("strongly-local", "shape")
    locality = {n: g.strongly_local for n, g in cl.properties.items()}
    assert locality == {"undecided-after-notify": True, "duplicate-offer": False,
                        "open-after-final": True}


def test_classify_variable_only_system():
    sig = Signature()
    v = sig.add_sort("V", "value")
    a = sig.add_const("a", v)
    st = ArtifactSetting(Theory(sig))
    x = st.add_variable("x", v)
    t = PropagateMacro("flip", st, (), TRUE, {x: Cst(a)}).compile()
    system = RasSystem("toy", st, {}, [t],
                       {"bad": [Cube((), frozenset({eq(x, Cst(a))}))]})
    cl = classify(system)
    assert cl.sas and cl.verdict == TERMINATES_NO_RELATIONS


def test_grade_cube(flight):
    st = flight.setting
    comp = st.components["safeCity"]
    y1, y2 = Var("y1", comp.source), Var("y2", comp.source)
    u = Cst(st.theory.sig.undef(comp.target))
    single = Cube((y1,), frozenset({neq(Read(comp, y1), u)}))
    assert grade_cube(st, single).strongly_local
    cross = Cube((y1, y2), frozenset({eq(Read(comp, y1), Read(comp, y2)),
                                      neq(y1, y2)}))
    g = grade_cube(st, cross)
    assert not g.local and not g.strongly_local
