"""Finite instances, explicit-state evaluation, bounded search."""
import itertools

from rasv.concrete import (
    UNDEF,
    Evaluator,
    WmState,
    bounded_reach,
    diagram,
    enumerate_instances,
)
from rasv.decide import Decider
from rasv.randgen import enum_wms, mini_setting
from rasv.syntax import App, Cst, ExistsForall, Read, Var, conj, eq, neq


def test_enumeration_respects_null_axioms():
    st = mini_setting()
    insts = list(enumerate_instances(st.theory, {"P": 2}))
    # one defined P element, its image ranges over {a, b}
    assert len(insts) == 2
    h = st.theory.sig.funcs["h"]
    for inst in insts:
        assert inst.func_maps[h][UNDEF] == UNDEF
        assert inst.func_maps[h]["p0"] != UNDEF


def test_enumeration_counts():
    st = mini_setting()
    assert len(list(enumerate_instances(st.theory, {"P": 3, "V": 4}))) == 9
    # size bounds below the constant vocabulary are padded up
    assert len(list(enumerate_instances(st.theory, {"P": 1, "V": 1}))) == 1


def test_evaluator():
    st = mini_setting()
    sig = st.theory.sig
    inst = next(enumerate_instances(st.theory, {"P": 2}))
    x, y = st.variables["x"], st.variables["y"]
    c1, c2 = st.components["c1"], st.components["c2"]
    A = st.artifact_sorts[0]
    wm = WmState.make({x: "a", y: "p0"}, {A: [("p0", "b"), (UNDEF, UNDEF)]})
    ev = Evaluator(inst, st, wm)
    h = sig.funcs["h"]
    assert ev.formula(eq(x, Cst(sig.consts["a"])), {})
    assert ev.formula(eq(App(h, y), Cst(sig.consts[inst.func_maps[h]["p0"]])), {})
    k = Var("k", A)
    assert ev.exists((k,), conj(eq(Read(c1, k), y), eq(Read(c2, k),
                                                       Cst(sig.consts["b"]))), {})
    assert not ev.forall((k,), neq(Read(c1, k), Cst(sig.undef(sig.sorts["P"]))), {})
    assert ev.exists_forall(ExistsForall((k,), eq(Read(c2, k), Cst(sig.consts["b"]))))


def test_wm_canonical_ignores_row_order():
    st = mini_setting()
    x, y = st.variables["x"], st.variables["y"]
    A = st.artifact_sorts[0]
    w1 = WmState.make({x: UNDEF, y: UNDEF}, {A: [("p0", "a"), (UNDEF, "b")]})
    w2 = WmState.make({x: UNDEF, y: UNDEF}, {A: [(UNDEF, "b"), ("p0", "a")]})
    assert w1.canonical() == w2.canonical()


def test_enum_wms_covers_all_states():
    st = mini_setting()
    A = st.artifact_sorts[0]
    c1, c2 = st.components["c1"], st.components["c2"]
    states = list(enum_wms(st, {A: 2}, {c1: [UNDEF, "p0"], c2: [UNDEF, "a"]}))
    # 2*2 row values taken as an unordered pair: 10 multisets, variables
    # stay undef
    assert len(states) == 10
    assert len({s.canonical() for s in states}) == 10


def test_bounded_reach_flight(flight):
    st = flight.setting
    init = {v: flight.init_const(v) for v in st.variables.values()}
    init.update({c: flight.init_const(c) for c in st.components.values()})
    taus = [ct.tau for ct in flight.transitions]
    sizes = {s.name: 1 for s in st.artifact_sorts}
    hit = None
    for inst in enumerate_instances(st.theory, {"CityId": 2, "FlightId": 2}):
        res = bounded_reach(inst, st, init, taus,
                            flight.properties["any-registration"], sizes,
                            max_steps=4, max_states=50000)
        if res.hit is not None:
            hit = res
            break
    assert hit is not None and hit.steps == 2
    assert [name for name, _ in hit.trace] == ["mark-safe", "register"]


def test_diagram_characterizes_instance():
    st = mini_setting()
    dec = Decider(st.theory)
    insts = list(enumerate_instances(st.theory, {"P": 2}))
    names, diag = diagram(insts[0])
    from rasv.syntax import formula_atoms
    atoms = list(formula_atoms(diag))
    ok, _ = dec.sat_constraint(atoms)
    assert ok
    # the diagram pins h(p0) down: adding the other instance's value clashes
    h = st.theory.sig.funcs["h"]
    other = insts[1].func_maps[h]["p0"]
    p0 = names[(st.theory.sig.sorts["P"], "p0")]
    clash = eq(App(h, p0), Cst(st.theory.sig.consts[other]))
    ok, _ = dec.sat_constraint(atoms + [clash])
    assert not ok
