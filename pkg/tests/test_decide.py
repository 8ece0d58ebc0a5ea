"""Ground decision procedure and the exists/forall layer."""
import pytest

from rasv.decide import Decider, instance_from_model, model_elements
from rasv.randgen import (
    all_fragments,
    constraint_mismatch,
    holds,
    random_constraint,
)
from rasv.schema import ArtifactSetting, GROUND_NULL, Signature, Theory
from rasv.syntax import (
    App,
    Cst,
    ExistsForall,
    Read,
    Var,
    conj,
    eq,
    member,
    neq,
)


def line_theory(pack=None):
    sig = Signature()
    p = sig.add_sort("P", "id")
    v = sig.add_sort("V", "value")
    sig.add_const("a", v)
    sig.add_const("b", v)
    sig.add_func("f", p, v)
    return Theory(sig) if pack is None else Theory(sig, pack)


def parts(theory):
    sig = theory.sig
    return (Var("x", sig.sorts["P"]), Var("y", sig.sorts["P"]),
            Var("m", sig.sorts["V"]), sig.funcs["f"],
            Cst(sig.consts["a"]), Cst(sig.consts["b"]),
            Cst(sig.undef(sig.sorts["P"])), Cst(sig.undef(sig.sorts["V"])))


def test_null_propagation_depends_on_pack():
    x, _y, _m, f, _a, _b, uP, uV = parts(line_theory())
    atoms = [eq(x, uP), neq(App(f, x), uV)]
    ok, _ = Decider(line_theory()).sat_constraint(atoms)
    assert not ok  # x = undef forces f(x) = undef
    ok, _ = Decider(line_theory(GROUND_NULL)).sat_constraint(atoms)
    assert not ok  # still refuted: congruence with f(undef) = undef
    # the converse direction holds only under the biconditional pack
    atoms = [neq(x, uP), eq(App(f, x), uV)]
    ok, _ = Decider(line_theory()).sat_constraint(atoms)
    assert not ok
    ok, _ = Decider(line_theory(GROUND_NULL)).sat_constraint(atoms)
    assert ok


def test_congruence():
    th = line_theory()
    x, y, _m, f, a, b, _uP, _uV = parts(th)
    dec = Decider(th)
    ok, _ = dec.sat_constraint([eq(x, y), eq(App(f, x), a), eq(App(f, y), b)])
    assert not ok
    ok, _ = dec.sat_constraint([neq(x, y), eq(App(f, x), a), eq(App(f, y), b)])
    assert ok


def test_distinct_constants():
    th = line_theory()
    _x, _y, m, _f, a, b, _uP, _uV = parts(th)
    ok, _ = Decider(th).sat_constraint([eq(m, a), eq(m, b)])
    assert not ok


def test_membership():
    th = line_theory()
    sig = th.sig
    _x, _y, m, _f, a, b, _uP, _uV = parts(th)
    dec = Decider(th)
    ka, kb = sig.consts["a"], sig.consts["b"]
    ok, _ = dec.sat_constraint([member(m, [ka, kb]), neq(m, a), neq(m, b)])
    assert not ok
    assert dec.entails([member(m, [ka])], eq(m, a))
    ok, _ = dec.sat_constraint([member(m, [ka, kb], False), eq(m, a)])
    assert not ok


def test_model_completion():
    th = line_theory()
    x, y, m, f, a, _b, _uP, uV = parts(th)
    atoms = [neq(x, y), eq(App(f, x), a), neq(App(f, y), uV), eq(m, App(f, y))]
    ok, model = Decider(th).sat_constraint(atoms, want_model=True)
    assert ok
    inst = instance_from_model(th, model)
    elems = model_elements(model)
    env = {v: elems[v] for v in (x, y, m)}
    assert holds(inst, env, atoms)


def mini_art():
    st = ArtifactSetting(line_theory())
    A = st.add_artifact_sort("A")
    st.add_component("c", A, st.theory.sig.sorts["V"])
    return st


def test_exists_forall():
    st = mini_art()
    sig = st.theory.sig
    c = st.components["c"]
    a, b = Cst(sig.consts["a"]), Cst(sig.consts["b"])
    dec = Decider(st.theory)
    e0, e1 = Var("e0", st.artifact_sorts[0]), Var("e1", st.artifact_sorts[0])
    y = Var("y", st.artifact_sorts[0])

    # two rows with different values exist
    ok, _ = dec.sat_exists_forall(
        ExistsForall((e0, e1), conj(eq(Read(c, e0), a), eq(Read(c, e1), b))))
    assert ok
    # ... but not when every row must carry value a
    ok, _ = dec.sat_exists_forall(
        ExistsForall((e0, e1), conj(eq(Read(c, e0), a), eq(Read(c, e1), b)),
                     (((y,), eq(Read(c, y), a)),)))
    assert not ok
    # the universal part ranges over witnesses only: with no row demanded,
    # an empty working memory satisfies any universal constraint
    ok, _ = dec.sat_exists_forall(
        ExistsForall((), conj(neq(a, b)), (((y,), eq(Read(c, y), a)),)))
    assert ok


def test_exists_forall_merged_witness():
    # an equality in the matrix merges the two witnesses; universal parts
    # mentioning the merged-away variable must still be instantiated
    st = mini_art()
    sig = st.theory.sig
    c = st.components["c"]
    a = Cst(sig.consts["a"])
    b = Cst(sig.consts["b"])
    dec = Decider(st.theory)
    e0, e1 = Var("e0", st.artifact_sorts[0]), Var("e1", st.artifact_sorts[0])
    y = Var("y", st.artifact_sorts[0])
    ok, _ = dec.sat_exists_forall(
        ExistsForall((e0, e1), conj(eq(e0, e1), eq(Read(c, e0), a)),
                     (((y,), eq(Read(c, y), Read(c, e1))),)))
    assert ok
    ok, _ = dec.sat_exists_forall(
        ExistsForall((e0, e1), conj(eq(e0, e1), eq(Read(c, e0), a)),
                     (((y,), eq(Read(c, y), b)),)))
    assert not ok


def test_random_constraints_agree_with_enumeration(rng):
    checked = 0
    for theory in all_fragments():
        dec = Decider(theory)
        for _ in range(12):
            draw = random_constraint(rng, theory)
            if draw is None:
                continue
            variables, atoms = draw
            assert constraint_mismatch(dec, variables, atoms) is None
            checked += 1
    assert checked >= 30
