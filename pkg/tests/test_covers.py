"""Quantifier elimination on covers and cube subsumption."""
from rasv.covers import covered, eliminate
from rasv.decide import Decider
from rasv.randgen import all_fragments, qe_mismatch, random_primitive
from rasv.schema import Signature, Theory
from rasv.syntax import App, Cst, Cube, Var, eq, member, neq


def line():
    sig = Signature()
    p = sig.add_sort("P", "id")
    v = sig.add_sort("V", "value")
    sig.add_const("a", v)
    sig.add_const("b", v)
    sig.add_func("f", p, v)
    th = Theory(sig)
    return th, Decider(th)


def test_eliminate_by_substitution():
    th, dec = line()
    sig = th.sig
    x, y = Var("x", sig.sorts["P"]), Var("y", sig.sorts["P"])
    a = Cst(sig.consts["a"])
    f = sig.funcs["f"]
    res = eliminate(dec, {eq(x, y), eq(App(f, x), a)}, [x])
    assert res == [frozenset({eq(App(f, y), a)})]


def test_eliminate_keeps_entailed_consequences():
    # the witness is gone but the axioms still talk about its image:
    # exists x (f(x) = m and x != undef) forces m != undef
    th, dec = line()
    sig = th.sig
    x = Var("x", sig.sorts["P"])
    m = Var("m", sig.sorts["V"])
    uP, uV = Cst(sig.undef(sig.sorts["P"])), Cst(sig.undef(sig.sorts["V"]))
    f = sig.funcs["f"]
    res = eliminate(dec, {eq(App(f, x), m), neq(x, uP)}, [x])
    assert res == [frozenset({neq(m, uV)})]


def test_eliminate_ignores_foreign_variables():
    th, dec = line()
    sig = th.sig
    x = Var("x", sig.sorts["P"])
    m = Var("m", sig.sorts["V"])
    a = Cst(sig.consts["a"])
    assert eliminate(dec, {eq(m, a)}, [x]) == [frozenset({eq(m, a)})]


def test_eliminate_unsat_input():
    th, dec = line()
    sig = th.sig
    m = Var("m", sig.sorts["V"])
    a, b = Cst(sig.consts["a"]), Cst(sig.consts["b"])
    assert eliminate(dec, {eq(m, a), eq(m, b)}, []) == []


def test_covered():
    th, dec = line()
    sig = th.sig
    m = Var("m", sig.sorts["V"])
    a, b = Cst(sig.consts["a"]), Cst(sig.consts["b"])
    narrow = Cube((), frozenset({eq(m, a)}))
    wide = Cube((), frozenset({member(m, [sig.consts["a"], sig.consts["b"]])}))
    other = Cube((), frozenset({eq(m, b)}))
    assert covered(dec, narrow, [narrow])
    assert covered(dec, narrow, [wide])
    assert not covered(dec, wide, [narrow])
    assert covered(dec, wide, [narrow, other])
    assert not covered(dec, narrow, [other])


def test_residuals_agree_with_extension_semantics(rng):
    checked = 0
    for theory in all_fragments():
        dec = Decider(theory)
        for _ in range(5):
            draw = random_primitive(rng, theory)
            if draw is None:
                continue
            variables, kill, atoms = draw
            assert qe_mismatch(dec, variables, kill, atoms) is None
            checked += 1
    assert checked >= 12
