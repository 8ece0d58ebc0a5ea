"""Formula layer: smart constructors, normal forms, cube canonicalization."""
import hypothesis.strategies as st
from hypothesis import given, settings

from rasv.schema import Signature
from rasv.syntax import (
    And,
    Cst,
    Cube,
    FALSE,
    Lit,
    Member,
    Not,
    Or,
    TRUE,
    Var,
    canon_cube,
    conj,
    diff_normalize,
    disj,
    eq,
    member,
    negate,
    neq,
    rename_cube,
    to_dnf,
)


def _mini():
    sig = Signature()
    P = sig.add_sort("P", "id")
    V = sig.add_sort("V", "value")
    a = sig.add_const("a", V)
    b = sig.add_const("b", V)
    A = sig.add_sort("A", "artifact")
    return sig, P, V, a, b, A


SIG, P, V, CA, CB, A = _mini()
X, Y = Var("x", V), Var("y", V)


def test_eq_canonical():
    assert eq(X, X) is TRUE
    assert eq(Cst(CA), Cst(CA)) is TRUE
    assert eq(Cst(CA), Cst(CB)) is FALSE
    assert isinstance(neq(Cst(CA), Cst(CB)), type(TRUE))
    # orientation is stable: both spellings build the same literal
    assert eq(X, Cst(CA)) == eq(Cst(CA), X)


def test_member_constant_folding():
    assert member(Cst(CA), [CA, CB]) is TRUE
    assert member(Cst(CA), [CB]) is FALSE
    # a one-element membership degenerates to a (dis)equality
    assert member(X, [CA], False) == neq(X, Cst(CA))


def test_connective_flattening():
    f = conj(eq(X, Cst(CA)), conj(eq(Y, Cst(CB)), TRUE))
    assert isinstance(f, And) and len(f.args) == 2
    assert conj(eq(X, Cst(CA)), FALSE) is FALSE
    assert disj(eq(X, Cst(CA)), FALSE) == eq(X, Cst(CA))
    assert disj(eq(X, Cst(CA)), TRUE) is TRUE


def test_to_dnf():
    f = disj(conj(eq(X, Cst(CA)), eq(Y, Cst(CB))), eq(X, Cst(CB)))
    cubes = to_dnf(f)
    assert frozenset({eq(X, Cst(CB))}) in cubes
    assert frozenset({eq(X, Cst(CA)), eq(Y, Cst(CB))}) in cubes
    assert len(cubes) == 2
    # contradictory cubes are dropped
    assert to_dnf(conj(eq(X, Cst(CA)), neq(X, Cst(CA)))) == []


def test_diff_normalize_branches():
    i, j = Var("i", A), Var("j", A)
    cubes = diff_normalize((i, j), {eq(X, Cst(CA))})
    bounds = sorted(tuple(v.name for v in c.bound) for c in cubes)
    assert bounds == [("i",), ("i", "j")]
    two = next(c for c in cubes if len(c.bound) == 2)
    assert neq(i, j) in two.lits


def test_canon_cube_rename_invariant():
    i = Var("i", A)
    c = Cube((i,), frozenset({eq(X, Cst(CA)), neq(Y, Cst(CB))}))
    assert canon_cube(c) == canon_cube(rename_cube(c, "fresh"))


# ---------------------------------------------------------------------------
# property tests

_atoms = st.sampled_from([
    eq(X, Cst(CA)), neq(X, Cst(CA)), eq(Y, Cst(CB)), neq(X, Y),
    member(X, [CA, CB]), member(Y, [CA, CB], False),
])

_formulas = st.recursive(
    _atoms | st.just(TRUE) | st.just(FALSE),
    lambda kids: st.builds(conj, kids, kids) | st.builds(disj, kids, kids)
    | st.builds(negate, kids),
    max_leaves=12,
)


@given(_formulas)
def test_negate_involution(f):
    assert negate(negate(f)) == f


@given(_formulas)
def test_negation_normal_form(f):
    # smart constructors push negation to the literals
    stack = [f]
    while stack:
        g = stack.pop()
        assert not isinstance(g, Not)
        if isinstance(g, (And, Or)):
            stack.extend(g.args)


@given(_formulas)
@settings(max_examples=60)
def test_dnf_cubes_consistent(f):
    for cube in to_dnf(f):
        assert not any(a.negated in cube for a in cube)
