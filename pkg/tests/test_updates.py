"""Transition macros, compilation certificates, and symbolic preimages."""
import pytest

from rasv.decide import Decider
from rasv.randgen import (
    mini_setting,
    preimage_mismatch,
    random_mini_transition,
    random_state_cubes,
)
from rasv.syntax import Cst, Cube, Read, TRUE, Transition, Var, const_fn, eq, neq
from rasv.updates import (
    BulkMacro,
    DeleteMacro,
    InsertMacro,
    KEEP,
    LOCAL,
    PropagateMacro,
    RawTransition,
    STRONGLY_LOCAL,
    preimage,
    reduce_preimage,
    validate_transition,
)


def pieces():
    st = mini_setting()
    sig = st.theory.sig
    return st, dict(
        A=st.artifact_sorts[0], c1=st.components["c1"], c2=st.components["c2"],
        x=st.variables["x"], y=st.variables["y"],
        a=Cst(sig.consts["a"]), b=Cst(sig.consts["b"]),
        uP=Cst(sig.undef(sig.sorts["P"])), uV=Cst(sig.undef(sig.sorts["V"])),
    )


def test_macro_certificates():
    st, m = pieces()
    i = Var("i", m["A"])
    assert PropagateMacro("p", st, (), TRUE, {m["x"]: m["a"]}).compile() \
        .certificate == STRONGLY_LOCAL
    assert InsertMacro("ins", st, m["A"], i, row_values={m["c2"]: m["a"]}) \
        .compile().certificate == STRONGLY_LOCAL
    assert InsertMacro("ins", st, m["A"], i, row_values={m["c2"]: m["a"]},
                       suppress_when=[(m["c2"], m["a"])]).compile() \
        .certificate is None
    assert BulkMacro("blk", st, m["A"], updates={m["c2"]: (m["a"], KEEP)}) \
        .compile().certificate == STRONGLY_LOCAL
    # deletion propagating row values into kept variables is merely local;
    # overwriting every variable restores the strong certificate
    assert DeleteMacro("del", st, m["A"], i, sets={m["y"]: Read(m["c1"], i)}) \
        .compile().certificate == LOCAL
    assert DeleteMacro("del", st, m["A"], i,
                       sets={m["x"]: m["uV"], m["y"]: m["uP"]}).compile() \
        .certificate == STRONGLY_LOCAL
    assert RawTransition("r", PropagateMacro("p", st, (), TRUE, {}).compile().tau) \
        .compile().certificate is None


def test_macro_shape_restrictions():
    st, m = pieces()
    i = Var("i", m["A"])
    with pytest.raises(ValueError):
        # propagate guards may not inspect rows
        PropagateMacro("p", st, (), eq(Read(m["c2"], i), m["a"]), {}).compile()
    with pytest.raises(ValueError):
        # the row filter of a write may not involve artifact variables
        PropagateMacro("p", st, (), TRUE, {},
                       (m["c2"], i, m["a"], eq(Read(m["c2"], i), m["x"]))).compile()
    with pytest.raises(ValueError):
        BulkMacro("blk", st, m["A"], row_cond=eq(m["x"], m["a"]),
                  updates={m["c2"]: (m["a"], KEEP)}).compile()


def test_validate_transition():
    st, m = pieces()
    stray = Var("z", st.theory.sig.sorts["V"])
    tau = Transition("bad", (), TRUE, ((stray, const_fn(m["a"])),), ())
    with pytest.raises(ValueError):
        validate_transition(st, tau)
    tau = Transition("bad", (), TRUE, ((m["x"], const_fn(m["uP"])),), ())
    with pytest.raises(ValueError):
        validate_transition(st, tau)


def test_preimage_of_variable_update():
    st, m = pieces()
    dec = Decider(st.theory)
    ct = PropagateMacro("p", st, (), eq(m["y"], m["uP"]),
                        {m["x"]: m["a"]}).compile()
    target = Cube((), frozenset({eq(m["x"], m["a"])}))
    pre = reduce_preimage(dec, st, preimage(ct.tau, target))
    # after the update x = a always holds, so the preimage is the guard
    assert pre == [Cube((), frozenset({eq(m["y"], m["uP"])}))]
    target = Cube((), frozenset({eq(m["x"], m["b"])}))
    assert reduce_preimage(dec, st, preimage(ct.tau, target)) == []


def test_preimage_of_row_update():
    st, m = pieces()
    dec = Decider(st.theory)
    i = Var("i", m["A"])
    ct = DeleteMacro("del", st, m["A"], i,
                     sets={m["x"]: m["uV"], m["y"]: m["uP"]}).compile()
    k = Var("k", m["A"])
    target = Cube((k,), frozenset({neq(Read(m["c2"], k), m["uV"])}))
    pre = reduce_preimage(dec, st, preimage(ct.tau, target))
    # a defined row must survive, so the source state needs two rows: the
    # deleted one (defined, by the macro's guard) and the observed one
    assert pre
    assert all(len(c.bound) == 2 for c in pre)


def test_random_one_step_agreement(rng):
    st = mini_setting()
    dec = Decider(st.theory)
    done = 0
    while done < 8:
        ct = random_mini_transition(rng, st)
        cubes = random_state_cubes(rng, st)
        if ct is None or cubes is None:
            continue
        assert preimage_mismatch(dec, st, ct, cubes) is None
        done += 1
