"""Random generators plus exhaustive concrete checkers.

Everything the differential test suites need: random constraints,
primitive formulas, exists/forall sentences, transitions, and whole
variable-only systems, together with brute-force agreement checks against
instance enumeration. The checkers return None on agreement and a short
mismatch description otherwise.

Quantifier elimination and constraint satisfiability are checked per
reachable sub-signature of the benchmark schemas so that exhaustive
instance enumeration stays affordable; the fragments jointly cover every
function symbol of both benchmarks.
"""
from __future__ import annotations

import itertools
from typing import Iterable, Optional, Sequence

from .concrete import (
    UNDEF,
    Evaluator,
    FiniteInstance,
    WmState,
    diagram,
    enumerate_instances,
    successors,
)
from .covers import eliminate
from .decide import Decider, instance_from_model, model_elements
from .schema import ArtifactSetting, Signature, Theory
from .search import RasSystem
from .syntax import (
    App,
    Component,
    Cst,
    Cube,
    ExistsForall,
    FALSE,
    Formula,
    Lit,
    Member,
    Read,
    Sort,
    TRUE,
    Term,
    Var,
    conj,
    const_fn,
    CaseFn,
    cube_formula,
    diff_normalize,
    disj,
    eq,
    formula_atoms,
    formula_terms,
    member,
    neq,
    subterms,
)
from .updates import (
    BulkMacro,
    CompiledTransition,
    DeleteMacro,
    InsertMacro,
    KEEP,
    PropagateMacro,
    RawTransition,
    preimage,
    reduce_preimage,
)
from .syntax import Transition


# ---------------------------------------------------------------------------
# benchmark schema fragments


def hr_fragments() -> list[Theory]:
    out = []

    sig = Signature()
    u = sig.add_sort("UserId", "id")
    s = sig.add_sort("String", "value")
    for n in ("enabled", "received"):
        sig.add_const(n, s)
    sig.add_func("userName", u, s)
    out.append(Theory(sig))

    sig = Signature()
    c = sig.add_sort("CompInId", "id")
    e = sig.add_sort("EmpId", "id")
    s = sig.add_sort("String", "value")
    for n in ("winner", "loser"):
        sig.add_const(n, s)
    sig.add_func("who", c, e)
    sig.add_func("empName", e, s)
    out.append(Theory(sig))

    sig = Signature()
    c = sig.add_sort("CompInId", "id")
    j = sig.add_sort("JobCatId", "id")
    s = sig.add_sort("String", "value")
    for n in ("enabled", "notified"):
        sig.add_const(n, s)
    sig.add_func("what", c, j)
    sig.add_func("jobCatDescr", j, s)
    out.append(Theory(sig))

    sig = Signature()
    c = sig.add_sort("CompInId", "id")
    e = sig.add_sort("EmpId", "id")
    j = sig.add_sort("JobCatId", "id")
    sig.add_func("who", c, e)
    sig.add_func("what", c, j)
    out.append(Theory(sig))
    return out


def flight_fragments() -> list[Theory]:
    sig = Signature()
    f = sig.add_sort("FlightId", "id")
    c = sig.add_sort("CityId", "id")
    sig.add_func("destination", f, c)
    return [Theory(sig)]


def all_fragments() -> list[Theory]:
    return hr_fragments() + flight_fragments()


# ---------------------------------------------------------------------------
# concrete evaluation of basic-sorted atoms (no working memory involved)


def eval_term(inst: FiniteInstance, env: dict, t: Term) -> str:
    if isinstance(t, Var):
        return env[t]
    if isinstance(t, Cst):
        return inst.const_value(t.sym)
    if isinstance(t, App):
        return inst.func_maps[t.func][eval_term(inst, env, t.arg)]
    raise TypeError(f"not a database term: {t!r}")


def eval_atom(inst: FiniteInstance, env: dict, a) -> bool:
    if isinstance(a, Lit):
        same = eval_term(inst, env, a.lhs) == eval_term(inst, env, a.rhs)
        return same == a.pos
    inside = eval_term(inst, env, a.term) in {inst.const_value(c) for c in a.elems}
    return inside == a.pos


def holds(inst: FiniteInstance, env: dict, atoms: Iterable) -> bool:
    return all(eval_atom(inst, env, a) for a in atoms)


# ---------------------------------------------------------------------------
# random constraints and primitive formulas over a fragment


def _term_pool(theory: Theory, variables: Sequence[Var]) -> list[Term]:
    pool = list(theory.sig.enum_terms(list(variables)))
    for c in theory.sig.consts.values():
        t = Cst(c)
        if t not in pool:
            pool.append(t)
    return pool


def _random_atoms(rng, theory: Theory, pool: Sequence[Term], lo: int, hi: int):
    """A consistent-by-construction set of random atoms, or None when the
    draw collapsed to an outright contradiction."""
    sig = theory.sig
    atoms = set()
    for _ in range(rng.randint(lo, hi)):
        t1 = rng.choice(pool)
        consts = sig.constants_of(t1.sort, with_undef=False)
        if t1.sort.kind == "value" and len(consts) >= 2 and rng.random() < 0.25:
            a = member(t1, rng.sample(consts, 2), rng.random() < 0.7)
        else:
            mates = [t for t in pool if t.sort == t1.sort]
            a = eq(t1, rng.choice(mates), rng.random() < 0.6)
        if a is FALSE:
            return None
        if isinstance(a, (Lit, Member)):
            atoms.add(a)
    if any(a.negated in atoms for a in atoms):
        return None
    return atoms


def random_primitive(rng, theory: Theory, max_vars: int = 3):
    """(variables, kill set, atoms) for a random primitive existential
    formula exists(kill). AND(atoms), or None on a degenerate draw."""
    sorts = theory.sig.basic_sorts
    variables = tuple(Var(f"v{i}", rng.choice(sorts))
                      for i in range(rng.randint(1, max_vars)))
    atoms = _random_atoms(rng, theory, _term_pool(theory, variables), 1, 4)
    if not atoms:
        return None
    kill = tuple(rng.sample(list(variables), rng.randint(1, len(variables))))
    return variables, kill, frozenset(atoms)


def random_constraint(rng, theory: Theory, max_vars: int = 3):
    """(variables, atoms) with every variable occurring in some atom."""
    sorts = theory.sig.basic_sorts
    variables = tuple(Var(f"v{i}", rng.choice(sorts))
                      for i in range(rng.randint(1, max_vars)))
    atoms = _random_atoms(rng, theory, _term_pool(theory, variables), 1, 5)
    if not atoms:
        return None
    occurring = set()
    for a in atoms:
        for t in ([a.lhs, a.rhs] if isinstance(a, Lit) else [a.term]):
            for s in subterms(t):
                if isinstance(s, Var):
                    occurring.add(s)
    variables = tuple(v for v in variables if v in occurring)
    if not variables:
        return None
    return variables, frozenset(atoms)


# ---------------------------------------------------------------------------
# agreement checks


def _value_bound(theory: Theory, s: Sort) -> int:
    return 2 + len(theory.sig.constants_of(s, with_undef=False))


def _exists_in_extension(decider: Decider, inst: FiniteInstance, env: dict,
                         atoms, kill) -> bool:
    """Does exists(kill). AND(atoms) hold in some extension of the instance
    under the given free-variable assignment?"""
    doms = [inst.carriers[v.sort] for v in kill]
    for combo in itertools.product(*doms):
        env2 = dict(env)
        env2.update(zip(kill, combo))
        if holds(inst, env2, atoms):
            return True
    names, diag = diagram(inst)
    units = list(formula_atoms(diag))
    binds = [eq(v, names[(v.sort, val)]) for v, val in env.items()]
    ok, _ = decider.sat_constraint(frozenset(units + binds + list(atoms)))
    return ok


def qe_mismatch(decider: Decider, variables, kill, atoms,
                max_size: int = 3) -> Optional[str]:
    """Compare eliminate's residual with the extension semantics of the
    existential formula on every instance within the size bounds."""
    theory = decider.theory
    residual = eliminate(decider, atoms, list(kill))
    free = [v for v in variables if v not in kill]
    occurring = {v.sort for v in variables}

    axes = []
    for s in theory.sig.sorts.values():
        if not s.is_basic:
            continue
        if s.kind == "id":
            axes.append((s.name, list(range(1, max_size + 1))
                         if s in occurring else [2]))
        else:
            axes.append((s.name, [_value_bound(theory, s)]))
    for sizes in itertools.product(*(vals for _n, vals in axes)):
        bounds = {n: k for (n, _vals), k in zip(axes, sizes)}
        for inst in enumerate_instances(theory, bounds):
            doms = [inst.carriers[v.sort] for v in free]
            for combo in itertools.product(*doms):
                env = dict(zip(free, combo))
                rhs = any(holds(inst, env, cube) for cube in residual)
                lhs = _exists_in_extension(decider, inst, env, atoms, kill)
                if lhs != rhs:
                    return (f"bounds={bounds} env={ {v.name: e for v, e in env.items()} }"
                            f" exists={lhs} residual={rhs}")
    return None


def constraint_mismatch(decider: Decider, variables, atoms,
                        max_size: int = 3) -> Optional[str]:
    """SAT answers must complete to a real satisfying instance; UNSAT
    answers must survive exhaustive enumeration within the size bounds."""
    theory = decider.theory
    ok, model = decider.sat_qf(atoms, (), want_model=True)
    if ok:
        inst = instance_from_model(theory, model)
        elems = model_elements(model)
        env = {v: elems[v] for v in variables}
        if not holds(inst, env, atoms):
            return "SAT sketch does not complete to a satisfying instance"
        return None
    closure = theory.sig.enum_terms(list(variables))
    bounds = {}
    for s in theory.sig.sorts.values():
        if not s.is_basic:
            continue
        if s.kind == "id":
            need = 1 + sum(1 for t in closure if t.sort == s)
            bounds[s.name] = min(need, max_size)
        else:
            bounds[s.name] = _value_bound(theory, s)
    for inst in enumerate_instances(theory, bounds):
        doms = [inst.carriers[v.sort] for v in variables]
        for combo in itertools.product(*doms):
            if holds(inst, dict(zip(variables, combo)), atoms):
                return f"claimed UNSAT, satisfied at bounds={bounds}"
    return None


# ---------------------------------------------------------------------------
# random exists/forall sentences over a benchmark artifact setting


def _ef_comps(setting: ArtifactSetting) -> list[Component]:
    # skip components whose target carries a huge constant vocabulary
    sig = setting.theory.sig
    return [c for c in setting.components.values()
            if len(sig.constants_of(c.target, with_undef=False)) <= 8]


def random_ef(rng, setting: ArtifactSetting,
              max_exists: int = 2) -> Optional[ExistsForall]:
    sig = setting.theory.sig
    comps = _ef_comps(setting)
    sorts = sorted({c.source for c in comps}, key=lambda s: s.name)
    if not sorts:
        return None
    exists = tuple(Var(f"e{i}", rng.choice(sorts))
                   for i in range(rng.randint(1, max_exists)))

    def term_pool(index_vars: Sequence[Var]) -> list[Term]:
        pool: list[Term] = []
        for v in index_vars:
            for c in comps:
                if c.source == v.sort:
                    r = Read(c, v)
                    pool.append(r)
                    for f in sig.funcs_from(c.target):
                        pool.append(App(f, r))
        for s in sorted({t.sort for t in pool}, key=lambda s: s.name):
            pool.append(Cst(sig.undef(s)))
            pool.extend(Cst(c) for c in sig.constants_of(s, with_undef=False)[:3])
        return pool

    pool = term_pool(exists)
    parts = []
    atoms = []
    for _ in range(rng.randint(1, 4)):
        if len(exists) >= 2 and rng.random() < 0.15:
            e1, e2 = rng.sample(list(exists), 2)
            if e1.sort == e2.sort:
                atoms.append(eq(e1, e2, rng.random() < 0.5))
                continue
        t1 = rng.choice(pool)
        mates = [t for t in pool if t.sort == t1.sort]
        atoms.append(eq(t1, rng.choice(mates), rng.random() < 0.6))
    matrix = conj(*atoms)
    if matrix is FALSE or matrix is TRUE:
        return None

    if rng.random() < 0.5:
        y = Var("u0", rng.choice(sorts))
        upool = term_pool((y,) + exists)
        disjuncts = []
        for _ in range(rng.randint(1, 2)):
            t1 = rng.choice(upool)
            mates = [t for t in upool if t.sort == t1.sort]
            disjuncts.append(eq(t1, rng.choice(mates), rng.random() < 0.5))
        body = disj(*disjuncts)
        if body is not TRUE and body is not FALSE:
            parts.append(((y,), body))
    return ExistsForall(exists, matrix, tuple(parts))


def _ef_symbols(ef: ExistsForall):
    comps, funcs, consts = set(), set(), set()
    formulas = [ef.matrix] + [body for _vs, body in ef.univ_parts]
    for f in formulas:
        for t in formula_terms(f):
            for s in subterms(t):
                if isinstance(s, Read):
                    comps.add(s.comp)
                elif isinstance(s, App):
                    funcs.add(s.func)
                elif isinstance(s, Cst) and not s.sym.is_undef:
                    consts.add(s.sym)
    return comps, funcs, consts


def enum_wms(setting: ArtifactSetting, rows_count: dict, comp_pools: dict,
             var_pools: Optional[dict] = None):
    """All working-memory states with the given row counts; components and
    variables absent from the pools stay undef."""
    var_items = list(setting.variables.values())
    vp = [list((var_pools or {}).get(v, [UNDEF])) for v in var_items]
    sorts = setting.artifact_sorts
    per_sort = []
    for s in sorts:
        comps = setting.components_of(s)
        pools = [list(comp_pools.get(c, [UNDEF])) for c in comps]
        rowspace = list(itertools.product(*pools))
        k = rows_count.get(s, 0)
        per_sort.append(list(itertools.combinations_with_replacement(rowspace, k)))
    for vcombo in itertools.product(*vp):
        for rcombo in itertools.product(*per_sort):
            yield WmState.make(dict(zip(var_items, vcombo)),
                               {s: list(rs) for s, rs in zip(sorts, rcombo)})


def ef_mismatch(decider: Decider, setting: ArtifactSetting,
                ef: ExistsForall) -> Optional[str]:
    """SAT sketches must complete to a concrete witness; UNSAT must survive
    enumeration of instances and working memories within small bounds."""
    theory = setting.theory
    sig = theory.sig
    ok, sketch = decider.sat_exists_forall(ef, want_model=True)
    comps, funcs, consts = _ef_symbols(ef)

    if ok:
        inst = instance_from_model(theory, sketch.model)
        elems = model_elements(sketch.model)
        rows: dict[Sort, list] = {s: [] for s in setting.artifact_sorts}
        for w in sketch.witnesses:
            row = []
            for c in setting.components_of(w.sort):
                z = sketch.read_vars.get((c, w))
                row.append(elems.get(z, UNDEF) if z is not None else UNDEF)
            rows[w.sort].append(tuple(row))
        var_vals = {v: elems.get(v, UNDEF) for v in setting.variables.values()}
        wm = WmState.make(var_vals, rows)
        if not Evaluator(inst, setting, wm).exists_forall(ef):
            return "SAT sketch does not complete to a concrete witness"
        return None

    bounds = {s.name: 2 for s in sig.basic_sorts if s.kind == "id"}
    need = {s: sum(1 for v in ef.exists if v.sort == s)
            for s in setting.artifact_sorts}
    comp_pools = {}
    for c in comps:
        pool = {UNDEF}
        pool |= {k.name for k in consts if k.sort == c.target}
        carrier_extra = [e for e in
                         ([UNDEF] + sorted(k.name for k in sig.consts.values()
                                           if k.sort == c.target)
                          + [f"{c.target.name.lower()}0"])
                         if e not in pool]
        pool |= set(carrier_extra[:2])
        comp_pools[c] = sorted(pool)
    counts_options = [range(0, need[s] + 1) for s in setting.artifact_sorts]
    for inst in enumerate_instances(theory, bounds, funcs=sorted(funcs, key=lambda f: f.name)):
        usable = {c: [e for e in pool if e in inst.carriers[c.target]]
                  for c, pool in comp_pools.items()}
        for counts in itertools.product(*counts_options):
            rc = dict(zip(setting.artifact_sorts, counts))
            for wm in enum_wms(setting, rc, usable):
                if Evaluator(inst, setting, wm).exists_forall(ef):
                    return f"claimed UNSAT, witnessed at bounds={bounds} rows={counts}"
    return None


# ---------------------------------------------------------------------------
# random transitions and state formulas over a fixed miniature setting


def mini_setting() -> ArtifactSetting:
    sig = Signature()
    p = sig.add_sort("P", "id")
    v = sig.add_sort("V", "value")
    sig.add_const("a", v)
    sig.add_const("b", v)
    sig.add_func("h", p, v)
    st = ArtifactSetting(Theory(sig))
    a = st.add_artifact_sort("A")
    st.add_component("c1", a, p)
    st.add_component("c2", a, v)
    st.add_variable("x", v)
    st.add_variable("y", p)
    return st


def _mini_parts(st: ArtifactSetting):
    sig = st.theory.sig
    return dict(
        P=sig.sorts["P"], V=sig.sorts["V"], A=st.artifact_sorts[0],
        c1=st.components["c1"], c2=st.components["c2"],
        x=st.variables["x"], y=st.variables["y"],
        a=Cst(sig.consts["a"]), b=Cst(sig.consts["b"]),
        uP=Cst(sig.undef(sig.sorts["P"])), uV=Cst(sig.undef(sig.sorts["V"])),
        h=sig.funcs["h"],
    )


def _rand_eqs(rng, pool: Sequence[Term], lo: int, hi: int) -> Optional[set]:
    atoms = set()
    for _ in range(rng.randint(lo, hi)):
        t1 = rng.choice(pool)
        mates = [t for t in pool if t.sort == t1.sort]
        g = eq(t1, rng.choice(mates), rng.random() < 0.6)
        if g is FALSE:
            return None
        if isinstance(g, Lit):
            atoms.add(g)
    if any(a.negated in atoms for a in atoms):
        return None
    return atoms


def random_mini_transition(rng, st: ArtifactSetting,
                           name: str = "t") -> Optional[CompiledTransition]:
    m = _mini_parts(st)
    kind = rng.choice(["propagate", "delete", "insert", "bulk", "raw"])
    A, c1, c2, x, y = m["A"], m["c1"], m["c2"], m["x"], m["y"]
    a, b, uP, uV, h = m["a"], m["b"], m["uP"], m["uV"], m["h"]
    try:
        if kind == "propagate":
            fresh = (Var("w", rng.choice([m["P"], m["V"]])),) if rng.random() < 0.6 else ()
            pool = [x, y, a, b, uP, uV, App(h, y)] + list(fresh)
            guard_atoms = _rand_eqs(rng, pool, 0, 3)
            if guard_atoms is None:
                return None
            sets = {}
            for v in rng.sample([x, y], rng.randint(0, 2)):
                opts = [t for t in pool if t.sort == v.sort and t != v]
                if opts:
                    sets[v] = rng.choice(opts)
            write = None
            if rng.random() < 0.4:
                i = Var("i", A)
                value = rng.choice([a, b, uV])
                rpool = [Read(c1, i), Read(c2, i), a, b, uP, uV]
                rw = _rand_eqs(rng, rpool, 0, 2)
                if rw is None:
                    return None
                write = (c2, i, value, conj(*sorted(rw, key=repr)))
            return PropagateMacro(name, st, fresh, conj(*sorted(guard_atoms, key=repr)),
                                  sets, write).compile()
        if kind == "delete":
            i = Var("i", A)
            pool = [x, y, a, b, uP, uV, Read(c1, i), Read(c2, i)]
            guard_atoms = _rand_eqs(rng, pool, 0, 2)
            if guard_atoms is None:
                return None
            require = rng.choice([None, [c1], [c2], [c1, c2]])
            sets = {}
            if rng.random() < 0.5:
                sets[y] = Read(c1, i)
            if rng.random() < 0.3:
                sets[x] = rng.choice([Read(c2, i), a])
            return DeleteMacro(name, st, A, i, (), conj(*sorted(guard_atoms, key=repr)),
                               require, sets).compile()
        if kind == "insert":
            i = Var("i", A)
            pool = [x, y, a, b, uP, uV, App(h, y)]
            guard_atoms = _rand_eqs(rng, pool, 0, 2)
            if guard_atoms is None:
                return None
            empty = rng.choice([None, [c1], [c1, c2]])
            row_values = {c1: y, c2: rng.choice([x, a, b])}
            suppress = [(c2, x)] if rng.random() < 0.4 else None
            sets = {x: uV} if rng.random() < 0.5 else {}
            return InsertMacro(name, st, A, i, (), conj(*sorted(guard_atoms, key=repr)),
                               empty, row_values, sets, suppress).compile()
        if kind == "bulk":
            j = Var("j", A)
            var_atoms = _rand_eqs(rng, [x, y, a, b, uP, uV], 0, 2)
            row_atoms = _rand_eqs(rng, [Read(c1, j), Read(c2, j), a, b, uP, uV], 1, 2)
            if var_atoms is None or row_atoms is None:
                return None
            updates = {c2: (rng.choice([a, b, uV]),
                            KEEP if rng.random() < 0.6 else rng.choice([b, uV]))}
            if rng.random() < 0.3:
                updates[c1] = (uP, KEEP)
            sets = {x: a} if rng.random() < 0.3 else {}
            return BulkMacro(name, st, A, conj(*sorted(var_atoms, key=repr)), j,
                             conj(*sorted(row_atoms, key=repr)), updates, sets).compile()
        # raw: a guarded point update with a data-dependent case
        i = Var("i", A)
        pool = [x, y, a, b, uP, uV, Read(c1, i), Read(c2, i), App(h, y)]
        guard_atoms = _rand_eqs(rng, pool, 0, 3)
        if guard_atoms is None:
            return None
        p = Var("r", A)
        cases = []
        if rng.random() < 0.5:
            cases.append((eq(p, i), rng.choice([a, b, uV, x])))
        if rng.random() < 0.5:
            cases.append((eq(Read(c2, p), x), rng.choice([uV, b])))
        cases.append((TRUE, Read(c2, p)))
        comp_updates = ((c2, p, CaseFn(tuple(cases))),)
        var_updates = []
        for v in (x, y):
            if rng.random() < 0.3:
                var_updates.append((v, const_fn(rng.choice(
                    [t for t in [a, b, uP, uV, x, y] if t.sort == v.sort]))))
            else:
                var_updates.append((v, const_fn(v)))
        tau = Transition(name, (i,), conj(*sorted(guard_atoms, key=repr)),
                         tuple(var_updates), comp_updates)
        return RawTransition(name, tau).compile()
    except ValueError:
        return None


def random_state_cubes(rng, st: ArtifactSetting) -> Optional[list[Cube]]:
    m = _mini_parts(st)
    A, c1, c2, x, y = m["A"], m["c1"], m["c2"], m["x"], m["y"]
    bound = tuple(Var(f"k{i}", A) for i in range(rng.randint(0, 2)))
    pool = [x, y, m["a"], m["b"], m["uP"], m["uV"], App(m["h"], y)]
    for v in bound:
        pool.extend([Read(c1, v), Read(c2, v)])
    atoms = _rand_eqs(rng, pool, 1, 3)
    if not atoms:
        return None
    cubes = diff_normalize(bound, atoms)
    return cubes or None


def preimage_mismatch(decider: Decider, st: ArtifactSetting,
                      ct: CompiledTransition,
                      cubes: list[Cube]) -> Optional[str]:
    """One-step agreement: the reduced symbolic preimage holds exactly in
    the states with a successor satisfying the formula."""
    theory = st.theory
    pre: list[Cube] = []
    for c in cubes:
        pre.extend(reduce_preimage(decider, st, preimage(ct.tau, c)))
    A = st.artifact_sorts[0]
    m = _mini_parts(st)
    for inst in enumerate_instances(theory, {"P": 3}):
        pools = {m["c1"]: inst.carriers[m["P"]], m["c2"]: inst.carriers[m["V"]]}
        vpools = {m["x"]: inst.carriers[m["V"]], m["y"]: inst.carriers[m["P"]]}
        for nrows in (1, 2):
            for wm in enum_wms(st, {A: nrows}, pools, vpools):
                ev = Evaluator(inst, st, wm)
                lhs = any(ev.cube(pc) for pc in pre)
                rhs = any(Evaluator(inst, st, succ).cube(c)
                          for succ in successors(inst, st, wm, ct.tau)
                          for c in cubes)
                if lhs != rhs:
                    return (f"{ct.tau.name}: rows={nrows} pre={lhs} "
                            f"concrete={rhs} wm={wm}")
    return None


# ---------------------------------------------------------------------------
# random variable-only systems


def random_sas(rng, tag: str, max_sorts: int = 6,
               max_transitions: int = 8) -> Optional[RasSystem]:
    sig = Signature()
    sorts = []
    n = rng.randint(2, max_sorts)
    for i in range(n):
        kind = "id" if rng.random() < 0.6 else "value"
        s = sig.add_sort(f"S{i}", kind)
        sorts.append(s)
        if kind == "value" or rng.random() < 0.3:
            for k in range(rng.randint(1, 2)):
                sig.add_const(f"k{i}_{k}", s)
    fcount = 0
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.3:
                sig.add_func(f"f{fcount}", sorts[i], sorts[j])
                fcount += 1
    st = ArtifactSetting(Theory(sig))
    variables = [st.add_variable(f"x{i}", rng.choice(sorts))
                 for i in range(rng.randint(2, 4))]

    def pool_over(extra: Sequence[Var]) -> list[Term]:
        base: list[Term] = list(variables) + list(extra)
        for t in list(base):
            for f in sig.funcs_from(t.sort):
                base.append(App(f, t))
        for s in sorted({t.sort for t in base}, key=lambda s: s.name):
            base.append(Cst(sig.undef(s)))
            base.extend(Cst(c) for c in sig.constants_of(s, with_undef=False))
        return base

    transitions = []
    for t in range(rng.randint(2, max_transitions)):
        fresh = tuple(Var(f"w{t}_{i}", rng.choice(sorts))
                      for i in range(rng.randint(0, 2)))
        pool = pool_over(fresh)
        guard_atoms = _rand_eqs(rng, pool, 0, 3)
        if guard_atoms is None:
            continue
        sets = {}
        for v in rng.sample(variables, rng.randint(1, len(variables))):
            opts = [u for u in pool if u.sort == v.sort and u != v]
            if opts:
                sets[v] = rng.choice(opts)
        if not sets:
            continue
        transitions.append(PropagateMacro(
            f"t{t}", st, fresh, conj(*sorted(guard_atoms, key=repr)), sets).compile())
    if not transitions:
        return None
    target = _rand_eqs(rng, pool_over(()), 1, 3)
    if not target:
        return None
    return RasSystem(tag, st, {}, transitions,
                     {"target": [Cube((), frozenset(target))]})
