"""Decision procedures over the database theory.

Two entry points:

* ``Decider.sat_constraint`` / ``Decider.sat_qf``: satisfiability of ground
  constraints (conjunctions of literals, optionally with extra clauses)
  modulo the axiom pack. Free variables are treated as fresh constants.
  Works by instantiating the universal axioms over the finite term universe
  (the function-closure of the occurring terms, finite by acyclicity of the
  characteristic graph) and running a small DPLL loop with congruence
  closure as the theory oracle.

* ``Decider.sat_exists_forall``: satisfiability of exists/forall sentences
  over the artifact extension. Universal variables range only over the
  existential witnesses of the same artifact sort (artifact carriers can be
  restricted to exactly the witness set, which may be empty), so the check
  reduces to finitely many ground constraints.

Positive answers come with a model sketch that can be completed to an
actual finite database instance.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .concrete import UNDEF, FiniteInstance
from .schema import FULL_NULL, Theory
from .syntax import (
    App,
    Atom,
    Component,
    Const,
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
    cube_formula,
    diff_normalize,
    eq,
    formula_terms,
    member,
    negate,
    subst_term,
    substitute,
    _partitions,
    subterms,
    term_key,
    to_dnf,
)


# ---------------------------------------------------------------------------
# congruence closure

class _CC:
    """Union-find with congruence propagation for unary applications."""

    def __init__(self) -> None:
        self.parent: dict[Term, Term] = {}
        self.uses: dict[Term, list[Term]] = {}  # rep -> application terms over it

    def add(self, t: Term) -> None:
        if t in self.parent:
            return
        self.parent[t] = t
        self.uses[t] = []
        if isinstance(t, App):
            self.add(t.arg)
            self.uses[self.find(t.arg)].append(t)
        elif isinstance(t, Read):
            self.add(t.index)
            self.uses[self.find(t.index)].append(t)

    def find(self, t: Term) -> Term:
        while self.parent[t] is not t:
            self.parent[t] = self.parent[self.parent[t]]
            t = self.parent[t]
        return t

    @staticmethod
    def _label(t: Term):
        if isinstance(t, App):
            return ("f", t.func.name)
        return ("c", t.comp.name)

    def merge(self, a: Term, b: Term) -> None:
        self.add(a)
        self.add(b)
        work = [(a, b)]
        while work:
            x, y = work.pop()
            rx, ry = self.find(x), self.find(y)
            if rx == ry:
                continue
            if len(self.uses[rx]) > len(self.uses[ry]):
                rx, ry = ry, rx
            self.parent[rx] = ry
            moved = self.uses.pop(rx)
            # congruence: applications of the same symbol to merged args coincide
            sigs = {}
            for app in self.uses[ry]:
                arg = app.arg if isinstance(app, App) else app.index
                sigs[(self._label(app), self.find(arg))] = app
            for app in moved:
                arg = app.arg if isinstance(app, App) else app.index
                key = (self._label(app), self.find(arg))
                if key in sigs:
                    work.append((app, sigs[key]))
                else:
                    sigs[key] = app
                    self.uses[ry].append(app)

    def same(self, a: Term, b: Term) -> bool:
        self.add(a)
        self.add(b)
        return self.find(a) == self.find(b)

    def classes(self) -> list[frozenset]:
        by_rep: dict[Term, set] = {}
        for t in self.parent:
            by_rep.setdefault(self.find(t), set()).add(t)
        return [frozenset(v) for v in by_rep.values()]


@dataclass
class Model:
    """Satisfying partition of the term universe into equivalence classes."""
    classes: list  # list[frozenset[Term]]

    def class_of(self, t: Term) -> frozenset:
        for c in self.classes:
            if t in c:
                return c
        raise KeyError(repr(t))


# ---------------------------------------------------------------------------
# decider


@dataclass
class SatSketch:
    """Everything needed to rebuild a witnessing finite instance."""
    model: Model
    witnesses: tuple = ()  # tuple[Var, ...] artifact-sorted, pairwise distinct
    read_vars: dict = field(default_factory=dict)  # (Component, Var) -> Var


class Decider:
    def __init__(self, theory: Theory) -> None:
        self.theory = theory
        self.calls = 0
        self._memo: dict = {}

    # -- ground layer ---------------------------------------------------------

    def _universe(self, terms: Iterable[Term]) -> list[Term]:
        return self.theory.sig.enum_terms(terms)

    def _axiom_clauses(self, universe: Sequence[Term]) -> list[list[Atom]]:
        out: list[list[Atom]] = []
        for v, body in self.theory.axioms():
            if v is None:
                insts = [body]
            else:
                insts = [substitute(body, {v: t}) for t in universe if t.sort == v.sort]
            for g in insts:
                if g is TRUE:
                    continue
                for cube in to_dnf(negate(g)):
                    out.append([a.negated for a in cube])
        return out

    def sat_qf(
        self,
        units: Iterable[Atom],
        clauses: Iterable[Sequence[Atom]] = (),
        want_model: bool = False,
    ) -> tuple[bool, Optional[Model]]:
        """Satisfiability of AND(units) AND AND(OR(clause)) modulo the axiom
        pack. Atoms are Lit or Member over basic-sorted terms."""
        self.calls += 1
        units = list(units)
        clauses = [list(c) for c in clauses]

        seeds: list[Term] = []
        for a in units:
            seeds.extend([a.lhs, a.rhs] if isinstance(a, Lit) else [a.term])
            if isinstance(a, Member):
                seeds.extend(Cst(c) for c in a.elems)
        for c in clauses:
            for a in c:
                seeds.extend([a.lhs, a.rhs] if isinstance(a, Lit) else [a.term])
                if isinstance(a, Member):
                    seeds.extend(Cst(x) for x in a.elems)
        flat: list[Term] = []
        for t in seeds:
            flat.extend(subterms(t))
        universe = self._universe(flat)
        clauses = clauses + self._axiom_clauses(universe)

        # membership atoms reduce to equality clauses with their elements
        members = set()
        for a in units + [a for c in clauses for a in c]:
            if isinstance(a, Member):
                members.add(Member(a.term, a.elems, True))
        for m in members:
            eqs = [eq(m.term, Cst(c)) for c in m.elems]
            if any(e is TRUE for e in eqs):
                clauses.append([m])
            else:
                clauses.append([m.negated] + [e for e in eqs if e is not FALSE])
            for e in eqs:
                if e is TRUE:
                    continue
                clauses.append([m] if e is FALSE else [m, e.negated])

        assign: dict[Atom, bool] = {}
        def norm(a: Atom) -> tuple[Atom, bool]:
            if isinstance(a, Lit):
                return (Lit(a.lhs, a.rhs, True), a.pos)
            return (Member(a.term, a.elems, True), a.pos)

        for a in units:
            key, pol = norm(a)
            if assign.get(key, pol) != pol:
                return (False, None)
            assign[key] = pol

        all_atoms: list[Atom] = []
        seen_atoms: set[Atom] = set()
        for a in list(assign) + [norm(a)[0] for c in clauses for a in c]:
            if a not in seen_atoms:
                seen_atoms.add(a)
                all_atoms.append(a)
        all_atoms.sort(key=repr)

        def theory_check(cur: dict[Atom, bool]) -> Optional[_CC]:
            cc = _CC()
            for t in universe:
                cc.add(t)
            for a, val in cur.items():
                if isinstance(a, Lit) and val:
                    cc.merge(a.lhs, a.rhs)
            # distinct named constants may never collapse
            for cls in cc.classes():
                consts = {t.sym for t in cls if isinstance(t, Cst)}
                if len(consts) > 1:
                    return None
            for a, val in cur.items():
                if isinstance(a, Lit) and not val and cc.same(a.lhs, a.rhs):
                    return None
            return cc

        def propagate(cur: dict[Atom, bool]) -> Optional[dict[Atom, bool]]:
            cur = dict(cur)
            changed = True
            while changed:
                changed = False
                for clause in clauses:
                    unassigned = []
                    sat = False
                    for lit in clause:
                        key, pol = norm(lit)
                        if key in cur:
                            if cur[key] == pol:
                                sat = True
                                break
                        else:
                            unassigned.append((key, pol))
                    if sat:
                        continue
                    if not unassigned:
                        return None
                    if len(unassigned) == 1:
                        key, pol = unassigned[0]
                        cur[key] = pol
                        changed = True
            return cur

        def dpll(cur: dict[Atom, bool]) -> Optional[dict[Atom, bool]]:
            nxt = propagate(cur)
            if nxt is None:
                return None
            if theory_check(nxt) is None:
                return None
            for a in all_atoms:
                if a not in nxt:
                    for val in (True, False):
                        trial = dict(nxt)
                        trial[a] = val
                        res = dpll(trial)
                        if res is not None:
                            return res
                    return None
            return nxt

        final = dpll(assign)
        if final is None:
            return (False, None)
        if not want_model:
            return (True, None)
        cc = theory_check(final)
        assert cc is not None
        return (True, Model(cc.classes()))

    def sat_constraint(self, atoms: Iterable[Atom], want_model: bool = False):
        atoms = frozenset(atoms)
        key = (atoms, want_model)
        if key not in self._memo:
            self._memo[key] = self.sat_qf(atoms, (), want_model=want_model)
        return self._memo[key]

    def entails(self, atoms: Iterable[Atom], consequence: Atom) -> bool:
        """AND(atoms) entails consequence modulo the axiom pack."""
        ok, _ = self.sat_qf(list(atoms) + [consequence.negated])
        return not ok

    # -- exists/forall layer ----------------------------------------------------

    def sat_exists_forall(self, ef: ExistsForall, want_model: bool = False):
        """Satisfiability of exists e.(matrix AND AND_j forall i_j. part_j)
        in the artifact extension; artifact-sorted bound variables index
        working-memory entries, reads become opaque basic terms.

        Returns (bool, SatSketch or None).
        """
        art_ex = tuple(dict.fromkeys(v for v in ef.exists if not v.sort.is_basic))
        for part in _partitions(list(art_ex)):
            if any(v.sort != grp[0].sort for grp in part for v in grp):
                continue
            # merge each group onto its representative, consistently across
            # the matrix and every universal part
            sub = {v: grp[0] for grp in part for v in grp}
            reps = tuple(dict.fromkeys(grp[0] for grp in part))
            matrix = substitute(ef.matrix, sub)
            univ = tuple((uvars, substitute(body, sub))
                         for uvars, body in ef.univ_parts)
            for cube in to_dnf(matrix):
                lits = set()
                clash = False
                for a in cube:
                    if isinstance(a, Lit) and not a.lhs.sort.is_basic:
                        # witness (in)equality is decided by the partition
                        if (a.lhs == a.rhs) != a.pos:
                            clash = True
                            break
                    else:
                        lits.add(a)
                if clash:
                    continue
                branch = Cube(reps, frozenset(lits))
                res = self._ef_branch(branch, univ, want_model)
                if res is not None:
                    return (True, res if want_model else None)
        return (False, None)

    def _ef_branch(self, branch: Cube, univ_parts, want_model):
        witnesses = branch.bound
        by_sort: dict[Sort, list[Var]] = {}
        for w in witnesses:
            by_sort.setdefault(w.sort, []).append(w)

        ground: list[Formula] = [cube_formula(branch.lits)]
        for uvars, body in univ_parts:
            candidate_sets = [by_sort.get(v.sort, []) for v in uvars]
            for combo in itertools.product(*candidate_sets):
                ground.append(substitute(body, dict(zip(uvars, combo))))

        distinct = set(witnesses)
        read_vars: dict[tuple[Component, Var], Var] = {}

        def abstract_term(t: Term) -> Term:
            if isinstance(t, Read):
                idx = t.index
                if not isinstance(idx, Var) or idx not in distinct:
                    raise ValueError(f"read at non-witness index: {t!r}")
                key = (t.comp, idx)
                if key not in read_vars:
                    read_vars[key] = Var(f"{t.comp.name}@{idx.name}", t.comp.target)
                return read_vars[key]
            if isinstance(t, App):
                return App(t.func, abstract_term(t.arg))
            return t

        def abstract(f: Formula) -> Formula:
            if f is TRUE or f is FALSE:
                return f
            if isinstance(f, Lit):
                if not f.lhs.sort.is_basic:
                    # both sides are witness variables: fixed by the branch
                    same = f.lhs == f.rhs
                    return TRUE if same == f.pos else FALSE
                return eq(abstract_term(f.lhs), abstract_term(f.rhs), f.pos)
            if isinstance(f, Member):
                return member(abstract_term(f.term), f.elems, f.pos)
            from .syntax import And, Not, Or, disj
            if isinstance(f, Not):
                return negate(abstract(f.arg))
            if isinstance(f, And):
                return conj(*(abstract(a) for a in f.args))
            if isinstance(f, Or):
                return disj(*(abstract(a) for a in f.args))
            raise TypeError(repr(f))

        clauses: list[list[Atom]] = []
        for g in ground:
            g = abstract(g)
            if g is TRUE:
                continue
            if g is FALSE:
                return None
            for ncube in to_dnf(negate(g)):
                clauses.append([a.negated for a in ncube])
        ok, model = self.sat_qf((), clauses, want_model=want_model)
        if not ok:
            return None
        if not want_model:
            return SatSketch(Model([]))
        return SatSketch(model, witnesses, dict(read_vars))

    def sat_cube(self, cube: Cube, want_model: bool = False):
        return self.sat_exists_forall(
            ExistsForall(cube.bound, cube_formula(cube.lits)), want_model=want_model
        )


# ---------------------------------------------------------------------------
# sketch completion


def _class_names(model: Model) -> tuple[dict, dict]:
    """Per basic sort the model's classes, and a stable element name per
    class (the contained constant if any, else an anonymous one)."""
    by_sort: dict[Sort, list[frozenset]] = {}
    for cls in model.classes:
        t = next(iter(cls))
        if t.sort.is_basic:
            by_sort.setdefault(t.sort, []).append(cls)

    names: dict[int, str] = {}
    counters: dict[Sort, int] = {}
    for s, classes in by_sort.items():
        for cls in classes:
            consts = sorted({t.sym for t in cls if isinstance(t, Cst)},
                            key=lambda c: (not c.is_undef, c.name))
            if consts and consts[0].is_undef:
                names[id(cls)] = UNDEF
            elif consts:
                names[id(cls)] = consts[0].name
            else:
                counters[s] = counters.get(s, 0)
                names[id(cls)] = f"{s.name.lower()}{counters[s]}"
                counters[s] += 1
    return by_sort, names


def model_elements(model: Model) -> dict[Term, str]:
    """Element name (as used by ``instance_from_model``) for every
    basic-sorted term of the model."""
    by_sort, names = _class_names(model)
    out: dict[Term, str] = {}
    for classes in by_sort.values():
        for cls in classes:
            for t in cls:
                out[t] = names[id(cls)]
    return out


def instance_from_model(theory: Theory, model: Model) -> FiniteInstance:
    """Complete a satisfying partition into an actual finite database
    instance: one element per class, named by the constant it contains if
    any. Every universal axiom holds on the constrained part because the
    term universe was closed under the signature functions before the
    axioms were instantiated; padding elements get axiom-respecting
    defaults."""
    sig = theory.sig
    by_sort, names = _class_names(model)

    carriers: dict[Sort, set] = {}
    for s in sig.basic_sorts:
        elems = {UNDEF} | {c.name for c in sig.consts.values() if c.sort == s}
        elems |= {names[id(cls)] for cls in by_sort.get(s, [])}
        carriers[s] = elems
    if theory.pack == FULL_NULL:
        # padding targets need a non-undef fallback in every function range
        for f in sig.funcs.values():
            if not any(e != UNDEF for e in carriers[f.target]):
                carriers[f.target].add(f"{f.target.name.lower()}!")

    def class_name(t: Term) -> Optional[str]:
        for cls in model.classes:
            if t in cls:
                return names[id(cls)]
        return None

    func_maps: dict = {}
    for f in sig.funcs.values():
        fallback = sorted(e for e in carriers[f.target] if e != UNDEF)
        default = fallback[0] if theory.pack == FULL_NULL else UNDEF
        m: dict[str, str] = {}
        for cls in by_sort.get(f.source, []):
            x = names[id(cls)]
            y = None
            for t in cls:
                y = class_name(App(f, t))
                if y is not None:
                    break
            m[x] = y if y is not None else (UNDEF if x == UNDEF else default)
        for x in carriers[f.source]:
            if x not in m:
                m[x] = UNDEF if x == UNDEF else default
        m[UNDEF] = UNDEF
        func_maps[f] = m

    inst = FiniteInstance(theory,
                          {s: tuple(sorted(es)) for s, es in carriers.items()},
                          func_maps)
    if not inst.check_axioms():
        raise AssertionError("sketch completion violated the axiom pack")
    return inst
