"""Transition application: symbolic preimages and the update macros.

A transition is a guarded assignment: fresh existential parameters, a
guard over the current state, and one case-defined update per artifact
variable and per component. ``preimage`` substitutes the updates into a
state-formula cube, turning each post-state symbol occurrence into a
guarded disjunction over the update cases; ``reduce`` then normalizes the
result back into state-formula cubes through quantifier elimination.

The macro layer provides the four schematic update shapes (delete, insert,
propagate, bulk) whose compiled transitions carry a locality certificate.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .covers import qe_state
from .schema import ArtifactSetting
from .syntax import (
    App,
    Atom,
    CaseFn,
    Component,
    Const,
    Cst,
    Cube,
    ExtFormula,
    FALSE,
    Formula,
    Lit,
    Member,
    Read,
    Sort,
    TRUE,
    Term,
    Transition,
    Var,
    conj,
    const_fn,
    cube_formula,
    disj,
    eq,
    formula_vars,
    member,
    neq,
    rename_cube,
    term_vars,
)

STRONGLY_LOCAL = "strongly-local"
LOCAL = "local"
NOT_LOCAL = "not-local"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class CompiledTransition:
    """A transition plus the locality certificate its shape licenses
    (None when the shape gives no guarantee)."""
    tau: Transition
    certificate: Optional[str] = None


# ---------------------------------------------------------------------------
# preimage


def validate_transition(setting: ArtifactSetting, tau: Transition) -> None:
    art_vars = set(setting.variables.values())
    for v, fn in tau.var_updates:
        if v not in art_vars:
            raise ValueError(f"{tau.name}: update of non-artifact variable {v.name}")
        if fn.sort != v.sort:
            raise ValueError(f"{tau.name}: update of {v.name} has sort {fn.sort}")
    for c, p, fn in tau.comp_updates:
        if c not in setting.components.values():
            raise ValueError(f"{tau.name}: update of unknown component {c.name}")
        if p.sort != c.source:
            raise ValueError(f"{tau.name}: index parameter {p.name} has wrong sort")
        if fn.sort != c.target:
            raise ValueError(f"{tau.name}: update of {c.name} has sort {fn.sort}")


def preimage(tau: Transition, cube: Cube, prefix: str = "j") -> ExtFormula:
    """Symbolic one-step preimage of a state-formula cube.

    The cube's index variables are renamed apart from the transition's
    fresh parameters; every occurrence of an updated symbol is replaced by
    the guarded disjunction over the update's cases.
    """
    cube = rename_cube(cube, prefix)
    var_fns = dict(tau.var_updates)
    comp_fns = {c: (p, fn) for c, p, fn in tau.comp_updates}

    def rewrite(t: Term) -> list[tuple[Formula, Term]]:
        if isinstance(t, Var):
            fn = var_fns.get(t)
            if fn is None:
                return [(TRUE, t)]
            return fn.branches()
        if isinstance(t, Cst):
            return [(TRUE, t)]
        if isinstance(t, App):
            return [(g, App(t.func, s)) for g, s in rewrite(t.arg)]
        out: list[tuple[Formula, Term]] = []
        for g, idx in rewrite(t.index):
            upd = comp_fns.get(t.comp)
            if upd is None:
                out.append((g, Read(t.comp, idx)))
            else:
                p, fn = upd
                for h, val in fn.substituted({p: idx}).branches():
                    out.append((conj(g, h), val))
        return out

    def rewrite_atom(a: Atom) -> Formula:
        if isinstance(a, Lit):
            parts = [conj(g1, g2, eq(l, r, a.pos))
                     for g1, l in rewrite(a.lhs)
                     for g2, r in rewrite(a.rhs)]
        else:
            parts = [conj(g, member(s, a.elems, a.pos)) for g, s in rewrite(a.term)]
        return disj(*parts)

    matrix = conj(tau.guard, *(rewrite_atom(a) for a in sorted(cube.lits, key=repr)))
    return ExtFormula(tuple(tau.fresh) + cube.bound, matrix)


def reduce_preimage(decider, setting: ArtifactSetting, ext: ExtFormula) -> list[Cube]:
    return qe_state(decider, setting, ext)


# ---------------------------------------------------------------------------
# macros

KEEP = "keep"


def _identity_updates(setting: ArtifactSetting, explicit: dict) -> tuple:
    out = []
    for v in setting.variables.values():
        fn = explicit.get(v)
        out.append((v, fn if fn is not None else const_fn(v)))
    return tuple(out)


def _check_basic_value(t: Term) -> None:
    if not t.sort.is_basic:
        raise ValueError(f"value {t!r} is not basic-sorted")


@dataclass
class DeleteMacro:
    """Clear one row of an artifact sort, optionally harvesting its values
    into artifact variables first.

    ``where`` may mention artifact variables, the fresh witnesses, and
    reads at ``row``. Every artifact variable not assigned in ``sets``
    keeps its value; keeping values makes the transition merely local
    instead of strongly local.
    """
    name: str
    setting: ArtifactSetting
    sort: Sort
    row: Var
    fresh: tuple = ()
    where: Formula = TRUE
    require_defined: Optional[Sequence[Component]] = None
    sets: dict = field(default_factory=dict)  # Var -> Term (reads at row, fresh, consts)

    def compile(self) -> CompiledTransition:
        st = self.setting
        comps = st.components_of(self.sort)
        required = list(comps) if self.require_defined is None else list(self.require_defined)
        guard_parts: list[Formula] = [self.where]
        for c in required:
            guard_parts.append(neq(Read(c, self.row), Cst(st.theory.sig.undef(c.target))))
        var_updates: dict[Var, CaseFn] = {}
        for v, t in self.sets.items():
            _check_basic_value(t)
            var_updates[v] = const_fn(t)
        comp_updates = []
        for c in comps:
            p = Var("@y", self.sort)
            undef = Cst(st.theory.sig.undef(c.target))
            comp_updates.append((c, p, CaseFn(((eq(p, self.row), undef),
                                               (TRUE, Read(c, p))))))
        tau = Transition(self.name, (self.row,) + tuple(self.fresh),
                         conj(*guard_parts),
                         _identity_updates(st, var_updates),
                         tuple(comp_updates))
        validate_transition(st, tau)
        propagated = [v for v in st.variables.values() if v not in self.sets]
        cert = LOCAL if propagated else STRONGLY_LOCAL
        return CompiledTransition(tau, cert)


@dataclass
class InsertMacro:
    """Fill one currently-empty row of an artifact sort.

    ``row_values`` gives the new row (artifact variables, fresh witnesses,
    or constants). ``empty_guard`` lists the components that must be undef
    at the chosen row (default: all of them). ``suppress_when`` optionally
    zeroes every other row agreeing with the given component values
    (duplicate suppression), which forfeits the strong-locality
    certificate.
    """
    name: str
    setting: ArtifactSetting
    sort: Sort
    row: Var
    fresh: tuple = ()
    where: Formula = TRUE
    empty_guard: Optional[Sequence[Component]] = None
    row_values: dict = field(default_factory=dict)  # Component -> Term
    sets: dict = field(default_factory=dict)  # Var -> Term
    suppress_when: Optional[Sequence] = None  # [(Component, Term), ...]

    def compile(self) -> CompiledTransition:
        st = self.setting
        sig = st.theory.sig
        comps = st.components_of(self.sort)
        empties = list(comps) if self.empty_guard is None else list(self.empty_guard)
        guard_parts: list[Formula] = [self.where]
        for c in empties:
            guard_parts.append(eq(Read(c, self.row), Cst(sig.undef(c.target))))
        var_updates: dict[Var, CaseFn] = {}
        for v, t in self.sets.items():
            _check_basic_value(t)
            var_updates[v] = const_fn(t)
        comp_updates = []
        for c in comps:
            p = Var("@y", self.sort)
            undef = Cst(sig.undef(c.target))
            new_val = self.row_values.get(c, undef)
            _check_basic_value(new_val)
            cases = [(eq(p, self.row), new_val)]
            if self.suppress_when:
                dup = conj(*(eq(Read(sc, p), sv) for sc, sv in self.suppress_when))
                cases.append((dup, undef))
            cases.append((TRUE, Read(c, p)))
            comp_updates.append((c, p, CaseFn(tuple(cases))))
        tau = Transition(self.name, (self.row,) + tuple(self.fresh),
                         conj(*guard_parts),
                         _identity_updates(st, var_updates),
                         tuple(comp_updates))
        validate_transition(st, tau)
        cert = None if self.suppress_when else STRONGLY_LOCAL
        return CompiledTransition(tau, cert)


@dataclass
class PropagateMacro:
    """Update artifact variables from the database and each other, without
    touching any row, optionally writing one witnessed value into a single
    row cell.

    For the certificate to be valid the write value must not occur in
    literals together with artifact variables; the compiler enforces the
    syntactic separation (``where`` may not read rows; ``row_where``
    constrains only reads at the written row and fresh witnesses).
    """
    name: str
    setting: ArtifactSetting
    fresh: tuple = ()
    where: Formula = TRUE
    sets: dict = field(default_factory=dict)  # Var -> Term
    write: Optional[tuple] = None  # (Component, row Var, value Term, row_where Formula)

    def compile(self) -> CompiledTransition:
        st = self.setting
        for a in _formula_atoms_terms(self.where):
            if isinstance(a, Read):
                raise ValueError(f"{self.name}: propagate guard may not read rows")
        var_updates: dict[Var, CaseFn] = {}
        for v, t in self.sets.items():
            _check_basic_value(t)
            var_updates[v] = const_fn(t)
        fresh = tuple(self.fresh)
        guard = self.where
        comp_updates = []
        if self.write is not None:
            comp, row, value, row_where = self.write
            art_vars = set(st.variables.values())
            for t in _formula_atoms_terms(row_where):
                if isinstance(t, Var) and t in art_vars:
                    raise ValueError(f"{self.name}: row guard may not mention artifact variables")
            if isinstance(value, Var) and value in formula_vars(self.where):
                raise ValueError(f"{self.name}: written value entangled with the main guard")
            fresh = fresh + (row,)
            guard = conj(guard, row_where)
            p = Var("@y", comp.source)
            comp_updates.append((comp, p, CaseFn(((eq(p, row), value),
                                                  (TRUE, Read(comp, p))))))
        tau = Transition(self.name, fresh, guard,
                         _identity_updates(st, var_updates), tuple(comp_updates))
        validate_transition(st, tau)
        return CompiledTransition(tau, STRONGLY_LOCAL)


@dataclass
class BulkMacro:
    """Rewrite a component across all rows at once: rows whose current
    values satisfy ``row_cond`` (a condition on reads at the quantified row
    only) get ``then_value``, the rest keep their value or get
    ``else_value``. ``var_cond`` restricts the artifact variables."""
    name: str
    setting: ArtifactSetting
    sort: Sort
    var_cond: Formula = TRUE
    row_param: Optional[Var] = None
    row_cond: Formula = TRUE
    updates: dict = field(default_factory=dict)  # Component -> (then Const|Term, else KEEP|Term)
    sets: dict = field(default_factory=dict)  # Var -> Term (constants)

    def compile(self) -> CompiledTransition:
        st = self.setting
        art_vars = set(st.variables.values())
        for t in _formula_atoms_terms(self.var_cond):
            if isinstance(t, Read):
                raise ValueError(f"{self.name}: variable condition may not read rows")
        p = self.row_param if self.row_param is not None else Var("@y", self.sort)
        for t in _formula_atoms_terms(self.row_cond):
            if isinstance(t, Var) and t in art_vars:
                raise ValueError(f"{self.name}: row condition may not mention artifact variables")
            if isinstance(t, Read) and t.index != p:
                raise ValueError(f"{self.name}: row condition reads a foreign row")
        var_updates: dict[Var, CaseFn] = {}
        for v, t in self.sets.items():
            _check_basic_value(t)
            var_updates[v] = const_fn(t)
        comp_updates = []
        for c, (then_v, else_v) in self.updates.items():
            then_t = Cst(then_v) if isinstance(then_v, Const) else then_v
            if else_v == KEEP:
                else_t: Term = Read(c, p)
            else:
                else_t = Cst(else_v) if isinstance(else_v, Const) else else_v
            comp_updates.append((c, p, CaseFn(((self.row_cond, then_t),
                                               (TRUE, else_t)))))
        tau = Transition(self.name, (), self.var_cond,
                         _identity_updates(st, var_updates), tuple(comp_updates))
        validate_transition(st, tau)
        return CompiledTransition(tau, STRONGLY_LOCAL)


def _formula_atoms_terms(f: Formula):
    from .syntax import formula_terms, subterms as _sub
    for t in formula_terms(f):
        yield from _sub(t)


@dataclass
class RawTransition:
    """A transition given directly in the guarded-assignment format; no
    shape certificate."""
    name: str
    tau: Transition

    def compile(self) -> CompiledTransition:
        return CompiledTransition(self.tau, None)
