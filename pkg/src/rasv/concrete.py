"""Finite-instance semantics: the independent ground-truth evaluator.

Explicitly enumerates database instances of bounded size, evaluates
formulae Tarski-style over them, and runs bounded forward reachability on
concrete working-memory states. Everything here is deliberately brute
force; the symbolic engine is tested against it, never the other way
around.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .schema import FULL_NULL, GROUND_NULL, GROUND_NULL_FK, ArtifactSetting, Theory
from .syntax import (
    And,
    App,
    CaseFn,
    Component,
    Const,
    Cst,
    Cube,
    ExistsForall,
    FALSE,
    Formula,
    Func,
    Lit,
    Member,
    Not,
    Or,
    Read,
    Sort,
    TRUE,
    Term,
    Transition,
    Var,
)

UNDEF = "undef"


@dataclass
class FiniteInstance:
    """A concrete database: per-sort carriers (strings; basic carriers always
    contain "undef"), total function maps, and constant denotations.

    Non-undef constants always denote themselves (the distinct-constants
    convention); undef denotes "undef".
    """
    theory: Theory
    carriers: dict  # Sort -> tuple[str, ...]
    func_maps: dict  # Func -> dict[str, str]

    def const_value(self, c: Const) -> str:
        return UNDEF if c.is_undef else c.name

    def check_axioms(self) -> bool:
        pack = self.theory.pack
        for f, m in self.func_maps.items():
            if pack == FULL_NULL:
                for x, y in m.items():
                    if (x == UNDEF) != (y == UNDEF):
                        return False
            else:
                if m.get(UNDEF) != UNDEF:
                    return False
        if pack == GROUND_NULL_FK:
            for fk in self.theory.fks:
                m1 = self.func_maps[fk.source_fn]
                m2 = self.func_maps[fk.target_fn]
                for x, y in m1.items():
                    if y != UNDEF and m2[y] == UNDEF:
                        return False
        return True


def enumerate_instances(
    theory: Theory,
    bounds: dict,
    funcs: Optional[Sequence[Func]] = None,
) -> Iterator[FiniteInstance]:
    """All instances with carrier sizes exactly as given (size counts undef
    for basic sorts; value-sort carriers additionally contain every declared
    constant). ``funcs`` restricts the enumeration to a subsignature;
    omitted functions get one fixed axiom-respecting map."""
    sig = theory.sig
    funcs = list(sig.funcs.values()) if funcs is None else list(funcs)
    carriers: dict[Sort, tuple[str, ...]] = {}
    for s in sig.basic_sorts:
        base = [UNDEF] + sorted(c.name for c in sig.consts.values() if c.sort == s)
        k = bounds.get(s.name, len(base))
        if k < len(base):
            k = len(base)
        extra = [f"{s.name.lower()}{i}" for i in range(k - len(base))]
        carriers[s] = tuple(base + extra)

    def maps_for(f: Func) -> Iterator[dict]:
        dom = carriers[f.source]
        rng = carriers[f.target]
        pack = theory.pack
        slots = []
        fixed: dict[str, str] = {}
        for x in dom:
            if x == UNDEF:
                fixed[x] = UNDEF
            elif pack == FULL_NULL:
                slots.append((x, [y for y in rng if y != UNDEF]))
            else:
                slots.append((x, list(rng)))
        for combo in itertools.product(*(choices for _x, choices in slots)):
            m = dict(fixed)
            for (x, _), y in zip(slots, combo):
                m[x] = y
            yield m

    def fixed_maps(f: Func) -> list[dict]:
        if theory.pack == FULL_NULL:
            # everywhere-undef would break the pack on non-undef inputs
            tgt = sorted(y for y in carriers[f.target] if y != UNDEF)
            if not tgt and any(x != UNDEF for x in carriers[f.source]):
                return []
            return [{x: (UNDEF if x == UNDEF else tgt[0])
                     for x in carriers[f.source]}]
        return [{x: UNDEF for x in carriers[f.source]}]

    all_funcs = list(sig.funcs.values())
    per_func: list[list[dict]] = []
    for f in all_funcs:
        if f in funcs:
            per_func.append(list(maps_for(f)))
        else:
            per_func.append(fixed_maps(f))
    for combo in itertools.product(*per_func):
        inst = FiniteInstance(theory, dict(carriers), dict(zip(all_funcs, combo)))
        if inst.check_axioms():
            yield inst


@dataclass(frozen=True)
class WmState:
    """Concrete working memory: artifact variable values plus, per artifact
    sort, a tuple of rows (one value per component, in a fixed component
    order)."""
    var_vals: tuple  # tuple[(Var, str), ...] sorted by name
    rows: tuple  # tuple[(Sort, tuple[row, ...]), ...]; row = tuple[str, ...]

    @staticmethod
    def make(var_vals: dict, rows: dict) -> "WmState":
        return WmState(
            tuple(sorted(var_vals.items(), key=lambda kv: kv[0].name)),
            tuple(sorted(((s, tuple(rs)) for s, rs in rows.items()),
                         key=lambda kv: kv[0].name)),
        )

    def var(self, v: Var) -> str:
        for w, val in self.var_vals:
            if w == v:
                return val
        raise KeyError(v.name)

    def sort_rows(self, s: Sort) -> tuple:
        for t, rs in self.rows:
            if t == s:
                return rs
        raise KeyError(s.name)

    def canonical(self) -> "WmState":
        """Rows within an artifact sort are interchangeable; sort them."""
        return WmState(self.var_vals,
                       tuple((s, tuple(sorted(rs))) for s, rs in self.rows))


@dataclass
class Evaluator:
    """Tarskian evaluation of terms and formulae over one instance and one
    working-memory state."""
    inst: FiniteInstance
    setting: ArtifactSetting
    wm: WmState

    def comp_slot(self, comp: Component) -> int:
        return self.setting.components_of(comp.source).index(comp)

    def term(self, t: Term, env: dict) -> str:
        if isinstance(t, Var):
            if t in env:
                return env[t]
            return self.wm.var(t)
        if isinstance(t, Cst):
            return self.inst.const_value(t.sym)
        if isinstance(t, App):
            return self.inst.func_maps[t.func][self.term(t.arg, env)]
        idx = self.term(t.index, env)  # Read: idx is a row number
        row = self.wm.sort_rows(t.comp.source)[int(idx)]
        return row[self.comp_slot(t.comp)]

    def formula(self, f: Formula, env: dict) -> bool:
        if f is TRUE:
            return True
        if f is FALSE:
            return False
        if isinstance(f, Lit):
            same = self.term(f.lhs, env) == self.term(f.rhs, env)
            return same == f.pos
        if isinstance(f, Member):
            inside = self.term(f.term, env) in {self.inst.const_value(c) for c in f.elems}
            return inside == f.pos
        if isinstance(f, Not):
            return not self.formula(f.arg, env)
        if isinstance(f, And):
            return all(self.formula(a, env) for a in f.args)
        if isinstance(f, Or):
            return any(self.formula(a, env) for a in f.args)
        raise TypeError(f"cannot evaluate {f!r}")

    def domain(self, s: Sort) -> list[str]:
        if s.is_basic:
            return list(self.inst.carriers[s])
        return [str(i) for i in range(len(self.wm.sort_rows(s)))]

    def exists(self, bound: Sequence[Var], matrix: Formula, env: Optional[dict] = None) -> bool:
        env = dict(env or {})
        doms = [self.domain(v.sort) for v in bound]
        for combo in itertools.product(*doms):
            env2 = dict(env)
            env2.update(zip(bound, combo))
            if self.formula(matrix, env2):
                return True
        return False

    def forall(self, bound: Sequence[Var], matrix: Formula, env: dict) -> bool:
        doms = [self.domain(v.sort) for v in bound]
        for combo in itertools.product(*doms):
            env2 = dict(env)
            env2.update(zip(bound, combo))
            if not self.formula(matrix, env2):
                return False
        return True

    def cube(self, c: Cube) -> bool:
        from .syntax import cube_formula
        return self.exists(c.bound, cube_formula(c.lits))

    def exists_forall(self, ef: ExistsForall) -> bool:
        doms = [self.domain(v.sort) for v in ef.exists]
        for combo in itertools.product(*doms):
            env = dict(zip(ef.exists, combo))
            if not self.formula(ef.matrix, env):
                continue
            if all(self.forall(vs, body, env) for vs, body in ef.univ_parts):
                return True
        return False


# ---------------------------------------------------------------------------
# forward execution


def initial_state(setting: ArtifactSetting, init: dict, sizes: dict) -> WmState:
    """Build the concrete working memory described by the initial assignment
    (artifact variables and components all map to constants) at the given
    per-artifact-sort row counts."""
    inst_of = lambda c: UNDEF if c.is_undef else c.name
    var_vals = {v: inst_of(init[v]) for v in setting.variables.values()}
    rows: dict[Sort, list] = {}
    for s in setting.artifact_sorts:
        comps = setting.components_of(s)
        row = tuple(inst_of(init[c]) for c in comps)
        rows[s] = [row] * sizes.get(s.name, 0)
    return WmState.make(var_vals, rows)


def successors(
    inst: FiniteInstance,
    setting: ArtifactSetting,
    wm: WmState,
    tau: Transition,
) -> Iterator[WmState]:
    """All states reachable from ``wm`` by one firing of ``tau`` (every
    choice of the fresh parameters)."""
    ev = Evaluator(inst, setting, wm)
    doms = [ev.domain(v.sort) for v in tau.fresh]
    for combo in itertools.product(*doms):
        env = dict(zip(tau.fresh, combo))
        if not ev.formula(tau.guard, env):
            continue
        def apply_case(fn: CaseFn, env2: dict) -> str:
            for guard, value in fn.cases:
                if ev.formula(guard, env2):
                    return ev.term(value, env2)
            raise AssertionError("case function without matching branch")
        new_vars = {v: ev.wm.var(v) for v in setting.variables.values()}
        for v, fn in tau.var_updates:
            new_vars[v] = apply_case(fn, env)
        new_rows: dict[Sort, list] = {}
        for s in setting.artifact_sorts:
            comps = setting.components_of(s)
            old = wm.sort_rows(s)
            updates = {c: (p, fn) for c, p, fn in tau.comp_updates if c.source == s}
            rows = []
            for j in range(len(old)):
                row = list(old[j])
                for slot, c in enumerate(comps):
                    if c in updates:
                        p, fn = updates[c]
                        env2 = dict(env)
                        env2[p] = str(j)
                        row[slot] = apply_case(fn, env2)
                rows.append(tuple(row))
            new_rows[s] = rows
        yield WmState.make(new_vars, new_rows)


@dataclass
class ReachResult:
    hit: Optional[WmState]
    steps: int
    visited: int
    trace: list = field(default_factory=list)  # [(transition name, WmState), ...]


def bounded_reach(
    inst: FiniteInstance,
    setting: ArtifactSetting,
    init: dict,
    transitions: Sequence[Transition],
    target_cubes: Sequence[Cube],
    sizes: dict,
    max_steps: int = 12,
    max_states: int = 200000,
) -> ReachResult:
    """Forward BFS from the initial state on one instance at fixed artifact
    carrier sizes; stops when some target cube holds."""
    start = initial_state(setting, init, sizes).canonical()
    def is_target(wm: WmState) -> bool:
        ev = Evaluator(inst, setting, wm)
        return any(ev.cube(c) for c in target_cubes)

    parent: dict[WmState, Optional[tuple[str, WmState]]] = {start: None}
    frontier = [start]
    if is_target(start):
        return ReachResult(start, 0, 1, [])
    for depth in range(1, max_steps + 1):
        nxt = []
        for wm in frontier:
            for tau in transitions:
                for succ in successors(inst, setting, wm, tau):
                    succ = succ.canonical()
                    if succ in parent:
                        continue
                    parent[succ] = (tau.name, wm)
                    if len(parent) > max_states:
                        return ReachResult(None, depth, len(parent))
                    if is_target(succ):
                        trace = []
                        node: Optional[WmState] = succ
                        while node is not None and parent[node] is not None:
                            name, prev = parent[node]  # type: ignore[misc]
                            trace.append((name, node))
                            node = prev
                        trace.reverse()
                        return ReachResult(succ, depth, len(parent), trace)
                    nxt.append(succ)
        if not nxt:
            break
        frontier = nxt
    return ReachResult(None, max_steps, len(parent))


# ---------------------------------------------------------------------------
# diagram and sketch completion


def diagram(inst: FiniteInstance) -> tuple[dict, Formula]:
    """Name every carrier element by a fresh variable and return the literal
    description of the instance: distinctness within sorts, all function
    values, and constant identifications."""
    from .syntax import conj, eq as mk_eq, neq as mk_neq

    sig = inst.theory.sig
    names: dict[tuple[Sort, str], Var] = {}
    lits: list[Formula] = []
    for s, elems in inst.carriers.items():
        for e in elems:
            names[(s, e)] = Var(f"@{s.name}.{e}", s)
        for e1, e2 in itertools.combinations(elems, 2):
            lits.append(mk_neq(names[(s, e1)], names[(s, e2)]))
    for s in sig.basic_sorts:
        lits.append(mk_eq(names[(s, UNDEF)], Cst(sig.undef(s))))
    for c in sig.consts.values():
        if c.name in inst.carriers[c.sort]:
            lits.append(mk_eq(names[(c.sort, c.name)], Cst(c)))
    for f, m in inst.func_maps.items():
        for x, y in m.items():
            lits.append(mk_eq(App(f, names[(f.source, x)]), names[(f.target, y)]))
    return names, conj(*lits)
