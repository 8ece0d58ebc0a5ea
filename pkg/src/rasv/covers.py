"""Quantifier elimination for existentially quantified basic variables.

``eliminate`` computes a cover: a quantifier-free residual equivalent to
the existential formula over *extensions* of a database instance (the
model-completion reading). It works one variable at a time by branching on
which known term the variable equals; the final branch makes it distinct
from all of them and keeps the variable-free literals plus every entailed
unit consequence over the connected terms. The undef constant is always
among the candidates, so the fresh branch has a definite undef-status and
unit consequences suffice for the Horn-style axiom packs.

``qe_state`` applies this to the output of a preimage computation: reads
at pairwise-distinct index variables are abstracted to opaque basic
variables, the bound basic variables are eliminated, and the reads are
restored.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .decide import Decider
from .syntax import (
    App,
    Atom,
    Component,
    Cst,
    Cube,
    ExtFormula,
    FALSE,
    Lit,
    Member,
    Read,
    Sort,
    TRUE,
    Term,
    Var,
    canon_cube,
    cube_formula,
    diff_normalize,
    eq,
    member,
    neq,
    subst_term,
    substitute,
    subterms,
    term_key,
    term_vars,
    to_dnf,
)


def _atom_terms(a: Atom) -> list[Term]:
    return [a.lhs, a.rhs] if isinstance(a, Lit) else [a.term]


def _subst_atom(a: Atom, binding: dict):
    if isinstance(a, Lit):
        return eq(subst_term(a.lhs, binding), subst_term(a.rhs, binding), a.pos)
    return member(subst_term(a.term, binding), a.elems, a.pos)


def _apply(cube: frozenset, binding: dict) -> Optional[frozenset]:
    out: set[Atom] = set()
    for a in cube:
        g = _subst_atom(a, binding)
        if g is FALSE:
            return None
        if g is TRUE:
            continue
        out.add(g)
    if any(a.negated in out for a in out):
        return None
    return frozenset(out)


def eliminate(decider: Decider, cube: Iterable[Atom], kill: Sequence[Var]) -> list[frozenset]:
    """Cover of exists(kill). AND(cube) as a disjunction of kill-free cubes.

    All terms must be basic-sorted; reads must have been abstracted away.
    """
    sig = decider.theory.sig
    results: list[frozenset] = []
    seen: set[frozenset] = set()

    def emit(c: frozenset) -> None:
        if c in seen:
            return
        seen.add(c)
        results.append(c)

    def go(cube: frozenset, remaining: tuple) -> None:
        if not decider.sat_constraint(cube)[0]:
            return
        remaining = tuple(v for v in remaining
                          if any(v in term_vars(t) for a in cube for t in _atom_terms(a)))
        if not remaining:
            emit(cube)
            return
        v, rest = remaining[0], remaining[1:]

        # terms the variable could coincide with: the function-closure of the
        # cube's terms, same sort, not mentioning any kill variable
        seeds: list[Term] = []
        for a in cube:
            for t in _atom_terms(a):
                seeds.extend(subterms(t))
            if isinstance(a, Member):
                seeds.extend(Cst(c) for c in a.elems)
        universe = sig.enum_terms(seeds)
        killset = set(remaining)
        candidates = [t for t in universe
                      if t.sort == v.sort and not (term_vars(t) & killset)]
        candidates.sort(key=term_key)

        for t in candidates:
            branch = _apply(cube, {v: t})
            if branch is not None:
                go(branch, rest)

        # fresh branch: v distinct from every candidate
        side = [x for x in (neq(v, t) for t in candidates) if x is not TRUE]
        if any(x is FALSE for x in side):
            return
        assumption = frozenset(cube) | frozenset(side)
        if not decider.sat_constraint(assumption)[0]:
            return
        residual = {a for a in cube if v not in set().union(
            *(term_vars(t) for t in _atom_terms(a)))}

        # unit consequences over terms connected to v
        conn_seeds: list[Term] = []
        member_sets: set[frozenset] = set()
        for a in cube:
            tvars = set().union(*(term_vars(t) for t in _atom_terms(a)))
            if v not in tvars:
                continue
            for t in _atom_terms(a):
                for s in subterms(t):
                    if v not in term_vars(s):
                        conn_seeds.append(s)
            if isinstance(a, Member):
                member_sets.add(a.elems)
                conn_seeds.extend(Cst(c) for c in a.elems)
        # later kill variables stay in: their unit consequences must be
        # recorded now, before they are eliminated in turn
        conn = [t for t in sig.enum_terms(conn_seeds) if v not in term_vars(t)]
        conn.sort(key=term_key)

        candidates_atoms: list[Atom] = []
        for t1, t2 in itertools.combinations(conn, 2):
            if t1.sort == t2.sort:
                for g in (eq(t1, t2), neq(t1, t2)):
                    if isinstance(g, (Lit, Member)):
                        candidates_atoms.append(g)
        for t in conn:
            for elems in member_sets:
                if next(iter(elems)).sort == t.sort:
                    for g in (member(t, elems, True), member(t, elems, False)):
                        if isinstance(g, (Lit, Member)):
                            candidates_atoms.append(g)
        for g in candidates_atoms:
            if g in residual or g.negated in residual:
                continue
            if decider.entails(assumption, g) and not decider.entails(residual, g):
                residual.add(g)
        go(frozenset(residual), rest)

    base = frozenset(cube)
    if any(a.negated in base for a in base):
        return []
    go(base, tuple(kill))

    # drop branches syntactically subsumed by a smaller residual
    results.sort(key=len)
    kept: list[frozenset] = []
    for c in results:
        if not any(k <= c for k in kept):
            kept.append(c)
    return kept


# ---------------------------------------------------------------------------
# state-formula reduction


def covered(decider: Decider, cube: Cube, others: Sequence[Cube]) -> bool:
    """True when every model of the cube already satisfies some other cube
    (so the cube is redundant as a disjunct)."""
    from .syntax import ExistsForall, negate, rename_cube
    if not others:
        return False
    parts = []
    for k, b in enumerate(others):
        b = rename_cube(b, f"@c{k}_")
        parts.append((b.bound, negate(cube_formula(b.lits))))
    ef = ExistsForall(cube.bound, cube_formula(cube.lits), tuple(parts))
    ok, _ = decider.sat_exists_forall(ef)
    return not ok


def qe_state(decider, setting, ext: ExtFormula) -> list[Cube]:
    """Normalize a raw preimage formula into reduced state-formula cubes:
    DNF, pairwise-distinct index variables, elimination of the bound basic
    variables, reads restored."""
    art_bound = tuple(v for v in ext.bound if not v.sort.is_basic)
    basic_bound = tuple(v for v in ext.bound if v.sort.is_basic)
    out: list[Cube] = []
    seen: set = set()
    for dnf_cube in to_dnf(ext.matrix):
        for branch in diff_normalize(art_bound, dnf_cube):
            read_vars: dict[tuple[Component, Var], Var] = {}
            witnesses = set(branch.bound)

            def abstract_term(t: Term) -> Term:
                if isinstance(t, Read):
                    idx = t.index
                    if not isinstance(idx, Var) or idx not in witnesses:
                        raise ValueError(f"read at non-index term: {t!r}")
                    key = (t.comp, idx)
                    if key not in read_vars:
                        read_vars[key] = Var(f"{t.comp.name}@{idx.name}", t.comp.target)
                    return read_vars[key]
                if isinstance(t, App):
                    return App(t.func, abstract_term(t.arg))
                return t

            atoms: set[Atom] = set()
            art_lits: set[Atom] = set()
            dead = False
            for a in branch.lits:
                if isinstance(a, Lit) and not a.lhs.sort.is_basic:
                    art_lits.add(a)  # index (dis)equalities stay verbatim
                    continue
                if isinstance(a, Lit):
                    g = eq(abstract_term(a.lhs), abstract_term(a.rhs), a.pos)
                else:
                    g = member(abstract_term(a.term), a.elems, a.pos)
                if g is FALSE:
                    dead = True
                    break
                if g is not TRUE:
                    atoms.add(g)
            if dead:
                continue

            back = {z: Read(comp, idx) for (comp, idx), z in read_vars.items()}
            for residual in eliminate(decider, atoms, basic_bound):
                lits: set[Atom] = set(art_lits)
                for a in residual:
                    lits.add(_subst_atom(a, back))
                cube = Cube(branch.bound, frozenset(lits))
                key = canon_cube(cube)
                if key not in seen:
                    seen.add(key)
                    out.append(cube)

    # drop disjuncts already covered by the remaining ones; try the most
    # entangled cubes first so they are the ones removed
    def entangled(c: Cube) -> int:
        bound = set(c.bound)
        worst = 0
        for a in c.lits:
            if isinstance(a, Lit) and not a.lhs.sort.is_basic:
                continue
            terms = [a.lhs, a.rhs] if isinstance(a, Lit) else [a.term]
            worst = max(worst, len(set().union(*(term_vars(t) for t in terms)) & bound))
        return worst

    kept = sorted(out, key=lambda c: (-entangled(c), -len(c.lits), -len(c.bound)))
    i = 0
    while i < len(kept):
        if covered(decider, kept[i], kept[:i] + kept[i + 1:]):
            del kept[i]
        else:
            i += 1
    kept.reverse()
    return kept
