"""Syntactic fragments with termination guarantees.

Locality of state-formula cubes is purely syntactic: apart from the
(dis)equalities between the index variables themselves, a local cube never
mentions two index variables in one literal, and a strongly local cube
additionally never mixes artifact variables with reads in one literal.

Transitions are graded semantically (does the preimage operator preserve
these shapes?), so the checker combines two sources: shape certificates
carried by compiled macros, and probe preimages that can definitively
refute locality but never certify it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .decide import Decider
from .schema import ArtifactSetting
from .syntax import (
    Atom,
    Cst,
    Cube,
    Lit,
    Read,
    Var,
    cube_formula,
    eq,
    neq,
    term_vars,
)
from .updates import (
    LOCAL,
    NOT_LOCAL,
    STRONGLY_LOCAL,
    UNKNOWN,
    CompiledTransition,
    preimage,
    reduce_preimage,
)

TERMINATES_NO_RELATIONS = "terminates-thm-5.1"
TERMINATES_LOCAL = "terminates-thm-5.2"
TERMINATES_TREE = "terminates-thm-5.3"
NO_GUARANTEE = "no-guarantee"


@dataclass
class CubeGrade:
    local: bool
    strongly_local: bool
    witness: Optional[Atom] = None  # first offending literal


def _atom_reads(a: Atom) -> list[Read]:
    out = []
    terms = [a.lhs, a.rhs] if isinstance(a, Lit) else [a.term]
    stack = list(terms)
    while stack:
        t = stack.pop()
        if isinstance(t, Read):
            out.append(t)
            stack.append(t.index)
        elif hasattr(t, "arg"):
            stack.append(t.arg)
    return out


def grade_cube(setting: ArtifactSetting, cube: Cube) -> CubeGrade:
    bound = set(cube.bound)
    art_vars = set(setting.variables.values())
    local = True
    strong = True
    witness = None
    for a in sorted(cube.lits, key=repr):
        terms = [a.lhs, a.rhs] if isinstance(a, Lit) else [a.term]
        if isinstance(a, Lit) and not a.lhs.sort.is_basic:
            continue  # (dis)equality between index variables is exempt
        mentioned = set()
        for t in terms:
            mentioned |= term_vars(t) & bound
        if len(mentioned) > 1:
            local = False
            strong = False
            if witness is None:
                witness = a
            continue
        free_art = set()
        for t in terms:
            free_art |= (term_vars(t) - bound) & art_vars
        if _atom_reads(a) and free_art:
            strong = False
            if witness is None:
                witness = a
    return CubeGrade(local, strong, witness)


def grade_state_formula(setting: ArtifactSetting, cubes: Sequence[Cube]) -> CubeGrade:
    worst = CubeGrade(True, True)
    for c in cubes:
        g = grade_cube(setting, c)
        worst.local &= g.local
        worst.strongly_local &= g.strongly_local
        if worst.witness is None:
            worst.witness = g.witness
    return worst


# ---------------------------------------------------------------------------
# transition grading


@dataclass
class TransitionGrade:
    name: str
    grade: str  # strongly-local | local | not-local | unknown
    basis: str  # "shape" | "probe"
    witness: Optional[str] = None


def _probe_cubes(setting: ArtifactSetting) -> list[Cube]:
    """Small strongly local cubes used to look for locality-breaking
    preimages."""
    probes = []
    for comp in setting.components.values():
        y = Var("@p", comp.source)
        undef = Cst(setting.theory.sig.undef(comp.target))
        probes.append(Cube((y,), frozenset({neq(Read(comp, y), undef)})))
        probes.append(Cube((y,), frozenset({eq(Read(comp, y), undef)})))
    for v in setting.variables.values():
        undef = Cst(setting.theory.sig.undef(v.sort))
        probes.append(Cube((), frozenset({neq(v, undef)})))
    return probes


def grade_transition(
    setting: ArtifactSetting,
    decider: Decider,
    ct: CompiledTransition,
    extra_probes: Sequence[Cube] = (),
) -> TransitionGrade:
    name = ct.tau.name
    if ct.certificate is not None:
        return TransitionGrade(name, ct.certificate, "shape")
    strong_refuted = False
    witness = None
    for probe in list(_probe_cubes(setting)) + list(extra_probes):
        if not grade_cube(setting, probe).strongly_local:
            continue
        ext = preimage(ct.tau, probe, prefix="@q")
        for cube in reduce_preimage(decider, setting, ext):
            g = grade_cube(setting, cube)
            if not g.local:
                return TransitionGrade(name, NOT_LOCAL, "probe", repr(g.witness))
            if not g.strongly_local:
                strong_refuted = True
                if witness is None:
                    witness = repr(g.witness)
    # probes cannot certify; the best we can report is ignorance
    return TransitionGrade(name, UNKNOWN, "probe",
                           witness if strong_refuted else None)


# ---------------------------------------------------------------------------
# system classification


@dataclass
class Classification:
    acyclic: bool
    tree_like: bool
    sas: bool
    transitions: list  # list[TransitionGrade]
    properties: dict  # name -> CubeGrade
    verdict: str
    detail: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "acyclic": self.acyclic,
            "tree_like": self.tree_like,
            "sas": self.sas,
            "transitions": {g.name: {"grade": g.grade, "basis": g.basis,
                                     **({"witness": g.witness} if g.witness else {})}
                            for g in self.transitions},
            "properties": {n: {"local": g.local, "strongly_local": g.strongly_local}
                           for n, g in self.properties.items()},
            "verdict": self.verdict,
            **({"detail": self.detail} if self.detail else {}),
        }


def classify(system) -> Classification:
    setting = system.setting
    sig = setting.theory.sig
    decider = Decider(setting.theory)
    acyclic = sig.check_acyclic() is None
    tree_like, tree_reason = setting.check_tree_like()
    sas = not setting.components
    grades = [grade_transition(setting, decider, ct) for ct in system.transitions]
    prop_grades = {n: grade_state_formula(setting, cubes)
                   for n, cubes in system.properties.items()}

    detail = None
    if sas and acyclic:
        verdict = TERMINATES_NO_RELATIONS
    elif tree_like:
        verdict = TERMINATES_TREE
    elif (acyclic
          and all(g.grade in (LOCAL, STRONGLY_LOCAL) for g in grades)
          and all(g.local for g in prop_grades.values())):
        verdict = TERMINATES_LOCAL
    else:
        verdict = NO_GUARANTEE
        bad = [g.name for g in grades if g.grade not in (LOCAL, STRONGLY_LOCAL)]
        if not acyclic:
            detail = "characteristic graph has a cycle"
        elif bad:
            detail = f"transitions without a locality certificate: {', '.join(bad)}"
        else:
            detail = "some property formula is not local"
    return Classification(acyclic, tree_like, sas, grades, prop_grades,
                          verdict, detail)
