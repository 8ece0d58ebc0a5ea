"""Backward reachability for parameterized safety.

Starting from the unsafe states, repeatedly take symbolic preimages under
every transition, reduce them to state-formula cubes, and stop when either
a cube intersects the initial assignment (UNSAFE, with a replayable trace)
or every new cube is subsumed by what was already seen (SAFE, with the
accumulated fixpoint as the inductive certificate). Budgets on depth,
node count and wall-clock time yield BUDGET-EXHAUSTED.
"""
from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .concrete import (
    FiniteInstance,
    WmState,
    bounded_reach,
    enumerate_instances,
    Evaluator,
    initial_state,
    successors,
)
from .decide import Decider, SatSketch, instance_from_model
from .schema import ArtifactSetting
from .syntax import (
    Component,
    Const,
    Cst,
    Cube,
    ExistsForall,
    Formula,
    Read,
    Sort,
    TRUE,
    Transition,
    Var,
    canon_cube,
    conj,
    cube_formula,
    diff_normalize,
    eq,
    negate,
    rename_cube,
)
from .updates import CompiledTransition, preimage, reduce_preimage

SAFE = "SAFE"
UNSAFE = "UNSAFE"
BUDGET = "BUDGET-EXHAUSTED"


@dataclass
class RasSystem:
    """A complete model: artifact setting, constant-only initial
    assignment, transitions, and named unsafe-state properties."""
    name: str
    setting: ArtifactSetting
    init: dict  # (Var | Component) -> Const
    transitions: list  # list[CompiledTransition]
    properties: dict  # name -> list[Cube]

    def init_const(self, sym) -> Const:
        if sym in self.init:
            return self.init[sym]
        if isinstance(sym, Var):
            return self.setting.theory.sig.undef(sym.sort)
        return self.setting.theory.sig.undef(sym.target)


@dataclass
class Node:
    cube: Cube
    depth: int
    parent: Optional["Node"]
    via: Optional[str]  # transition that produced this cube as a preimage


@dataclass
class Verdict:
    verdict: str
    prop: str
    nodes: int
    depth: int
    decision_calls: int
    elapsed: float
    trace: Optional[list] = None  # [(transition name, Cube), ...] forward order
    fixpoint: Optional[list] = None  # list[Cube]
    sketch: Optional[SatSketch] = None
    chain: Optional[list] = None  # backward node chain, hit first

    def to_json(self) -> dict:
        out = {
            "system": None,
            "property": self.prop,
            "verdict": self.verdict,
            "stats": {
                "nodes": self.nodes,
                "depth": self.depth,
                "decision_calls": self.decision_calls,
                "elapsed_seconds": round(self.elapsed, 3),
            },
        }
        if self.trace is not None:
            out["trace"] = [name for name, _cube in self.trace]
        if self.fixpoint is not None:
            out["fixpoint_size"] = len(self.fixpoint)
        return out


def initial_formula(system: RasSystem, cube: Cube) -> ExistsForall:
    """The intersection test with the initial assignment: conjoin the
    variable equalities and, per artifact sort, a universal part stating
    every row carries the initial component values."""
    st = system.setting
    var_eqs = [eq(v, Cst(system.init_const(v))) for v in st.variables.values()]
    parts = []
    for s in st.artifact_sorts:
        y = Var(f"@init_{s.name}", s)
        body = conj(*(eq(Read(c, y), Cst(system.init_const(c)))
                      for c in st.components_of(s)))
        if body is not TRUE:
            parts.append(((y,), body))
    matrix = conj(cube_formula(cube.lits), *var_eqs)
    return ExistsForall(cube.bound, matrix, tuple(parts))


def not_covered(decider: Decider, cube: Cube, blocked: Sequence[Cube]) -> bool:
    """True when the cube has a model outside every blocked cube."""
    parts = []
    for k, b in enumerate(blocked):
        b = rename_cube(b, f"@u{k}_")
        parts.append((b.bound, negate(cube_formula(b.lits))))
    ef = ExistsForall(cube.bound, cube_formula(cube.lits), tuple(parts))
    ok, _ = decider.sat_exists_forall(ef)
    return ok


def breach(
    system: RasSystem,
    prop: str,
    max_depth: Optional[int] = None,
    max_nodes: Optional[int] = None,
    timeout: Optional[float] = None,
    observer=None,
) -> Verdict:
    """Backward reachability from the named property's cubes.

    ``observer(node, event)`` is called per dequeued node with event one of
    "covered", "expanded", "hit"."""
    decider = Decider(system.setting.theory)
    start = time.monotonic()
    blocked: list[Cube] = []
    processed = 0
    deepest = 0
    truncated = False  # some node's preimages were cut by max_depth

    roots = []
    for c in system.properties[prop]:
        roots.extend(diff_normalize(c.bound, c.lits))
    queue: list[Node] = [Node(c, 0, None, None) for c in roots]
    qi = 0
    seen: set = {canon_cube(n.cube) for n in queue}

    def out_of_budget() -> Optional[str]:
        if timeout is not None and time.monotonic() - start > timeout:
            return "timeout"
        if max_nodes is not None and processed >= max_nodes:
            return "nodes"
        return None

    while qi < len(queue):
        node = queue[qi]
        qi += 1
        if out_of_budget():
            return Verdict(BUDGET, prop, processed, deepest,
                           decider.calls, time.monotonic() - start)
        if not not_covered(decider, node.cube, blocked):
            if observer is not None:
                observer(node, "covered")
            continue
        processed += 1
        deepest = max(deepest, node.depth)

        ok, sketch = decider.sat_exists_forall(initial_formula(system, node.cube),
                                               want_model=True)
        if observer is not None:
            observer(node, "hit" if ok else "expanded")
        if ok:
            chain = []
            n: Optional[Node] = node
            while n is not None:
                chain.append(n)
                n = n.parent
            trace = [(n.via, n.cube) for n in chain if n.via is not None]
            return Verdict(UNSAFE, prop, processed, deepest, decider.calls,
                           time.monotonic() - start, trace=trace,
                           sketch=sketch, chain=chain)

        blocked.append(node.cube)
        if max_depth is not None and node.depth >= max_depth:
            truncated = True
            continue
        for ct in system.transitions:
            ext = preimage(ct.tau, node.cube, prefix=f"j{node.depth + 1}_")
            for child in reduce_preimage(decider, system.setting, ext):
                key = canon_cube(child)
                if key in seen:
                    continue
                seen.add(key)
                queue.append(Node(child, node.depth + 1, node, ct.tau.name))

    if truncated:
        # the frontier was cut, so the blocked set is no fixpoint
        return Verdict(BUDGET, prop, processed, deepest, decider.calls,
                       time.monotonic() - start)
    return Verdict(SAFE, prop, processed, deepest, decider.calls,
                   time.monotonic() - start, fixpoint=list(blocked))


# ---------------------------------------------------------------------------
# trace replay on a concrete instance


def candidate_instances(system: RasSystem, verdict: Verdict) -> list[FiniteInstance]:
    theory = system.setting.theory
    out = []
    if verdict.sketch is not None and verdict.sketch.model is not None:
        try:
            out.append(instance_from_model(theory, verdict.sketch.model))
        except AssertionError:
            pass
    # generic fallback: one anonymous element per id sort
    sig = theory.sig
    carriers = {}
    for s in sig.basic_sorts:
        elems = {"undef"} | {c.name for c in sig.consts.values() if c.sort == s}
        elems.add(f"{s.name.lower()}0")
        carriers[s] = tuple(sorted(elems))
    func_maps = {}
    for f in sig.funcs.values():
        m = {}
        for x in carriers[f.source]:
            if x == "undef":
                m[x] = "undef"
            elif theory.pack == "full-null":
                m[x] = sorted(e for e in carriers[f.target] if e != "undef")[0]
            else:
                m[x] = "undef"
        func_maps[f] = m
    generic = FiniteInstance(theory, carriers, func_maps)
    if generic.check_axioms():
        out.append(generic)
    return out


def replay(
    system: RasSystem,
    verdict: Verdict,
    instance: FiniteInstance,
    sizes: dict,
) -> Optional[list]:
    """Forward-execute the counterexample trace on one concrete instance at
    fixed artifact carrier sizes. Returns the concrete state sequence if
    every step lands in the corresponding backward cube and the final state
    satisfies the property cube, else None."""
    if verdict.chain is None:
        return None
    chain = verdict.chain  # hit node first, property root last
    st = system.setting
    init = {v: system.init_const(v) for v in st.variables.values()}
    init.update({c: system.init_const(c) for c in st.components.values()})
    taus = {ct.tau.name: ct.tau for ct in system.transitions}

    s0 = initial_state(st, init, sizes).canonical()
    ev0 = Evaluator(instance, st, s0)
    if not ev0.cube(chain[0].cube):
        return None
    frontier: list[tuple[WmState, list]] = [(s0, [s0])]
    for k, node in enumerate(chain):
        if node.via is None:
            break
        tau = taus[node.via]
        target_cube = chain[k + 1].cube
        nxt = []
        seen = set()
        for wm, path in frontier:
            for succ in successors(instance, st, wm, tau):
                succ = succ.canonical()
                if succ in seen:
                    continue
                seen.add(succ)
                if Evaluator(instance, st, succ).cube(target_cube):
                    nxt.append((succ, path + [succ]))
        if not nxt:
            return None
        frontier = nxt
    return frontier[0][1]


def replay_any(system: RasSystem, verdict: Verdict, max_rows: int = 4,
               max_enumerated: int = 20000):
    """Try sketch-derived and generic instances over a range of artifact
    carrier sizes, then fall back to enumerating small instances; return
    (instance, sizes, states) for the first successful replay."""
    if verdict.chain is None:
        return None
    need = {}
    for node in verdict.chain:
        for v in node.cube.bound:
            need[v.sort.name] = max(need.get(v.sort.name, 0),
                                    sum(1 for w in node.cube.bound if w.sort == v.sort))
    sort_names = [s.name for s in system.setting.artifact_sorts]
    low = [max(1, need.get(n, 1)) for n in sort_names]

    def attempt(inst: FiniteInstance):
        for bump in range(0, max_rows):
            sizes = {n: min(low[i] + bump, max_rows)
                     for i, n in enumerate(sort_names)}
            states = replay(system, verdict, inst, sizes)
            if states is not None:
                return (inst, sizes, states)
        return None

    for inst in candidate_instances(system, verdict):
        hit = attempt(inst)
        if hit is not None:
            return hit

    # the hit sketch witnesses only the first cube; the rest of the trace
    # may need database elements it never mentions, so sweep small bounds
    theory = system.setting.theory
    sig = theory.sig
    for idk in (2, 3):
        bounds = {}
        for s in sig.basic_sorts:
            base = 1 + len(sig.constants_of(s, with_undef=False))
            bounds[s.name] = idk if s.kind == "id" else base + 1
        tried = 0
        for inst in enumerate_instances(theory, bounds):
            tried += 1
            if tried > max_enumerated:
                break
            hit = attempt(inst)
            if hit is not None:
                return hit
    return None
