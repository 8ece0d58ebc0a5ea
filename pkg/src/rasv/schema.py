"""Database schemas, axiom packs, and the artifact setting layered on top.

A schema is a multi-sorted signature with unary functions, constants and
equality only. The axiom pack fixes how the distinguished undef values
interact with the functions. Finiteness of the symbolic term universe is
guaranteed by acyclicity of the characteristic graph (sorts as nodes, one
edge per function).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .syntax import (
    ARTIFACT,
    App,
    Component,
    Const,
    Cst,
    Formula,
    Func,
    Sort,
    Term,
    Var,
    conj,
    disj,
    eq,
    neq,
    undef_const,
)

FULL_NULL = "full-null"
GROUND_NULL = "ground-null"
GROUND_NULL_FK = "ground-null+fk"

AXIOM_PACKS = (FULL_NULL, GROUND_NULL, GROUND_NULL_FK)


@dataclass(frozen=True)
class ForeignKey:
    """Chain requirement: if source_fn(x) is defined then target_fn of it is too."""
    source_fn: Func
    target_fn: Func

    def __post_init__(self) -> None:
        if self.source_fn.target != self.target_fn.source:
            raise ValueError(
                f"foreign key {self.source_fn.name}->{self.target_fn.name} does not chain"
            )


@dataclass
class Signature:
    """Sorts, unary functions, and named constants of the read-only database."""
    sorts: dict = field(default_factory=dict)  # name -> Sort
    funcs: dict = field(default_factory=dict)  # name -> Func
    consts: dict = field(default_factory=dict)  # name -> Const (non-undef)
    _undefs: dict = field(default_factory=dict)  # Sort -> Const

    def add_sort(self, name: str, kind: str) -> Sort:
        if name in self.sorts:
            raise ValueError(f"duplicate sort {name}")
        s = Sort(name, kind)
        self.sorts[name] = s
        if s.is_basic:
            self._undefs[s] = undef_const(s)
        return s

    def add_func(self, name: str, source: Sort, target: Sort) -> Func:
        if name in self.funcs:
            raise ValueError(f"duplicate function {name}")
        f = Func(name, source, target)
        self.funcs[name] = f
        return f

    def add_const(self, name: str, sort: Sort) -> Const:
        if name in self.consts:
            raise ValueError(f"duplicate constant {name}")
        if not sort.is_basic:
            raise ValueError(f"constant {name} of artifact sort")
        c = Const(name, sort)
        self.consts[name] = c
        return c

    def undef(self, sort: Sort) -> Const:
        return self._undefs[sort]

    @property
    def basic_sorts(self) -> list[Sort]:
        return [s for s in self.sorts.values() if s.is_basic]

    def constants_of(self, sort: Sort, with_undef: bool = True) -> list[Const]:
        out = [c for c in self.consts.values() if c.sort == sort]
        if with_undef:
            out.append(self.undef(sort))
        return out

    def funcs_from(self, sort: Sort) -> list[Func]:
        return [f for f in self.funcs.values() if f.source == sort]

    # -- characteristic graph -------------------------------------------------

    def char_edges(self) -> list[tuple[Sort, Sort, str]]:
        return [(f.source, f.target, f.name) for f in self.funcs.values()]

    def check_acyclic(self) -> Optional[list[str]]:
        """None if the characteristic graph is acyclic, else a function-name
        cycle witness."""
        edges = self.char_edges()
        adj: dict[Sort, list[tuple[Sort, str]]] = {}
        for a, b, name in edges:
            adj.setdefault(a, []).append((b, name))
        WHITE, GREY, BLACK = 0, 1, 2
        color: dict[Sort, int] = {}
        stack: list[str] = []

        def visit(s: Sort) -> Optional[list[str]]:
            color[s] = GREY
            for t, name in adj.get(s, []):
                if color.get(t, WHITE) == GREY:
                    return stack + [name]
                if color.get(t, WHITE) == WHITE:
                    stack.append(name)
                    found = visit(t)
                    stack.pop()
                    if found:
                        return found
            color[s] = BLACK
            return None

        for s in list(self.sorts.values()):
            if color.get(s, WHITE) == WHITE:
                found = visit(s)
                if found:
                    return found
        return None

    def enum_terms(self, seeds: Iterable[Term]) -> list[Term]:
        """Close a seed set under function application (finite when the
        characteristic graph is acyclic). Undef constants of every reachable
        basic sort are included."""
        if self.check_acyclic() is not None:
            raise ValueError("term universe is infinite: characteristic graph has a cycle")
        todo = list(seeds)
        seen: list[Term] = []
        while todo:
            t = todo.pop()
            if t in seen:
                continue
            seen.append(t)
            u = Cst(self.undef(t.sort)) if t.sort.is_basic else None
            if u is not None and u not in seen:
                todo.append(u)
            for f in self.funcs_from(t.sort):
                todo.append(App(f, t))
        seen.sort(key=repr)
        return seen


@dataclass
class Theory:
    """A signature together with its axiom pack."""
    sig: Signature
    pack: str = FULL_NULL
    fks: tuple = ()  # tuple[ForeignKey, ...]

    def __post_init__(self) -> None:
        if self.pack not in AXIOM_PACKS:
            raise ValueError(f"unknown axiom pack {self.pack!r}")
        if self.fks and self.pack != GROUND_NULL_FK:
            raise ValueError("foreign keys require the ground-null+fk pack")

    def axioms(self) -> list[tuple[Optional[Var], Formula]]:
        """Universal axioms as (bound variable or None, body) pairs.

        The body of a (v, body) pair holds for every element of v's sort;
        ground axioms have v = None.
        """
        out: list[tuple[Optional[Var], Formula]] = []
        sig = self.sig
        if self.pack == FULL_NULL:
            # x = undef <-> f(x) = undef, both directions as clauses
            for f in sig.funcs.values():
                x = Var("@x", f.source)
                u_src = Cst(sig.undef(f.source))
                u_tgt = Cst(sig.undef(f.target))
                out.append((x, disj(neq(x, u_src), eq(App(f, x), u_tgt))))
                out.append((x, disj(eq(x, u_src), neq(App(f, x), u_tgt))))
        else:
            for f in sig.funcs.values():
                u_src = Cst(sig.undef(f.source))
                u_tgt = Cst(sig.undef(f.target))
                out.append((None, eq(App(f, Cst(sig.undef(f.source))), u_tgt)))
            for fk in self.fks:
                f, g = fk.source_fn, fk.target_fn
                x = Var("@x", f.source)
                u_mid = Cst(self.sig.undef(f.target))
                u_end = Cst(self.sig.undef(g.target))
                out.append((x, disj(eq(App(f, x), u_mid), neq(App(g, App(f, x)), u_end))))
        return out


@dataclass
class ArtifactSetting:
    """Artifact extension of a database theory: artifact sorts, basic-sorted
    artifact variables, and components (function symbols from artifact sorts
    to basic sorts, the updatable arrays)."""
    theory: Theory
    artifact_sorts: list = field(default_factory=list)  # list[Sort]
    variables: dict = field(default_factory=dict)  # name -> Var (basic sort)
    components: dict = field(default_factory=dict)  # name -> Component

    def add_artifact_sort(self, name: str) -> Sort:
        s = self.theory.sig.add_sort(name, ARTIFACT)
        self.artifact_sorts.append(s)
        return s

    def add_variable(self, name: str, sort: Sort) -> Var:
        if not sort.is_basic:
            raise ValueError(f"artifact variable {name} must have a basic sort")
        if name in self.variables:
            raise ValueError(f"duplicate artifact variable {name}")
        v = Var(name, sort)
        self.variables[name] = v
        return v

    def add_component(self, name: str, source: Sort, target: Sort) -> Component:
        if name in self.components:
            raise ValueError(f"duplicate component {name}")
        c = Component(name, source, target)
        self.components[name] = c
        return c

    def components_of(self, sort: Sort) -> list[Component]:
        return [c for c in self.components.values() if c.source == sort]

    def extended_char_edges(self) -> list[tuple[Sort, Sort, str]]:
        """Characteristic graph of the signature extended with components."""
        edges = self.theory.sig.char_edges()
        for c in self.components.values():
            edges.append((c.source, c.target, c.name))
        return edges

    def check_tree_like(self) -> tuple[bool, Optional[str]]:
        """Tree-like: extended graph acyclic and every node has outdegree
        at most 1. Returns (ok, reason-if-not)."""
        edges = self.extended_char_edges()
        outdeg: dict[Sort, list[str]] = {}
        for a, _b, name in edges:
            outdeg.setdefault(a, []).append(name)
        for s, names in outdeg.items():
            if len(names) > 1:
                return (False, f"sort {s.name} has outgoing edges {sorted(names)}")
        # outdegree <= 1 graph has a cycle iff following edges revisits a node
        succ = {a: b for a, b, _n in edges}
        for start in succ:
            seen = set()
            node = start
            while node in succ:
                if node in seen:
                    return (False, f"cycle through sort {node.name}")
                seen.add(node)
                node = succ[node]
        return (True, None)
