"""Multi-sorted first-order syntax shared by the whole pipeline.

Sorts, terms, literals and quantifier-free formulae, plus substitution with
beta-reduction of case-defined updates, DNF conversion, and the pairwise
disequality normal form for bound index variables.

Convention baked into the literal constructors: distinct declared constants
of the same sort denote distinct values, and every non-undef constant is
distinct from undef. Literals between constants therefore evaluate eagerly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union


# ---------------------------------------------------------------------------
# symbols

ID = "id"
VALUE = "value"
ARTIFACT = "artifact"


@dataclass(frozen=True)
class Sort:
    name: str
    kind: str  # id | value | artifact

    def __post_init__(self) -> None:
        if self.kind not in (ID, VALUE, ARTIFACT):
            raise ValueError(f"bad sort kind {self.kind!r}")

    @property
    def is_basic(self) -> bool:
        return self.kind != ARTIFACT

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Func:
    """A unary database function symbol f : source -> target."""
    name: str
    source: Sort
    target: Sort

    def __post_init__(self) -> None:
        if self.target.kind == ARTIFACT:
            raise ValueError(f"function {self.name} targets an artifact sort")
        if self.source.kind == ARTIFACT:
            raise ValueError(f"function {self.name} reads an artifact sort")

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str
    sort: Sort
    is_undef: bool = False

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Component:
    """An artifact component a : source -> target (an updatable array)."""
    name: str
    source: Sort  # artifact sort
    target: Sort  # basic sort

    def __post_init__(self) -> None:
        if self.source.kind != ARTIFACT:
            raise ValueError(f"component {self.name} must be indexed by an artifact sort")
        if self.target.kind == ARTIFACT:
            raise ValueError(f"component {self.name} must store basic values")

    def __repr__(self) -> str:
        return self.name


def undef_const(sort: Sort) -> Const:
    return Const(f"undef@{sort.name}", sort, is_undef=True)


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Cst:
    sym: Const

    @property
    def sort(self) -> Sort:
        return self.sym.sort

    def __repr__(self) -> str:
        return self.sym.name


@dataclass(frozen=True)
class App:
    func: Func
    arg: "Term"

    def __post_init__(self) -> None:
        if self.arg.sort != self.func.source:
            raise ValueError(f"{self.func.name} applied to {self.arg.sort}-term")

    @property
    def sort(self) -> Sort:
        return self.func.target

    def __repr__(self) -> str:
        return f"{self.func.name}({self.arg!r})"


@dataclass(frozen=True)
class Read:
    comp: Component
    index: "Term"

    def __post_init__(self) -> None:
        if self.index.sort != self.comp.source:
            raise ValueError(f"{self.comp.name} indexed by {self.index.sort}-term")

    @property
    def sort(self) -> Sort:
        return self.comp.target

    def __repr__(self) -> str:
        return f"{self.comp.name}[{self.index!r}]"


Term = Union[Var, Cst, App, Read]


def term_vars(t: Term) -> frozenset[Var]:
    if isinstance(t, Var):
        return frozenset((t,))
    if isinstance(t, Cst):
        return frozenset()
    if isinstance(t, App):
        return term_vars(t.arg)
    return term_vars(t.index)


def term_key(t: Term) -> tuple:
    """Total syntactic order on terms (for canonical literal orientation)."""
    if isinstance(t, Cst):
        return (0, t.sym.sort.name, t.sym.name)
    if isinstance(t, Var):
        return (1, t.sort.name, t.name)
    if isinstance(t, Read):
        return (2, t.comp.name, term_key(t.index))
    return (3, t.func.name, term_key(t.arg))


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        yield from subterms(t.arg)
    elif isinstance(t, Read):
        yield from subterms(t.index)


def subst_term(t: Term, binding: dict[Var, Term]) -> Term:
    if isinstance(t, Var):
        r = binding.get(t, t)
        if r.sort != t.sort:
            raise ValueError(f"sort mismatch substituting {t!r} by {r!r}")
        return r
    if isinstance(t, Cst):
        return t
    if isinstance(t, App):
        return App(t.func, subst_term(t.arg, binding))
    return Read(t.comp, subst_term(t.index, binding))


# ---------------------------------------------------------------------------
# formulae


class _TrueF:
    def __repr__(self) -> str:
        return "true"


class _FalseF:
    def __repr__(self) -> str:
        return "false"


TRUE = _TrueF()
FALSE = _FalseF()


@dataclass(frozen=True)
class Lit:
    """Oriented (in)equality between same-sorted terms."""
    lhs: Term
    rhs: Term
    pos: bool

    @property
    def negated(self) -> "Lit":
        return Lit(self.lhs, self.rhs, not self.pos)

    def __repr__(self) -> str:
        op = "=" if self.pos else "!="
        return f"{self.lhs!r} {op} {self.rhs!r}"


@dataclass(frozen=True)
class Member:
    """Finitary membership t in {c1,...,ck} (kept atomic through DNF)."""
    term: Term
    elems: frozenset[Const]
    pos: bool

    @property
    def negated(self) -> "Member":
        return Member(self.term, self.elems, not self.pos)

    def __repr__(self) -> str:
        op = "in" if self.pos else "not in"
        names = ",".join(sorted(c.name for c in self.elems))
        return f"{self.term!r} {op} {{{names}}}"


Atom = Union[Lit, Member]


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


Formula = Union[_TrueF, _FalseF, Lit, Member, Not, And, Or]


def eq(lhs: Term, rhs: Term, pos: bool = True) -> Formula:
    """Literal constructor with canonical orientation and eager constant
    evaluation (distinct declared constants denote distinct values)."""
    if lhs.sort != rhs.sort:
        raise ValueError(f"literal between sorts {lhs.sort} and {rhs.sort}")
    if term_key(rhs) < term_key(lhs):
        lhs, rhs = rhs, lhs
    if lhs == rhs:
        return TRUE if pos else FALSE
    if isinstance(lhs, Cst) and isinstance(rhs, Cst):
        # different constant symbols: distinct by convention
        return FALSE if pos else TRUE
    return Lit(lhs, rhs, pos)


def neq(lhs: Term, rhs: Term) -> Formula:
    return eq(lhs, rhs, pos=False)


def member(term: Term, elems: Iterable[Const], pos: bool = True) -> Formula:
    elems = frozenset(elems)
    for c in elems:
        if c.sort != term.sort:
            raise ValueError(f"membership mixes sorts {term.sort} and {c.sort}")
    if not elems:
        return FALSE if pos else TRUE
    if isinstance(term, Cst):
        inside = term.sym in elems
        return (TRUE if inside else FALSE) if pos else (FALSE if inside else TRUE)
    if len(elems) == 1:
        (c,) = elems
        return eq(term, Cst(c), pos=pos)
    return Member(term, elems, pos)


def conj(*parts: Formula) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if p is TRUE:
            continue
        if p is FALSE:
            return FALSE
        if isinstance(p, And):
            flat.extend(p.args)
        else:
            flat.append(p)
    seen = []
    for p in flat:
        if p not in seen:
            seen.append(p)
    if not seen:
        return TRUE
    if len(seen) == 1:
        return seen[0]
    return And(tuple(seen))


def disj(*parts: Formula) -> Formula:
    flat: list[Formula] = []
    for p in parts:
        if p is FALSE:
            continue
        if p is TRUE:
            return TRUE
        if isinstance(p, Or):
            flat.extend(p.args)
        else:
            flat.append(p)
    seen = []
    for p in flat:
        if p not in seen:
            seen.append(p)
    if not seen:
        return FALSE
    if len(seen) == 1:
        return seen[0]
    return Or(tuple(seen))


def negate(f: Formula) -> Formula:
    if f is TRUE:
        return FALSE
    if f is FALSE:
        return TRUE
    if isinstance(f, (Lit, Member)):
        return f.negated
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, And):
        return disj(*(negate(a) for a in f.args))
    if isinstance(f, Or):
        return conj(*(negate(a) for a in f.args))
    raise TypeError(f"cannot negate {f!r}")


def substitute(f: Formula, binding: dict[Var, Term]) -> Formula:
    """Capture-free simultaneous substitution on a quantifier-free formula.

    Rebuilds atoms through the smart constructors so literals between
    constants collapse eagerly.
    """
    if not binding:
        return f
    if f is TRUE or f is FALSE:
        return f
    if isinstance(f, Lit):
        return eq(subst_term(f.lhs, binding), subst_term(f.rhs, binding), f.pos)
    if isinstance(f, Member):
        return member(subst_term(f.term, binding), f.elems, f.pos)
    if isinstance(f, Not):
        return negate(substitute(f.arg, binding))
    if isinstance(f, And):
        return conj(*(substitute(a, binding) for a in f.args))
    if isinstance(f, Or):
        return disj(*(substitute(a, binding) for a in f.args))
    raise TypeError(f"cannot substitute in {f!r}")


def formula_atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, (Lit, Member)):
        yield f
    elif isinstance(f, Not):
        yield from formula_atoms(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from formula_atoms(a)


def formula_vars(f: Formula) -> frozenset[Var]:
    out: set[Var] = set()
    for a in formula_atoms(f):
        if isinstance(a, Lit):
            out |= term_vars(a.lhs) | term_vars(a.rhs)
        else:
            out |= term_vars(a.term)
    return frozenset(out)


def formula_terms(f: Formula) -> Iterator[Term]:
    for a in formula_atoms(f):
        if isinstance(a, Lit):
            yield a.lhs
            yield a.rhs
        else:
            yield a.term


def atom_sign(a: Atom) -> tuple[Atom, bool]:
    """Split an atom into (positive version, polarity)."""
    if isinstance(a, Lit):
        return (Lit(a.lhs, a.rhs, True), a.pos)
    return (Member(a.term, a.elems, True), a.pos)


# ---------------------------------------------------------------------------
# DNF


def to_dnf(f: Formula) -> list[frozenset[Atom]]:
    """Disjunctive normal form as a list of literal sets.

    Disjuncts containing a complementary atom pair are dropped during the
    distribution; duplicate disjuncts are removed.
    """
    def add(cube: frozenset[Atom], atom: Atom) -> Optional[frozenset[Atom]]:
        if atom.negated in cube:
            return None
        return cube | {atom}

    def go(g: Formula, cube: frozenset[Atom]) -> list[frozenset[Atom]]:
        if g is TRUE:
            return [cube]
        if g is FALSE:
            return []
        if isinstance(g, (Lit, Member)):
            c = add(cube, g)
            return [c] if c is not None else []
        if isinstance(g, Not):
            return go(negate(g.arg), cube)
        if isinstance(g, And):
            cubes = [cube]
            for part in g.args:
                nxt: list[frozenset[Atom]] = []
                for c in cubes:
                    nxt.extend(go(part, c))
                cubes = nxt
                if not cubes:
                    return []
            return cubes
        if isinstance(g, Or):
            out: list[frozenset[Atom]] = []
            for part in g.args:
                out.extend(go(part, cube))
            return out
        raise TypeError(f"cannot normalize {g!r}")

    raw = go(f, frozenset())
    seen: set[frozenset[Atom]] = set()
    out: list[frozenset[Atom]] = []
    for c in raw:
        if c not in seen:
            seen.add(c)
            out.append(c)
    # drop disjuncts syntactically subsumed by a smaller one
    out.sort(key=len)
    kept: list[frozenset[Atom]] = []
    for c in out:
        if not any(k <= c for k in kept):
            kept.append(c)
    return kept


def cube_formula(cube: Iterable[Atom]) -> Formula:
    return conj(*sorted(cube, key=repr))


# ---------------------------------------------------------------------------
# case-defined functions (ordered if/elif/else)


@dataclass(frozen=True)
class CaseFn:
    """Ordered guarded cases; the last guard must be TRUE (the default).

    First match wins, so stored guards may overlap; ``branches`` exposes the
    disjoint effective guards.
    """
    cases: tuple  # tuple[(Formula, Term), ...]

    def __post_init__(self) -> None:
        if not self.cases or self.cases[-1][0] is not TRUE:
            raise ValueError("case function needs a default branch")

    @property
    def sort(self) -> Sort:
        return self.cases[0][1].sort

    def branches(self) -> list[tuple[Formula, Term]]:
        out: list[tuple[Formula, Term]] = []
        blocked: list[Formula] = []
        for guard, value in self.cases:
            eff = conj(*blocked, guard)
            if eff is not FALSE:
                out.append((eff, value))
            blocked.append(negate(guard))
        return out

    def substituted(self, binding: dict[Var, Term]) -> "CaseFn":
        return CaseFn(tuple(
            (substitute(g, binding), subst_term(v, binding)) for g, v in self.cases
        ))


def const_fn(value: Term) -> CaseFn:
    return CaseFn(((TRUE, value),))


def expand_cases(atom_builder, case_fns: Sequence[CaseFn]) -> Formula:
    """Replace case-defined arguments inside one atom by a guarded disjunction.

    ``atom_builder`` maps one concrete value per case function to a formula;
    the result is OR over the case product of (effective guards AND atom).
    """
    out: list[Formula] = []
    for combo in itertools.product(*(fn.branches() for fn in case_fns)):
        guards = [g for g, _ in combo]
        values = [v for _, v in combo]
        out.append(conj(*guards, atom_builder(*values)))
    return disj(*out)


# ---------------------------------------------------------------------------
# quantified formula classes


@dataclass(frozen=True)
class Cube:
    """One disjunct of a state formula: exists bound (pairwise-distinct
    same-sort index variables) such that all atoms hold.

    The pairwise disequalities are part of ``lits``.
    """
    bound: tuple  # tuple[Var, ...], artifact sorts
    lits: frozenset  # frozenset[Atom]

    def __repr__(self) -> str:
        body = " & ".join(sorted(repr(a) for a in self.lits)) or "true"
        if not self.bound:
            return body
        b = ",".join(f"{v.name}:{v.sort.name}" for v in self.bound)
        return f"exists {b}. {body}"


@dataclass(frozen=True)
class ExtFormula:
    """Existential closure over variables of any sort of a QF matrix;
    the shape produced by preimage computation before QE."""
    bound: tuple  # tuple[Var, ...]
    matrix: Formula


@dataclass(frozen=True)
class ExistsForall:
    """exists block, then a conjunction of independently quantified
    universal parts: exists e. (matrix AND AND_j forall i_j. part_j)."""
    exists: tuple  # tuple[Var, ...]
    matrix: Formula
    univ_parts: tuple = ()  # tuple[(tuple[Var, ...], Formula), ...]


@dataclass(frozen=True)
class Transition:
    """Guarded assignment in the standard transition format: fresh
    existential parameters, a guard over the current state, and one
    case-defined update per artifact variable and component."""
    name: str
    fresh: tuple  # tuple[Var, ...]
    guard: Formula
    var_updates: tuple  # tuple[(Var, CaseFn), ...], covers every artifact var
    comp_updates: tuple  # tuple[(Component, Var(param), CaseFn), ...]


# ---------------------------------------------------------------------------
# pairwise-distinct normalization of bound index variables


def _partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def diff_normalize(bound: Sequence[Var], lits: Iterable[Atom]) -> list[Cube]:
    """Split an existential disjunct into branches where same-sort bound
    variables are pairwise distinct, by guessing which of them coincide."""
    bound = list(bound)
    by_sort: dict[Sort, list[Var]] = {}
    for v in bound:
        by_sort.setdefault(v.sort, []).append(v)

    sort_partitions = [list(_partitions(vs)) for vs in by_sort.values()]
    out: list[Cube] = []
    for combo in itertools.product(*sort_partitions):
        binding: dict[Var, Term] = {}
        reps: list[Var] = []
        for part in combo:
            for block in part:
                rep = min(block, key=lambda v: bound.index(v))
                reps.append(rep)
                for v in block:
                    if v is not rep:
                        binding[v] = rep
        new_lits: set[Atom] = set()
        dead = False
        for a in lits:
            if isinstance(a, Lit):
                g = eq(subst_term(a.lhs, binding), subst_term(a.rhs, binding), a.pos)
            else:
                g = member(subst_term(a.term, binding), a.elems, a.pos)
            if g is FALSE:
                dead = True
                break
            if g is TRUE:
                continue
            new_lits.add(g)
        if dead:
            continue
        # pairwise disequalities between surviving same-sort representatives
        for r1, r2 in itertools.combinations(reps, 2):
            if r1.sort == r2.sort:
                d = neq(r1, r2)
                if d is FALSE:
                    dead = True
                    break
                new_lits.add(d)
        if dead:
            continue
        if any(a.negated in new_lits for a in new_lits):
            continue
        ordered = tuple(v for v in bound if v in set(reps))
        out.append(Cube(ordered, frozenset(new_lits)))
    # dedupe
    seen: set[tuple] = set()
    uniq: list[Cube] = []
    for c in out:
        key = (c.bound, c.lits)
        if key not in seen:
            seen.add(key)
            uniq.append(c)
    return uniq


def canon_cube(c: Cube) -> tuple:
    """Canonical key under renaming of bound variables (used for frontier
    deduplication and memoization)."""
    best = None
    if len(c.bound) > 6:
        perms: Iterable = [c.bound]
    else:
        perms = itertools.permutations(c.bound)
    for perm in perms:
        if any(a.sort != b.sort for a, b in zip(perm, c.bound)):
            continue
        binding = {v: Var(f"#{i}", v.sort) for i, v in enumerate(perm)}
        lits = []
        for a in c.lits:
            if isinstance(a, Lit):
                lits.append(repr(eq(subst_term(a.lhs, binding), subst_term(a.rhs, binding), a.pos)))
            else:
                lits.append(repr(member(subst_term(a.term, binding), a.elems, a.pos)))
        key = (tuple(v.sort.name for v in perm), tuple(sorted(lits)))
        if best is None or key < best:
            best = key
    assert best is not None
    return best


def rename_cube(c: Cube, prefix: str) -> Cube:
    binding = {v: Var(f"{prefix}{i}", v.sort) for i, v in enumerate(c.bound)}
    lits = set()
    for a in c.lits:
        if isinstance(a, Lit):
            lits.add(eq(subst_term(a.lhs, binding), subst_term(a.rhs, binding), a.pos))
        else:
            lits.add(member(subst_term(a.term, binding), a.elems, a.pos))
    return Cube(tuple(binding[v] for v in c.bound), frozenset(lits))
