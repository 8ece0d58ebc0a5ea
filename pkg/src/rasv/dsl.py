"""Text format for systems: schema, artifact setting, initial assignment,
transitions (macro or raw guarded-assignment form), and named properties.

Grammar sketch::

    system NAME
    schema {
      id sort S | value sort S [enum LO .. HI]
      fun f : S -> T
      const a, b : S
      axioms full-null | ground-null | ground-null+fk
      fk f -> g
    }
    artifacts {
      sort A
      component c : A -> S
      var x : S
    }
    init { x = const  c = const }
    transition NAME propagate { fresh v : S, ...  where FORMULA
                                set x := TERM  write c[i] := TERM when FORMULA }
    transition NAME insert into A at i { where F  empty c, ...  row c := TERM
                                         suppress when c = TERM, ...  set x := TERM }
    transition NAME delete from A at i { where F  require c, ...  set x := TERM }
    transition NAME bulk on A at j { where F  when F
                                     update c := VALUE else VALUE|keep  set x := TERM }
    transition NAME raw { fresh v : S, ...  guard F
                          set x := TERM
                          set c := lambda j . if F then TERM else ... else TERM
                          set c[i] := TERM }
    property NAME exists v : A, ... { FORMULA }

``undef`` denotes the undef constant of the sort inferred from context.
Numbers name the constants of an enum value sort. ``t in {a, b}`` and
``t in {LO .. HI}`` are finitary membership atoms.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .schema import ArtifactSetting, ForeignKey, Signature, Theory
from .search import RasSystem
from .syntax import (
    App,
    CaseFn,
    Component,
    Const,
    Cst,
    Cube,
    Formula,
    Read,
    Sort,
    TRUE,
    Term,
    Transition,
    Var,
    conj,
    disj,
    eq,
    member,
    negate,
    subst_term,
    substitute,
    to_dnf,
)
from .updates import (
    BulkMacro,
    DeleteMacro,
    InsertMacro,
    KEEP,
    PropagateMacro,
    RawTransition,
)


class ParseError(Exception):
    pass


@dataclass
class Token:
    kind: str  # ident | number | sym
    value: str
    line: int
    col: int


_SYMBOLS = ["->", ":=", "!=", "..", "{", "}", "(", ")", "[", "]",
            ":", ",", "=", "."]


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        m = re.match(r"-?\d+", text[i:])
        if m and not text[i:].startswith("->"):
            toks.append(Token("number", m.group(), line, col))
            i += m.end()
            col += m.end()
            continue
        m = re.match(r"[A-Za-z_][A-Za-z0-9_\-]*", text[i:])
        if m:
            toks.append(Token("ident", m.group(), line, col))
            i += m.end()
            col += m.end()
            continue
        for s in _SYMBOLS:
            if text.startswith(s, i):
                toks.append(Token("sym", s, line, col))
                i += len(s)
                col += len(s)
                break
        else:
            raise ParseError(f"line {line}:{col}: unexpected character {ch!r}")
    toks.append(Token("eof", "", line, col))
    return toks


class _NeedSort(Exception):
    """Raised when a term cannot be typed without outside context."""


class Parser:
    def __init__(self, text: str) -> None:
        self.toks = tokenize(text)
        self.pos = 0
        self.sig = Signature()
        self.theory: Optional[Theory] = None
        self.setting: Optional[ArtifactSetting] = None
        self.init: dict = {}
        self.transitions: list = []
        self.properties: dict = {}
        self.name = ""
        self._pack = "full-null"
        self._fks: list = []

    # -- token helpers ----------------------------------------------------

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def fail(self, msg: str) -> None:
        t = self.peek()
        raise ParseError(f"line {t.line}:{t.col}: {msg} (at {t.value!r})")

    def eat(self, value: str) -> Token:
        t = self.peek()
        if t.value != value:
            self.fail(f"expected {value!r}")
        return self.next()

    def eat_ident(self) -> str:
        t = self.peek()
        if t.kind != "ident":
            self.fail("expected a name")
        return self.next().value

    def at(self, value: str) -> bool:
        return self.peek().value == value

    # -- top level ---------------------------------------------------------

    def parse(self) -> RasSystem:
        self.eat("system")
        self.name = self.eat_ident()
        while not self.at(""):
            kw = self.peek().value
            if kw == "schema":
                self.parse_schema()
            elif kw == "artifacts":
                self.parse_artifacts()
            elif kw == "init":
                self.parse_init()
            elif kw == "transition":
                self.parse_transition()
            elif kw == "property":
                self.parse_property()
            else:
                self.fail("expected a section")
        if self.setting is None:
            raise ParseError("missing artifacts section")
        transitions = [t.compile() for t in self.transitions]
        return RasSystem(self.name, self.setting, self.init,
                         transitions, self.properties)

    def parse_schema(self) -> None:
        self.eat("schema")
        self.eat("{")
        while not self.at("}"):
            kw = self.eat_ident()
            if kw in ("id", "value"):
                self.eat("sort")
                name = self.eat_ident()
                s = self.sig.add_sort(name, kw)
                if self.at("enum"):
                    self.next()
                    lo = int(self.next().value)
                    self.eat("..")
                    hi = int(self.next().value)
                    for k in range(lo, hi + 1):
                        self.sig.add_const(str(k), s)
            elif kw == "fun":
                name = self.eat_ident()
                self.eat(":")
                src = self.sort(self.eat_ident())
                self.eat("->")
                tgt = self.sort(self.eat_ident())
                self.sig.add_func(name, src, tgt)
            elif kw == "const":
                names = [self.eat_ident()]
                while self.at(","):
                    self.next()
                    names.append(self.eat_ident())
                self.eat(":")
                s = self.sort(self.eat_ident())
                for n in names:
                    self.sig.add_const(n, s)
            elif kw == "axioms":
                pack = self.eat_ident()
                # the fk-extended pack is written ground-null-fk in files
                self._pack = {"ground-null-fk": "ground-null+fk"}.get(pack, pack)
            elif kw == "fk":
                f = self.eat_ident()
                self.eat("->")
                g = self.eat_ident()
                self._fks.append((f, g))
            else:
                self.fail("expected a schema declaration")
        self.eat("}")
        fks = tuple(ForeignKey(self.sig.funcs[f], self.sig.funcs[g])
                    for f, g in self._fks)
        self.theory = Theory(self.sig, self._pack, fks)
        cycle = self.sig.check_acyclic()
        if cycle is not None:
            raise ParseError(f"schema functions form a cycle: {' -> '.join(cycle)}")

    def sort(self, name: str) -> Sort:
        if name not in self.sig.sorts:
            raise ParseError(f"unknown sort {name}")
        return self.sig.sorts[name]

    def parse_artifacts(self) -> None:
        if self.theory is None:
            raise ParseError("artifacts section before schema")
        self.eat("artifacts")
        self.setting = ArtifactSetting(self.theory)
        self.eat("{")
        while not self.at("}"):
            kw = self.eat_ident()
            if kw == "sort":
                self.setting.add_artifact_sort(self.eat_ident())
            elif kw == "component":
                name = self.eat_ident()
                self.eat(":")
                src = self.sort(self.eat_ident())
                self.eat("->")
                tgt = self.sort(self.eat_ident())
                self.setting.add_component(name, src, tgt)
            elif kw == "var":
                name = self.eat_ident()
                self.eat(":")
                self.setting.add_variable(name, self.sort(self.eat_ident()))
            else:
                self.fail("expected sort, component or var")
        self.eat("}")

    def parse_init(self) -> None:
        self.eat("init")
        self.eat("{")
        st = self.must_setting()
        while not self.at("}"):
            name = self.eat_ident()
            self.eat("=")
            target = st.variables.get(name) or st.components.get(name)
            if target is None:
                raise ParseError(f"init of unknown symbol {name}")
            sort = target.sort if isinstance(target, Var) else target.target
            cname = self.next().value
            if cname == "undef":
                c = self.sig.undef(sort)
            else:
                c = self.sig.consts.get(cname)
                if c is None or c.sort != sort:
                    raise ParseError(f"init {name}: unknown constant {cname}")
            self.init[target] = c
        self.eat("}")

    def must_setting(self) -> ArtifactSetting:
        if self.setting is None:
            raise ParseError("artifacts section required first")
        return self.setting

    # -- terms and formulas --------------------------------------------------

    def parse_term_ast(self):
        t = self.peek()
        if t.kind == "number":
            self.next()
            return ("num", t.value)
        name = self.eat_ident()
        if name == "undef":
            return ("undef",)
        if self.at("("):
            self.next()
            arg = self.parse_term_ast()
            self.eat(")")
            return ("call", name, arg)
        if self.at("["):
            self.next()
            arg = self.parse_term_ast()
            self.eat("]")
            return ("index", name, arg)
        return ("id", name)

    def resolve(self, ast, expected: Optional[Sort], scope: dict) -> Term:
        st = self.must_setting()
        kind = ast[0]
        if kind == "undef":
            if expected is None:
                raise _NeedSort()
            return Cst(self.sig.undef(expected))
        if kind == "num":
            c = self.sig.consts.get(ast[1])
            if c is None:
                raise ParseError(f"unknown numeric constant {ast[1]}")
            if expected is not None and c.sort != expected:
                raise ParseError(f"constant {ast[1]} has sort {c.sort}, expected {expected}")
            return Cst(c)
        if kind == "id":
            name = ast[1]
            v = scope.get(name) or st.variables.get(name)
            t: Optional[Term] = v
            if t is None and name in self.sig.consts:
                t = Cst(self.sig.consts[name])
            if t is None:
                raise ParseError(f"unknown name {name}")
            if expected is not None and t.sort != expected:
                raise ParseError(f"{name} has sort {t.sort}, expected {expected}")
            return t
        if kind == "call":
            f = self.sig.funcs.get(ast[1])
            if f is None:
                raise ParseError(f"unknown function {ast[1]}")
            if expected is not None and f.target != expected:
                raise ParseError(f"{ast[1]} yields {f.target}, expected {expected}")
            return App(f, self.resolve(ast[2], f.source, scope))
        if kind == "index":
            c = st.components.get(ast[1])
            if c is None:
                raise ParseError(f"unknown component {ast[1]}")
            if expected is not None and c.target != expected:
                raise ParseError(f"{ast[1]} yields {c.target}, expected {expected}")
            return Read(c, self.resolve(ast[2], c.source, scope))
        raise AssertionError(kind)

    def parse_term(self, expected: Optional[Sort], scope: dict) -> Term:
        return self.resolve(self.parse_term_ast(), expected, scope)

    def parse_atom(self, scope: dict) -> Formula:
        if self.at("("):
            self.next()
            f = self.parse_formula(scope)
            self.eat(")")
            return f
        if self.at("not"):
            self.next()
            return negate(self.parse_atom(scope))
        lhs_ast = self.parse_term_ast()
        op = self.next().value
        if op == "in" or (op == "not" and self.eat("in")):
            pos = op == "in"
            lhs = self.resolve(lhs_ast, None, scope)
            elems = self.parse_elem_set(lhs.sort)
            return member(lhs, elems, pos)
        if op not in ("=", "!="):
            raise ParseError(f"expected a comparison, got {op!r}")
        rhs_ast = self.parse_term_ast()
        try:
            lhs = self.resolve(lhs_ast, None, scope)
            rhs = self.resolve(rhs_ast, lhs.sort, scope)
        except _NeedSort:
            rhs = self.resolve(rhs_ast, None, scope)
            lhs = self.resolve(lhs_ast, rhs.sort, scope)
        return eq(lhs, rhs, op == "=")

    def parse_elem_set(self, sort: Sort) -> list[Const]:
        self.eat("{")
        first = self.next().value
        if self.at(".."):
            self.next()
            last = self.next().value
            self.eat("}")
            lo, hi = int(first), int(last)
            out = []
            for k in range(lo, hi + 1):
                c = self.sig.consts.get(str(k))
                if c is None or c.sort != sort:
                    raise ParseError(f"no constant {k} of sort {sort}")
                out.append(c)
            return out
        names = [first]
        while self.at(","):
            self.next()
            names.append(self.next().value)
        self.eat("}")
        out = []
        for n in names:
            c = self.sig.consts.get(n)
            if c is None or c.sort != sort:
                raise ParseError(f"no constant {n} of sort {sort}")
            out.append(c)
        return out

    def parse_formula(self, scope: dict) -> Formula:
        parts = [self.parse_conjunct(scope)]
        while self.at("or"):
            self.next()
            parts.append(self.parse_conjunct(scope))
        return disj(*parts)

    def parse_conjunct(self, scope: dict) -> Formula:
        parts = [self.parse_atom(scope)]
        while self.at("and"):
            self.next()
            parts.append(self.parse_atom(scope))
        return conj(*parts)

    def parse_fresh(self, scope: dict) -> list[Var]:
        self.eat("fresh")
        out = []
        while True:
            name = self.eat_ident()
            self.eat(":")
            v = Var(name, self.sort(self.eat_ident()))
            scope[name] = v
            out.append(v)
            if not self.at(","):
                break
            self.next()
        return out

    # -- transitions --------------------------------------------------------

    def parse_transition(self) -> None:
        st = self.must_setting()
        self.eat("transition")
        name = self.eat_ident()
        if any(t.name == name for t in self.transitions):
            self.fail(f"duplicate transition {name}")
        kind = self.eat_ident()
        if kind == "propagate":
            self.transitions.append(self.parse_propagate(name))
        elif kind == "insert":
            self.eat("into")
            sort = self.sort(self.eat_ident())
            self.eat("at")
            row = Var(self.eat_ident(), sort)
            self.transitions.append(self.parse_insert(name, sort, row))
        elif kind == "delete":
            self.eat("from")
            sort = self.sort(self.eat_ident())
            self.eat("at")
            row = Var(self.eat_ident(), sort)
            self.transitions.append(self.parse_delete(name, sort, row))
        elif kind == "bulk":
            self.eat("on")
            sort = self.sort(self.eat_ident())
            self.eat("at")
            row = Var(self.eat_ident(), sort)
            self.transitions.append(self.parse_bulk(name, sort, row))
        elif kind == "raw":
            self.transitions.append(self.parse_raw(name))
        else:
            self.fail("expected propagate, insert, delete, bulk or raw")

    def parse_sets(self, scope: dict, sets: dict) -> None:
        st = self.must_setting()
        self.eat("set")
        vname = self.eat_ident()
        v = st.variables.get(vname)
        if v is None:
            raise ParseError(f"set of unknown variable {vname}")
        self.eat(":=")
        sets[v] = self.parse_term(v.sort, scope)

    def parse_propagate(self, name: str):
        st = self.must_setting()
        self.eat("{")
        scope: dict = {}
        fresh: list[Var] = []
        where: Formula = TRUE
        sets: dict = {}
        write = None
        while not self.at("}"):
            kw = self.peek().value
            if kw == "fresh":
                fresh.extend(self.parse_fresh(scope))
            elif kw == "where":
                self.next()
                where = conj(where, self.parse_formula(scope))
            elif kw == "set":
                self.parse_sets(scope, sets)
            elif kw == "write":
                self.next()
                cname = self.eat_ident()
                comp = st.components.get(cname)
                if comp is None:
                    raise ParseError(f"write to unknown component {cname}")
                self.eat("[")
                row = Var(self.eat_ident(), comp.source)
                scope[row.name] = row
                self.eat("]")
                self.eat(":=")
                value = self.parse_term(comp.target, scope)
                self.eat("when")
                row_where = self.parse_formula(scope)
                write = (comp, row, value, row_where)
            else:
                self.fail("expected fresh, where, set or write")
        self.eat("}")
        return PropagateMacro(name, st, tuple(fresh), where, sets, write)

    def parse_insert(self, name: str, sort: Sort, row: Var):
        st = self.must_setting()
        self.eat("{")
        scope: dict = {row.name: row}
        fresh: list[Var] = []
        where: Formula = TRUE
        empty = None
        row_values: dict = {}
        sets: dict = {}
        suppress = None
        while not self.at("}"):
            kw = self.peek().value
            if kw == "fresh":
                fresh.extend(self.parse_fresh(scope))
            elif kw == "where":
                self.next()
                where = conj(where, self.parse_formula(scope))
            elif kw == "empty":
                self.next()
                empty = [self.component(self.eat_ident(), sort)]
                while self.at(","):
                    self.next()
                    empty.append(self.component(self.eat_ident(), sort))
            elif kw == "row":
                self.next()
                comp = self.component(self.eat_ident(), sort)
                self.eat(":=")
                row_values[comp] = self.parse_term(comp.target, scope)
            elif kw == "suppress":
                self.next()
                self.eat("when")
                suppress = []
                while True:
                    comp = self.component(self.eat_ident(), sort)
                    self.eat("=")
                    suppress.append((comp, self.parse_term(comp.target, scope)))
                    if not self.at("and"):
                        break
                    self.next()
            elif kw == "set":
                self.parse_sets(scope, sets)
            else:
                self.fail("expected fresh, where, empty, row, suppress or set")
        self.eat("}")
        return InsertMacro(name, st, sort, row, tuple(fresh), where,
                           empty, row_values, sets, suppress)

    def parse_delete(self, name: str, sort: Sort, row: Var):
        st = self.must_setting()
        self.eat("{")
        scope: dict = {row.name: row}
        fresh: list[Var] = []
        where: Formula = TRUE
        require = None
        sets: dict = {}
        while not self.at("}"):
            kw = self.peek().value
            if kw == "fresh":
                fresh.extend(self.parse_fresh(scope))
            elif kw == "where":
                self.next()
                where = conj(where, self.parse_formula(scope))
            elif kw == "require":
                self.next()
                require = [self.component(self.eat_ident(), sort)]
                while self.at(","):
                    self.next()
                    require.append(self.component(self.eat_ident(), sort))
            elif kw == "set":
                self.parse_sets(scope, sets)
            else:
                self.fail("expected fresh, where, require or set")
        self.eat("}")
        return DeleteMacro(name, st, sort, row, tuple(fresh), where, require, sets)

    def parse_bulk(self, name: str, sort: Sort, row: Var):
        st = self.must_setting()
        self.eat("{")
        scope_out: dict = {}
        scope_row: dict = {row.name: row}
        var_cond: Formula = TRUE
        row_cond: Formula = TRUE
        updates: dict = {}
        sets: dict = {}
        while not self.at("}"):
            kw = self.peek().value
            if kw == "where":
                self.next()
                var_cond = conj(var_cond, self.parse_formula(scope_out))
            elif kw == "when":
                self.next()
                row_cond = conj(row_cond, self.parse_formula(scope_row))
            elif kw == "update":
                self.next()
                comp = self.component(self.eat_ident(), sort)
                self.eat(":=")
                then_t = self.parse_term(comp.target, scope_row)
                self.eat("else")
                if self.at("keep"):
                    self.next()
                    else_t = KEEP
                else:
                    else_t = self.parse_term(comp.target, scope_row)
                updates[comp] = (then_t, else_t)
            elif kw == "set":
                self.parse_sets(scope_out, sets)
            else:
                self.fail("expected where, when, update or set")
        self.eat("}")
        return BulkMacro(name, st, sort, var_cond, row, row_cond, updates, sets)

    def parse_raw(self, name: str):
        st = self.must_setting()
        self.eat("{")
        scope: dict = {}
        fresh: list[Var] = []
        guard: Formula = TRUE
        var_updates: dict = {}
        comp_updates: list = []
        while not self.at("}"):
            kw = self.peek().value
            if kw == "fresh":
                fresh.extend(self.parse_fresh(scope))
            elif kw == "guard":
                self.next()
                guard = conj(guard, self.parse_formula(scope))
            elif kw == "set":
                self.next()
                target = self.eat_ident()
                if self.at("["):  # single-cell write sugar
                    comp = self.component_any(target)
                    self.next()
                    idx = self.parse_term(comp.source, scope)
                    self.eat("]")
                    self.eat(":=")
                    val = self.parse_term(comp.target, scope)
                    p = Var("@y", comp.source)
                    comp_updates.append((comp, p, CaseFn((
                        (eq(p, idx), val), (TRUE, Read(comp, p))))))
                    continue
                self.eat(":=")
                if self.at("lambda"):
                    comp = self.component_any(target)
                    self.next()
                    p = Var(self.eat_ident(), comp.source)
                    self.eat(".")
                    fn = self.parse_cases(comp, p, dict(scope, **{p.name: p}))
                    comp_updates.append((comp, p, fn))
                else:
                    v = st.variables.get(target)
                    if v is None:
                        raise ParseError(f"set of unknown variable {target}")
                    from .syntax import const_fn
                    var_updates[v] = const_fn(self.parse_term(v.sort, scope))
            else:
                self.fail("expected fresh, guard or set")
        self.eat("}")
        from .updates import _identity_updates
        tau = Transition(name, tuple(fresh), guard,
                         _identity_updates(st, var_updates), tuple(comp_updates))
        return RawTransition(name, tau)

    def parse_cases(self, comp: Component, p: Var, scope: dict) -> CaseFn:
        cases = []
        while self.at("if"):
            self.next()
            g = self.parse_formula(scope)
            self.eat("then")
            v = self.parse_term(comp.target, scope)
            cases.append((g, v))
            self.eat("else")
        default = self.parse_term(comp.target, scope)
        cases.append((TRUE, default))
        return CaseFn(tuple(cases))

    def component(self, name: str, sort: Sort) -> Component:
        c = self.component_any(name)
        if c.source != sort:
            raise ParseError(f"component {name} is not on sort {sort}")
        return c

    def component_any(self, name: str) -> Component:
        c = self.must_setting().components.get(name)
        if c is None:
            raise ParseError(f"unknown component {name}")
        return c

    # -- properties -----------------------------------------------------------

    def parse_property(self) -> None:
        self.eat("property")
        name = self.eat_ident()
        if name in self.properties:
            self.fail(f"duplicate property {name}")
        scope: dict = {}
        bound: list[Var] = []
        if self.at("exists"):
            self.next()
            while True:
                vname = self.eat_ident()
                self.eat(":")
                v = Var(vname, self.sort(self.eat_ident()))
                scope[vname] = v
                bound.append(v)
                if not self.at(","):
                    break
                self.next()
        self.eat("{")
        f = self.parse_formula(scope)
        self.eat("}")
        self.properties[name] = [Cube(tuple(bound), lits) for lits in to_dnf(f)]


def loads(text: str) -> RasSystem:
    return Parser(text).parse()


def load(path: str) -> RasSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


# ---------------------------------------------------------------------------
# printing (the inverse of loads, up to macro sugar: every transition is
# emitted in the raw guarded-assignment form)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")


def _p_term(t: Term) -> str:
    if isinstance(t, Cst):
        return "undef" if t.sym.is_undef else t.sym.name
    if isinstance(t, Var):
        return t.name
    if isinstance(t, App):
        return f"{t.func.name}({_p_term(t.arg)})"
    if isinstance(t, Read):
        return f"{t.comp.name}[{_p_term(t.index)}]"
    raise ValueError(f"unprintable term {t!r}")


def _p_elems(elems) -> str:
    names = sorted(c.name for c in elems)
    try:
        ints = sorted(int(n) for n in names)
    except ValueError:
        return "{" + ", ".join(names) + "}"
    if ints != list(range(ints[0], ints[-1] + 1)):
        raise ValueError("non-contiguous numeric element set has no surface syntax")
    return f"{{{ints[0]} .. {ints[-1]}}}"


def _p_atom(a) -> str:
    from .syntax import Lit, Member
    if isinstance(a, Lit):
        return f"{_p_term(a.lhs)} {'=' if a.pos else '!='} {_p_term(a.rhs)}"
    if isinstance(a, Member):
        return f"{_p_term(a.term)} {'in' if a.pos else 'not in'} {_p_elems(a.elems)}"
    raise ValueError(f"unprintable atom {a!r}")


def _p_formula(f: Formula) -> str:
    from .syntax import And, Or

    def atomic(g: Formula) -> str:
        if isinstance(g, (And, Or)):
            return "(" + _p_formula(g) + ")"
        return _p_atom(g)

    def conjunct(g: Formula) -> str:
        if isinstance(g, And):
            return " and ".join(atomic(p) for p in g.args)
        return atomic(g)

    if isinstance(f, Or):
        return " or ".join(conjunct(p) for p in f.args)
    return conjunct(f)


def _p_transition(setting: ArtifactSetting, tau: Transition) -> list[str]:
    from .syntax import Lit, term_vars

    lines = [f"transition {tau.name} raw {{"]
    if tau.fresh:
        lines.append("  fresh " + ", ".join(f"{v.name} : {v.sort.name}"
                                            for v in tau.fresh))
    if tau.guard is not TRUE:
        lines.append("  guard " + _p_formula(tau.guard))
    for v, fn in tau.var_updates:
        if fn.cases == ((TRUE, v),):
            continue
        if len(fn.cases) != 1:
            raise ValueError(f"{tau.name}: conditional update of {v.name} "
                             "has no surface syntax")
        lines.append(f"  set {v.name} := {_p_term(fn.cases[0][1])}")

    taken = (set(setting.variables) | set(setting.components)
             | set(setting.theory.sig.consts) | set(setting.theory.sig.funcs)
             | {v.name for v in tau.fresh})
    for comp, p, fn in tau.comp_updates:
        # first-match-wins: a true guard ends the case list early
        cases = []
        for g, t in fn.cases:
            if g is TRUE:
                cases.append((g, t))
                break
            cases.append((g, t))
        if cases == [(TRUE, Read(comp, p))]:
            continue
        if len(cases) == 2 and cases[1] == (TRUE, Read(comp, p)):
            g, val = cases[0]
            if isinstance(g, Lit) and g.pos and p in (g.lhs, g.rhs):
                idx = g.rhs if g.lhs == p else g.lhs
                if p not in term_vars(idx) and p not in term_vars(val):
                    lines.append(f"  set {comp.name}[{_p_term(idx)}] := {_p_term(val)}")
                    continue
        if not _IDENT.fullmatch(p.name) or p.name in taken:
            k = 0
            while f"q{k}" in taken:
                k += 1
            np = Var(f"q{k}", p.sort)
            cases = [(substitute(g, {p: np}) if g is not TRUE else TRUE,
                      subst_term(t, {p: np})) for g, t in cases]
            p = np
        body = []
        for g, t in cases[:-1]:
            body.append(f"if {_p_formula(g)} then {_p_term(t)} else")
        body.append(_p_term(cases[-1][1]))
        lines.append(f"  set {comp.name} := lambda {p.name} . " + " ".join(body))
    lines.append("}")
    return lines


def dumps(system: RasSystem) -> str:
    """Canonical text for a system; ``loads(dumps(loads(x)))`` prints the
    same text again (transitions come out in the raw form)."""
    st = system.setting
    sig = st.theory.sig
    out: list[str] = [f"system {system.name}", ""]

    out.append("schema {")
    for s in sig.sorts.values():
        if not s.is_basic:
            continue
        consts = [c for c in sig.consts.values() if c.sort == s]
        nums = sorted(int(c.name) for c in consts
                      if re.fullmatch(r"-?\d+", c.name))
        head = f"  {s.kind} sort {s.name}"
        if nums:
            if nums != list(range(nums[0], nums[-1] + 1)) or len(nums) != len(consts):
                raise ValueError(f"constants of {s.name} have no surface syntax")
            head += f" enum {nums[0]} .. {nums[-1]}"
        out.append(head)
    for f in sig.funcs.values():
        out.append(f"  fun {f.name} : {f.source.name} -> {f.target.name}")
    for s in sig.sorts.values():
        named = [c.name for c in sig.consts.values()
                 if c.sort == s and not re.fullmatch(r"-?\d+", c.name)]
        if named:
            out.append(f"  const {', '.join(named)} : {s.name}")
    pack = {"ground-null+fk": "ground-null-fk"}.get(st.theory.pack, st.theory.pack)
    out.append(f"  axioms {pack}")
    for fk in st.theory.fks:
        out.append(f"  fk {fk.source_fn.name} -> {fk.target_fn.name}")
    out.append("}")

    out.append("")
    out.append("artifacts {")
    for s in st.artifact_sorts:
        out.append(f"  sort {s.name}")
    for c in st.components.values():
        out.append(f"  component {c.name} : {c.source.name} -> {c.target.name}")
    for v in st.variables.values():
        out.append(f"  var {v.name} : {v.sort.name}")
    out.append("}")

    out.append("")
    out.append("init {")
    for sym, c in sorted(system.init.items(), key=lambda kv: kv[0].name):
        out.append(f"  {sym.name} = {'undef' if c.is_undef else c.name}")
    out.append("}")

    for ct in system.transitions:
        out.append("")
        out.extend(_p_transition(st, ct.tau))

    for name, cubes in system.properties.items():
        out.append("")
        bounds = {c.bound for c in cubes}
        if len(bounds) != 1:
            raise ValueError(f"property {name}: disjuncts bind different variables")
        (bound,) = bounds
        head = f"property {name}"
        if bound:
            head += " exists " + ", ".join(f"{v.name} : {v.sort.name}" for v in bound)
        out.append(head + " {")
        parts = sorted(" and ".join(sorted(_p_atom(a) for a in c.lits))
                       for c in cubes)
        if len(parts) > 1:
            out.append("  " + " or ".join(f"({p})" for p in parts))
        else:
            out.append("  " + parts[0])
        out.append("}")

    return "\n".join(out) + "\n"
