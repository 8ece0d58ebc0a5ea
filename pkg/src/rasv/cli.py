"""Command-line front end: verify, classify, oracle, explain.

Exit codes: 0 for SAFE (or a clean report), 1 when some property is
violated (symbolically or on a bounded instance), 2 on a parse or usage
error, 3 when a search budget ran out before an answer.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .concrete import bounded_reach, enumerate_instances
from .dsl import ParseError, load
from .fragments import classify
from .search import BUDGET, SAFE, UNSAFE, RasSystem, breach, replay_any

EXIT_OK = 0
EXIT_UNSAFE = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3


def _load(path: str) -> RasSystem:
    try:
        return load(path)
    except (ParseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _props(system: RasSystem, name: Optional[str]) -> list[str]:
    if name is None:
        return list(system.properties)
    if name not in system.properties:
        print(f"error: no property {name!r}; available: "
              f"{', '.join(system.properties)}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)
    return [name]


def _parse_bounds(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        for item in pair.split(","):
            name, _, k = item.partition("=")
            if not k.isdigit():
                print(f"error: bad bound {item!r}, expected SORT=k",
                      file=sys.stderr)
                raise SystemExit(EXIT_PARSE)
            out[name] = int(k)
    return out


def _emit_json(path: Optional[str], payload) -> None:
    if path is None:
        return
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path == "-":
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> int:
    system = _load(args.spec)
    reports = []
    worst = EXIT_OK
    for prop in _props(system, args.property):
        verdict = breach(system, prop, max_depth=args.max_depth,
                         max_nodes=args.max_nodes, timeout=args.timeout)
        doc = verdict.to_json()
        doc["system"] = system.name
        line = (f"{prop}: {verdict.verdict}"
                f"  nodes={verdict.nodes} depth={verdict.depth}"
                f" decision-calls={verdict.decision_calls}"
                f" time={verdict.elapsed:.2f}s")
        print(line)
        if verdict.verdict == UNSAFE:
            worst = max(worst, EXIT_UNSAFE)
            print("  trace: " + " -> ".join(name for name, _ in verdict.trace))
            if args.replay:
                hit = replay_any(system, verdict)
                if hit is None:
                    print("  replay: no bounded instance found")
                else:
                    inst, sizes, states = hit
                    carriers = {s.name: len(es) for s, es in inst.carriers.items()}
                    doc["replay"] = {"carriers": carriers, "rows": sizes,
                                     "steps": len(states) - 1}
                    print(f"  replay: ok on carriers {carriers} rows {sizes}")
        elif verdict.verdict == BUDGET:
            worst = max(worst, EXIT_BUDGET)
        reports.append(doc)
    _emit_json(args.json, reports[0] if len(reports) == 1 else reports)
    return worst


def cmd_classify(args) -> int:
    system = _load(args.spec)
    cl = classify(system)
    print(f"{system.name}: {cl.verdict}")
    print(f"  acyclic={cl.acyclic} tree_like={cl.tree_like} sas={cl.sas}")
    for tg in cl.transitions:
        extra = f" ({tg.witness})" if tg.witness else ""
        print(f"  transition {tg.name}: {tg.grade} [{tg.basis}]{extra}")
    for name, pg in cl.properties.items():
        kind = ("strongly-local" if pg.strongly_local
                else "local" if pg.local else "not-local")
        print(f"  property {name}: {kind}")
    doc = cl.to_json()
    doc["system"] = system.name
    _emit_json(args.json, doc)
    return EXIT_OK


def cmd_oracle(args) -> int:
    system = _load(args.spec)
    st = system.setting
    bounds = _parse_bounds(args.bounds)
    sizes = {s.name: bounds.get(s.name, 2) for s in st.artifact_sorts}
    init = {v: system.init_const(v) for v in st.variables.values()}
    init.update({c: system.init_const(c) for c in st.components.values()})
    taus = [ct.tau for ct in system.transitions]

    worst = EXIT_OK
    reports = []
    for prop in _props(system, args.property):
        cubes = system.properties[prop]
        reached = None
        count = 0
        for inst in enumerate_instances(st.theory, bounds):
            count += 1
            if args.max_instances and count > args.max_instances:
                break
            res = bounded_reach(inst, st, init, taus, cubes, sizes,
                                max_steps=args.max_depth or 8,
                                max_states=args.max_nodes or 200000)
            if res.hit is not None:
                reached = res
                break
        doc = {"system": system.name, "property": prop,
               "bounds": bounds, "rows": sizes,
               "instances_tried": count}
        if reached is not None:
            worst = max(worst, EXIT_UNSAFE)
            doc["result"] = "REACHED"
            doc["trace"] = [name for name, _ in reached.trace]
            print(f"{prop}: REACHED in {reached.steps} steps "
                  f"({count} instance(s) tried)")
            print("  trace: " + " -> ".join(doc["trace"]))
        else:
            doc["result"] = "BOUND-SAFE"
            print(f"{prop}: BOUND-SAFE within depth {args.max_depth or 8} "
                  f"({count} instance(s) tried)")
        reports.append(doc)
    _emit_json(args.json, reports[0] if len(reports) == 1 else reports)
    return worst


def cmd_explain(args) -> int:
    system = _load(args.spec)
    worst = EXIT_OK
    for prop in _props(system, args.property):
        print(f"property {prop}:")

        def show(node, event) -> None:
            indent = "  " * (node.depth + 1)
            via = node.via if node.via is not None else "(property)"
            mark = {"covered": "subsumed", "expanded": "", "hit": "INITIAL"}[event]
            tail = f"  [{mark}]" if mark else ""
            print(f"{indent}{via}: {node.cube!r}{tail}")

        verdict = breach(system, prop, max_depth=args.max_depth,
                         max_nodes=args.max_nodes, timeout=args.timeout,
                         observer=show)
        print(f"  => {verdict.verdict} (nodes={verdict.nodes}, "
              f"depth={verdict.depth}, time={verdict.elapsed:.2f}s)")
        if verdict.verdict == UNSAFE:
            worst = max(worst, EXIT_UNSAFE)
        elif verdict.verdict == BUDGET:
            worst = max(worst, EXIT_BUDGET)
    return worst


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rasv",
        description="Safety verification of relational artifact systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    def budgets(p) -> None:
        p.add_argument("--max-depth", type=int, default=None, metavar="N")
        p.add_argument("--max-nodes", type=int, default=None, metavar="N")
        p.add_argument("--timeout", type=float, default=None, metavar="SECS")

    def common(p) -> None:
        p.add_argument("spec", help="system description file")
        p.add_argument("--property", default=None, metavar="NAME",
                       help="restrict to one property (default: all)")
        p.add_argument("--json", default=None, metavar="PATH",
                       help="write a machine-readable report ('-' for stdout)")

    p = sub.add_parser("verify", help="symbolic backward reachability")
    common(p)
    budgets(p)
    p.add_argument("--replay", action="store_true",
                   help="replay counterexample traces on a bounded instance")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("classify", help="termination-fragment report")
    common(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("oracle", help="bounded explicit-state search")
    common(p)
    budgets(p)
    p.add_argument("--bounds", action="append", default=[], metavar="SORT=k",
                   help="carrier size per database sort / row count per "
                        "artifact sort (repeatable)")
    p.add_argument("--max-instances", type=int, default=None, metavar="N")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("explain", help="dump the backward search node tree")
    common(p)
    budgets(p)
    p.set_defaults(fn=cmd_explain)

    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
