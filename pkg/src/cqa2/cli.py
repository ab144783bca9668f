"""Command-line interface: ``cqa2 <command> ...``.

Exit codes: 0 when the question was decided, 1 for usage or input errors,
2 when a budget ran out before an answer was found.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional, TextIO

from .engine import METHODS, Answer, EngineConfig, decide_certain, oracle_certain
from .engine.oracle import DEFAULT_NODE_LIMIT, DEFAULT_REPAIR_CAP
from .model import Database, ParseError, parse_database, serialize_database
from .query import Query, classify, mu_reduce, parse_query, sjf
from .solutions import solution_graph, to_dot
from .tripath import SearchBudget, SearchStatus, search_tripath, tripath_to_text

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN = 0, 1, 2
DEFAULT_SEED = 0


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomised steps")

    p = _Parser(prog="cqa2", description="Consistent query answering for two-atom self-join queries.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_, db=True):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.add_argument("--query", type=Path, required=True, help="query file")
        if db:
            sp.add_argument("--db", type=Path, required=True, help="database file")
        return sp

    def budget_flags(sp):
        sp.add_argument("--max-blocks", type=_positive, default=9)
        sp.add_argument("--max-domain", type=_positive, default=None)

    sp = add("classify", "complexity class of a query", db=False)
    budget_flags(sp)

    sp = add("certain", "decide certainty on a database")
    sp.add_argument("--method", choices=METHODS, default="auto")
    sp.add_argument("--k", type=_positive, default=None, help="fixed k for the fixpoint")
    sp.add_argument("--k-cap", type=_positive, default=4)
    sp.add_argument("--repair-cap", type=_positive, default=DEFAULT_REPAIR_CAP)
    sp.add_argument("--node-limit", type=_positive, default=DEFAULT_NODE_LIMIT)
    sp.add_argument("--timings", action="store_true", help="include timings in --json output")
    budget_flags(sp)

    sp = add("oracle", "decide certainty by enumerating repairs")
    sp.add_argument("--repair-cap", type=_positive, default=DEFAULT_REPAIR_CAP)

    sp = add("tripath", "search for a tripath of a query", db=False)
    sp.add_argument("--kind", choices=("any", "fork", "triangle"), default="any")
    sp.add_argument("--nice", action="store_true", help="require a nice tripath")
    sp.add_argument("--emit", type=Path, help="write the tripath as a database file")
    budget_flags(sp)

    sp = add("gadget", "build the 3-SAT gadget database for a CNF", db=False)
    sp.add_argument("--cnf", type=Path, required=True, help="DIMACS file")
    sp.add_argument("--out", type=Path, help="write D[phi] here")
    sp.add_argument("--verify", action="store_true", help="compare with a truth table")
    sp.add_argument("--repair-cap", type=_positive, default=DEFAULT_REPAIR_CAP)
    sp.add_argument("--node-limit", type=_positive, default=DEFAULT_NODE_LIMIT)
    budget_flags(sp)

    sp = add("reduce-sjf", "map a two-relation database for sjf(q) to one for q")
    sp.add_argument("--out", type=Path, help="write the result here instead of stdout")

    sp = add("graph", "solution graph of a database")
    sp.add_argument("--dot", type=Path, help="write Graphviz DOT here")
    return p


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_query(path: Path) -> Query:
    return parse_query(_read(path))


def _load_db(path: Path, q: Optional[Query] = None) -> Database:
    db = parse_database(_read(path))
    if q is not None:
        for s in db.declared:
            if s.relation == q.sig.relation and s != q.sig:
                raise InputError(f"{path}: header {s.header()} does not match the query's {q.sig.header()}")
    return db


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror or exc}") from None


def _emit(out: TextIO, as_json: bool, report: dict, lines: list[str]) -> None:
    if as_json:
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        out.write("\n".join(lines) + "\n")


# ------------------------------------------------------------------ commands


def cmd_classify(a, out) -> int:
    q = _load_query(a.query)
    c = classify(q, _budget(a, q))
    lines = [c.describe()]
    if c.notes:
        lines += [f"  {n}" for n in c.notes]
    _emit(out, a.json, {"command": "classify", **c.to_json()}, lines)
    return EXIT_OK


def _budget(a, q: Query) -> SearchBudget:
    dom = a.max_domain if a.max_domain is not None else 2 * q.sig.arity * a.max_blocks
    return SearchBudget(max_blocks=a.max_blocks, max_domain=dom)


def _answer_report(res, a, command: str) -> tuple[dict, list[str], int]:
    report = {"command": command, **res.to_json(timings=getattr(a, "timings", False))}
    lines = [res.answer.value, f"method: {res.method}"]
    if res.k_used is not None:
        lines.append(f"k: {res.k_used}")
    if res.falsifying_repair is not None:
        lines.append("falsifying repair:")
        lines += [f"  {f}" for f in res.falsifying_repair.facts]
    code = EXIT_UNKNOWN if res.answer is Answer.UNKNOWN else EXIT_OK
    return report, lines, code


def cmd_certain(a, out) -> int:
    q = _load_query(a.query)
    db = _load_db(a.db, q)
    cfg = EngineConfig(
        method=a.method, k=a.k, k_cap=a.k_cap, repair_cap=a.repair_cap,
        node_limit=a.node_limit, tripath_budget=_budget(a, q),
    )
    res = decide_certain(db, q, cfg)
    report, lines, code = _answer_report(res, a, "certain")
    _emit(out, a.json, report, lines)
    return code


def cmd_oracle(a, out) -> int:
    q = _load_query(a.query)
    db = _load_db(a.db, q)
    res = oracle_certain(db, q, a.repair_cap)
    report, lines, code = _answer_report(res, a, "oracle")
    _emit(out, a.json, report, lines)
    return code


def cmd_tripath(a, out) -> int:
    q = _load_query(a.query)
    kind = None if a.kind == "any" else a.kind
    res = search_tripath(q, _budget(a, q), kind=kind, require_nice=a.nice)
    report = {"command": "tripath", "query": str(q), "status": res.status.value,
              "truncated": res.truncated, "nodes": res.nodes}
    lines = [res.status.value]
    if res.status is SearchStatus.FOUND:
        tp = res.tripath
        report["tripath"] = tp.to_json()
        if res.witness is not None:
            report["nice"] = res.witness.to_json()
        lines = [f"found {tp.kind}-tripath with {len(tp.blocks)} blocks"]
        text = tripath_to_text(tp, res.witness)
        if a.emit:
            _write(a.emit, text)
            lines.append(f"written to {a.emit}")
        else:
            lines.append(text.rstrip("\n"))
    elif res.truncated:
        lines.append("node limit reached; raise --max-blocks or the budget")
    _emit(out, a.json, report, lines)
    return EXIT_UNKNOWN if res.status is SearchStatus.NONE_WITHIN_BUDGET else EXIT_OK


def cmd_gadget(a, out) -> int:
    from .gadget import GadgetError, build_gadget, certain_by_components, make_plan, normalize_3sat, parse_dimacs

    q = _load_query(a.query)
    raw = parse_dimacs(_read(a.cnf))
    phi = normalize_3sat(raw)
    try:
        plan = make_plan(q, _budget(a, q))
        g = build_gadget(q, plan, phi)
    except (ValueError, GadgetError) as exc:
        raise InputError(str(exc)) from None
    db = g.database
    report = {"command": "gadget", "query": str(q), "facts": len(db), "blocks": len(db.blocks),
              "normalized": phi != raw, "cnf": phi.to_dimacs()}
    lines = [f"D[phi]: {len(db)} facts, {len(db.blocks)} blocks"]
    if phi != raw:
        lines.append("input was normalised to a conforming CNF")
    if a.out:
        _write(a.out, g.to_text())
        lines.append(f"written to {a.out}")
    code = EXIT_OK
    if a.verify:
        sat = phi.satisfiable()
        ans, _, ncomp = certain_by_components(db, q, a.repair_cap, a.node_limit)
        kind = "sat" if sat else "unsat"
        report.update(satisfiable=sat, answer=ans.value, components=ncomp)
        lines.append(f"{ans.value} ({kind} input)")
        if ans is Answer.UNKNOWN:
            code = EXIT_UNKNOWN
        elif sat != (ans is Answer.NOT_CERTAIN):
            report["mismatch"] = True
            lines.append("MISMATCH between satisfiability and certainty")
            code = EXIT_UNKNOWN
    _emit(out, a.json, report, lines)
    return code


def cmd_reduce_sjf(a, out) -> int:
    q = _load_query(a.query)
    db2 = _load_db(a.db)
    s = sjf(q)
    allowed = {s.A.sig, s.B.sig}
    for f in db2:
        if f.sig not in allowed:
            raise InputError(f"{f} is not over {s.A.sig.header()} or {s.B.sig.header()}")
    try:
        db = mu_reduce(q, db2)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    text = serialize_database(db, comments=[f"mu image for {q}"])
    if a.out:
        _write(a.out, text)
        _emit(out, a.json, {"command": "reduce-sjf", "facts": len(db), "out": str(a.out)},
              [f"{len(db)} facts written to {a.out}"])
    elif a.json:
        _emit(out, True, {"command": "reduce-sjf", "facts": len(db), "database": text}, [])
    else:
        out.write(text)
    return EXIT_OK


def cmd_graph(a, out) -> int:
    q = _load_query(a.query)
    db = _load_db(a.db, q)
    g = solution_graph(db, q)
    comps = g.components()
    report = {"command": "graph", "facts": len(g.facts), "edges": len(g.edges),
              "self_loops": len(g.self_loops), "components": len(comps),
              "clique_database": all(g.is_quasi_clique(c) for c in comps)}
    lines = [f"{report['facts']} facts, {report['edges']} edges, {report['self_loops']} self-loops, "
             f"{report['components']} components",
             "clique-database" if report["clique_database"] else "not a clique-database"]
    if a.dot:
        _write(a.dot, to_dot(db, q))
        lines.append(f"DOT written to {a.dot}")
    _emit(out, a.json, report, lines)
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "certain": cmd_certain,
    "oracle": cmd_oracle,
    "tripath": cmd_tripath,
    "gadget": cmd_gadget,
    "reduce-sjf": cmd_reduce_sjf,
    "graph": cmd_graph,
}


def run(argv=None, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        a = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    random.seed(a.seed)
    try:
        return COMMANDS[a.command](a, out)
    except (InputError, ParseError) as exc:
        err.write(f"cqa2 {a.command}: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
