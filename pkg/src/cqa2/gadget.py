"""The 3-SAT hardness gadget: CNF input, normalisation, and D[phi] built
from copies of a nice fork-tripath.

Every occurrence of a variable gets its own copy of the tripath. The root of
the copy lands in the clause block, the leaves of copies of the same variable
are glued pairwise, and all other blocks are private to their copy. A repair
that falsifies the query picks, in every clause block, a literal that can be
made true consistently.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .engine.decide import q_connected_partition
from .engine.oracle import DEFAULT_NODE_LIMIT, DEFAULT_REPAIR_CAP, falsifies, oracle_certain, search_falsifying
from .engine.result import Answer
from .model import Database, Fact, ParseError, Repair, Symbol, Tup, count_repairs
from .query import Query
from .solutions import pair_checker
from .tripath import NiceWitness, SearchBudget, SearchStatus, Tripath, check_nice, search_tripath


# ----------------------------------------------------------------------- CNF


@dataclass(frozen=True)
class Cnf:
    """Clauses of non-zero integer literals, DIMACS style."""

    num_vars: int
    clauses: tuple

    @classmethod
    def of(cls, clauses, num_vars: Optional[int] = None) -> "Cnf":
        cl = tuple(tuple(c) for c in clauses)
        top = max((abs(x) for c in cl for x in c), default=0)
        return cls(max(top, num_vars or 0), cl)

    @property
    def variables(self) -> list[int]:
        return sorted({abs(x) for c in self.clauses for x in c})

    def occurrences(self, v: int) -> list[tuple[int, int]]:
        """(clause index, literal) pairs mentioning ``v``, in clause order."""
        return [(i, x) for i, c in enumerate(self.clauses) for x in c if abs(x) == v]

    def is_conforming(self) -> bool:
        for c in self.clauses:
            if not c or len(set(c)) != len(c) or any(-x in c for x in c) or len(c) > 3:
                return False
        for v in self.variables:
            occ = [x for _, x in self.occurrences(v)]
            if len(occ) > 3 or not any(x > 0 for x in occ) or not any(x < 0 for x in occ):
                return False
        return True

    @property
    def v2(self) -> list[int]:
        return [v for v in self.variables if len(self.occurrences(v)) == 2]

    @property
    def v3(self) -> list[int]:
        return [v for v in self.variables if len(self.occurrences(v)) == 3]

    def evaluate(self, assignment: dict) -> bool:
        return all(any(assignment[abs(x)] == (x > 0) for x in c) for c in self.clauses)

    def satisfying_assignment(self, max_vars: int = 20) -> Optional[dict]:
        vs = self.variables
        if len(vs) > max_vars:
            raise ValueError(f"{len(vs)} variables exceed the truth-table limit {max_vars}")
        for bits in itertools.product((False, True), repeat=len(vs)):
            a = dict(zip(vs, bits))
            if self.evaluate(a):
                return a
        return None

    def satisfiable(self, max_vars: int = 20) -> bool:
        return self.satisfying_assignment(max_vars) is not None

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c + (0,))) for c in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> Cnf:
    """``c`` comments, one ``p cnf V C`` header, clauses ended by 0."""
    header = None
    clauses, cur = [], []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("expected a single 'p cnf V C' header", n)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError("header counts must be integers", n) from None
            continue
        if header is None:
            raise ParseError("clause before the 'p cnf' header", n)
        for tok in line.split():
            try:
                x = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", n) from None
            if x == 0:
                clauses.append(tuple(cur))
                cur = []
            elif abs(x) > header[0]:
                raise ParseError(f"literal {x} exceeds the declared {header[0]} variables", n)
            else:
                cur.append(x)
    if header is None:
        raise ParseError("missing 'p cnf V C' header")
    if cur:
        clauses.append(tuple(cur))
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return Cnf(header[0], tuple(clauses))


def normalize_3sat(phi: Cnf) -> Cnf:
    """An equisatisfiable conforming CNF.

    Duplicate literals and tautological clauses are dropped, clauses longer
    than three are split with fresh variables, pure literals are removed
    together with their clauses, and a variable with n > 3 occurrences is
    replaced by n fresh copies tied together by a cycle of implications. A
    formula with an empty clause becomes (p) & (-p).
    """
    if phi.is_conforming():
        return phi
    top = phi.num_vars
    clauses = []
    for c in phi.clauses:
        c = tuple(dict.fromkeys(c))
        if any(-x in c for x in c):
            continue
        while len(c) > 3:
            top += 1
            clauses.append((c[0], c[1], top))
            c = (-top,) + c[2:]
        clauses.append(c)
    if any(not c for c in clauses):
        return Cnf(1, ((1,), (-1,)))

    changed = True
    while changed:
        changed = False
        for v in sorted({abs(x) for c in clauses for x in c}):
            signs = {x > 0 for c in clauses for x in c if abs(x) == v}
            if len(signs) == 1:
                clauses = [c for c in clauses if v not in c and -v not in c]
                changed = True

    out = [list(c) for c in clauses]
    extra = []
    for v in sorted({abs(x) for c in clauses for x in c}):
        occ = [(i, j) for i, c in enumerate(out) for j, x in enumerate(c) if abs(x) == v]
        if len(occ) <= 3:
            continue
        copies = [v] + list(range(top + 1, top + len(occ)))
        top += len(occ) - 1
        for (i, j), nv in zip(occ, copies):
            out[i][j] = nv if out[i][j] > 0 else -nv
        for a, b in zip(copies, copies[1:] + copies[:1]):
            extra.append((-a, b))
    result = Cnf(top, tuple(tuple(c) for c in out) + tuple(extra))
    assert result.is_conforming()
    return result


# -------------------------------------------------------------------- gadget


@dataclass(frozen=True)
class GadgetPlan:
    query: Query
    tripath: Tripath
    witness: NiceWitness

    def __post_init__(self):
        if self.tripath.kind != "fork":
            raise ValueError("the gadget needs a fork-tripath")
        if check_nice(self.query, self.tripath) is None:
            raise ValueError("the gadget needs a nice tripath")

    def substitution(self, clause: Symbol, lit: Symbol, u, v, w) -> dict:
        """Element map for one copy. Equal witnesses among x, y, z share one
        replacement, so the equality pattern is preserved."""
        wt = self.witness
        sub = {}
        for tag, e in (("x", wt.x), ("y", wt.y), ("z", wt.z)):
            if e not in sub:
                sub[e] = Tup(tag, (clause, lit))
        sub[wt.u_root] = u
        sub[wt.u_leaf1] = v
        sub[wt.u_leaf2] = w
        return sub


def make_plan(q: Query, budget: Optional[SearchBudget] = None) -> GadgetPlan:
    res = search_tripath(q, budget or SearchBudget.default(q), kind="fork", require_nice=True)
    if res.status is not SearchStatus.FOUND:
        raise ValueError(f"no nice fork-tripath found for {q} ({res.status.value})")
    return GadgetPlan(q, res.tripath, res.witness)


class GadgetError(RuntimeError):
    pass


@dataclass
class Gadget:
    database: Database
    cnf: Cnf
    copies: list  # (label, variable, clause index, u, v, w)
    provenance: dict  # fact -> set of (copy label, tripath block index)
    pads: list
    comments: list = field(default_factory=list)

    def to_text(self) -> str:
        from .model import serialize_database

        return serialize_database(self.database, comments=self.comments)


def _clause_sym(i: int) -> Symbol:
    return Symbol(f"C{i + 1}")


def _var_sym(v: int) -> Symbol:
    return Symbol(f"p{v}")


def _copies_for(phi: Cnf, v: int) -> list:
    """(clause index, u, v, w) per copy of variable ``v``; the first copy is
    the clause of the occurrence whose polarity is used only once."""
    occ = phi.occurrences(v)
    pos = [i for i, x in occ if x > 0]
    neg = [i for i, x in occ if x < 0]
    single, double = (pos, neg) if len(pos) == 1 else (neg, pos)
    l = _var_sym(v)
    C = _clause_sym(single[0])
    glue = lambda a, b: Tup("glue", (a, b, l))  # noqa: E731
    if len(double) == 1:
        C2 = _clause_sym(double[0])
        return [
            (single[0], C, glue(C, C), glue(C, C2)),
            (double[0], C2, glue(C2, C2), glue(C, C2)),
        ]
    C1, C2 = _clause_sym(double[0]), _clause_sym(double[1])
    return [
        (single[0], C, glue(C, C2), glue(C, C1)),
        (double[0], C1, glue(C1, C1), glue(C, C1)),
        (double[1], C2, glue(C, C2), glue(C2, C2)),
    ]


def build_gadget(q: Query, plan: GadgetPlan, phi: Cnf) -> Gadget:
    if not phi.is_conforming():
        raise ValueError("build_gadget needs a conforming CNF; run normalize_3sat first")
    tp = plan.tripath
    prov: dict[Fact, set] = {}
    copies = []
    roots_by_clause: dict[int, dict] = {}
    for v in phi.variables:
        for ci, u, vv, ww in _copies_for(phi, v):
            C = _clause_sym(ci)
            label = f"p{v}@{C}"
            sub = plan.substitution(C, _var_sym(v), u, vv, ww)
            copies.append((label, v, ci, u, vv, ww))
            for bi, blk in enumerate(tp.blocks):
                for fct in blk.facts:
                    g = Fact(fct.sig, tuple(sub.get(e, e) for e in fct.args))
                    prov.setdefault(g, set()).add((label, bi))
                    if fct == tp.u0:
                        seen = roots_by_clause.setdefault(ci, {})
                        if g in seen:
                            raise GadgetError(f"copies {seen[g]} and {label} share the root fact {g}")
                        seen[g] = label
    db = Database(prov, declared=[q.sig])
    check = pair_checker(q)
    pads = []
    n = 0
    extra = []
    k, l = q.sig.arity, q.sig.key_len
    clause_keys = {f.key_tuple for seen in roots_by_clause.values() for f in seen}
    for blk in db.blocks:
        # a unit clause keeps its singleton block: a pad there would let a
        # repair skip the clause altogether
        if len(blk) != 1 or blk[0].key_tuple in clause_keys:
            continue
        if k == l:
            raise GadgetError("cannot pad a block when every position is a key position")
        f = blk[0]
        args = list(f.args[:l])
        for _ in range(k - l):
            args.append(Tup("pad", (Symbol(str(n)),)))
            n += 1
        p = Fact(f.sig, tuple(args))
        extra.append(p)
    if extra:
        full = list(db.facts) + extra
        for p in extra:
            if any(check(p, x) or check(x, p) for x in full):
                raise GadgetError(f"padding fact {p} forms a solution")
        pads = extra
        db = Database(full, declared=[q.sig])
    comments = [f"D[phi] for {q}", f"clauses: " + " & ".join(
        f"{_clause_sym(i)}=({' | '.join(('' if x > 0 else '-') + f'p{abs(x)}' for x in c)})"
        for i, c in enumerate(phi.clauses))]
    for label, v, ci, u, vv, ww in copies:
        comments.append(f"copy {label}: root key element {u}, leaf key elements {vv} and {ww}")
    comments.append(f"{len(pads)} padding facts")
    return Gadget(db, phi, copies, prov, pads, comments)


# ------------------------------------------------------------- verification


@dataclass
class GadgetCheck:
    satisfiable: bool
    answer: Answer
    agree: Optional[bool]
    components: int
    falsifying_repair: Optional[Repair] = None

    def describe(self) -> str:
        kind = "sat" if self.satisfiable else "unsat"
        return f"{self.answer.value} ({kind} input)"


def certain_by_components(
    db: Database, q: Query, repair_cap: int = DEFAULT_REPAIR_CAP, node_limit: int = DEFAULT_NODE_LIMIT
) -> tuple[Answer, Optional[Repair], int]:
    """Certain iff some q-connected component is certain. Components within
    ``repair_cap`` use the enumeration oracle, larger ones the exhaustive
    backtracking search."""
    parts = q_connected_partition(db, q)
    repairs = []
    unknown = False
    for p in parts:
        if count_repairs(p) <= repair_cap:
            r = oracle_certain(p, q, repair_cap)
            ans, rep = r.answer, r.falsifying_repair
        else:
            status, rep = search_falsifying(p, q, node_limit)
            ans = {1: Answer.NOT_CERTAIN, 0: Answer.CERTAIN}.get(status, Answer.UNKNOWN)
        if ans is Answer.CERTAIN:
            return Answer.CERTAIN, None, len(parts)
        if ans is Answer.UNKNOWN:
            unknown = True
        else:
            repairs.append(rep)
    if unknown:
        return Answer.UNKNOWN, None, len(parts)
    pos = {}
    for r in repairs:
        for f in r.facts:
            b = db.block_index(f)
            pos[b] = db.blocks[b].index(f)
    rep = Repair(db, tuple(pos[b] for b in range(len(db.blocks))))
    assert falsifies(q, rep)
    return Answer.NOT_CERTAIN, rep, len(parts)


def verify_gadget(q: Query, plan: GadgetPlan, phi: Cnf, **caps) -> GadgetCheck:
    """Compare satisfiability of ``phi`` (truth table) with non-certainty of D[phi]."""
    g = build_gadget(q, plan, phi)
    sat = phi.satisfiable()
    ans, rep, ncomp = certain_by_components(g.database, q, **caps)
    agree = None if ans is Answer.UNKNOWN else (sat == (ans is Answer.NOT_CERTAIN))
    return GadgetCheck(sat, ans, agree, ncomp, rep)


def structural_report(q: Query, plan: GadgetPlan, g: Gadget) -> dict:
    """Block sizes and where every solution pair of D[phi] lives."""
    check = pair_checker(q)
    tp = plan.tripath
    small = [blk for blk in g.database.blocks if len(blk) < 2]
    tree_edges = {(b.parent, i) for i, b in enumerate(tp.blocks) if b.parent is not None}
    bad = []
    facts = g.database.sorted_facts
    for a in facts:
        for b in facts:
            if not check(a, b):
                continue
            ok = False
            for la, ba in g.provenance.get(a, ()):
                for lb, bb in g.provenance.get(b, ()):
                    if la == lb and ((ba, bb) in tree_edges or (bb, ba) in tree_edges):
                        ok = True
            if not ok:
                bad.append((str(a), str(b)))
    return {"blocks": len(g.database.blocks), "small_blocks": len(small), "stray_solutions": bad}
