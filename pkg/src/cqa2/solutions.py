"""Solutions of a two-atom query on a database: the solution graph, branching
facts and the bg/g table, quasi-cliques and the zig-zag property."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

from .model import Database, Fact
from .query import Atom, Query


@lru_cache(maxsize=256)
def _pattern(q: Query) -> tuple:
    """Position pairs (over the concatenation of both facts) that must agree."""
    first: dict[str, int] = {}
    eqs = []
    for pos, v in enumerate(q.A.vars + q.B.vars):
        if v in first:
            eqs.append((first[v], pos))
        else:
            first[v] = pos
    return tuple(eqs)


def pair_checker(q: Query) -> Callable[[Fact, Fact], bool]:
    eqs = _pattern(q)
    k = q.sig.arity
    rel_a, rel_b = q.A.sig.relation, q.B.sig.relation
    split = [(i, j - k) for i, j in eqs if i < k <= j]
    in_a = [(i, j) for i, j in eqs if j < k]
    in_b = [(i - k, j - k) for i, j in eqs if i >= k]

    def check(a: Fact, b: Fact) -> bool:
        if a.sig.relation != rel_a or b.sig.relation != rel_b:
            return False
        x, y = a.args, b.args
        for i, j in in_a:
            if x[i] != x[j]:
                return False
        for i, j in in_b:
            if y[i] != y[j]:
                return False
        for i, j in split:
            if x[i] != y[j]:
                return False
        return True

    return check


def matches(q: Query, a: Fact, b: Fact) -> bool:
    """D |= q(ab): one assignment sends A to ``a`` and B to ``b``."""
    return pair_checker(q)(a, b)


def matches_atom(c: Atom, a: Fact) -> bool:
    if c.sig.relation != a.sig.relation:
        return False
    seen: dict[str, object] = {}
    for v, e in zip(c.vars, a.args):
        if seen.setdefault(v, e) != e:
            return False
    return True


def satisfies(q: Query, facts) -> bool:
    facts = list(facts)
    check = pair_checker(q)
    return any(check(a, b) for a in facts for b in facts)


def solutions(q: Query, facts) -> set[tuple[Fact, Fact]]:
    facts = list(facts)
    check = pair_checker(q)
    return {(a, b) for a in facts for b in facts if check(a, b)}


class SolutionGraph:
    """G(D,q): facts as vertices, directed solution pairs, undirected edges.

    Self-solutions are kept in ``directed`` and ``self_loops`` but never become
    undirected edges.
    """

    def __init__(self, db: Database, q: Query):
        self.db = db
        self.q = q
        self.facts = db.sorted_facts
        self.index = {f: i for i, f in enumerate(self.facts)}
        check = pair_checker(q)
        n = len(self.facts)
        self.directed: set[tuple[int, int]] = set()
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.self_loops: set[int] = set()
        # Facts whose relation cannot match either atom never take part.
        for i, a in enumerate(self.facts):
            for j, b in enumerate(self.facts):
                if check(a, b):
                    self.directed.add((i, j))
                    if i == j:
                        self.self_loops.add(i)
                    else:
                        self.adj[i].add(j)
                        self.adj[j].add(i)
        self.block_of = [db.block_index(f) for f in self.facts]

    def holds(self, a: Fact, b: Fact) -> bool:
        return (self.index[a], self.index[b]) in self.directed

    def edge(self, a: Fact, b: Fact) -> bool:
        return self.index[b] in self.adj[self.index[a]]

    def has_self(self, a: Fact) -> bool:
        return self.index[a] in self.self_loops

    @property
    def edges(self) -> set[frozenset]:
        return {frozenset((self.facts[i], self.facts[j])) for i, j in self.directed if i != j}

    def components(self) -> list[list[int]]:
        seen = [False] * len(self.facts)
        comps = []
        for s in range(len(self.facts)):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self.adj[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def is_quasi_clique(self, comp: list[int]) -> bool:
        for x in range(len(comp)):
            i = comp[x]
            for j in comp[x + 1 :]:
                if self.block_of[i] != self.block_of[j] and j not in self.adj[i]:
                    return False
        return True

    def clique_ids(self) -> list[int]:
        """Label per fact: its component if that is a quasi-clique, else itself."""
        labels = [-1] * len(self.facts)
        next_id = 0
        for comp in self.components():
            if self.is_quasi_clique(comp):
                for i in comp:
                    labels[i] = next_id
                next_id += 1
            else:
                for i in comp:
                    labels[i] = next_id
                    next_id += 1
        return labels


def solution_graph(db: Database, q: Query) -> SolutionGraph:
    return SolutionGraph(db, q)


def is_clique_database(db: Database, q: Query) -> bool:
    g = SolutionGraph(db, q)
    return all(g.is_quasi_clique(c) for c in g.components())


def zigzag_holds(db: Database, q: Query) -> bool:
    """q(ab) and q(cb') with a !~ c, a != b, b ~ b' must give q(ab')."""
    g = SolutionGraph(db, q)
    facts, bo = g.facts, g.block_of
    into: dict[int, list[int]] = {}
    for c, b2 in g.directed:
        into.setdefault(b2, []).append(c)
    for a, b in g.directed:
        if a == b:
            continue
        for b2 in db.blocks[bo[b]]:
            j = g.index[b2]
            if (a, j) in g.directed:
                continue
            if any(bo[c] != bo[a] for c in into.get(j, ())):
                return False
    return True


# ----------------------------------------------------------- branching / bg


def bg_rows(d: Fact, e: Fact, f: Fact) -> list[tuple[int, tuple]]:
    """Every row of the bg table that matches the triple, in table order.

    Row 5 (the fallback) is listed only when nothing else matched.
    """
    kd, ke, kf = d.key, e.key, f.key
    rows = []
    if kd <= ke and not kf <= ke:
        rows.append((1, d.key_tuple))
    if not kd <= ke and kf <= ke:
        rows.append((2, f.key_tuple))
    if kd <= kf <= ke:
        rows.append((3, d.key_tuple))
    if kf <= kd <= ke:
        rows.append((4, f.key_tuple))
    if not rows:
        rows.append((5, e.key_tuple))
    return rows


def bg_of_center(d: Fact, e: Fact, f: Fact) -> tuple:
    return bg_rows(d, e, f)[0][1]


@dataclass(frozen=True)
class BranchingInfo:
    e: Fact
    d: Fact
    f: Fact
    kind: str
    bg_tuple: tuple
    row: int
    overlap: bool

    @property
    def g_set(self) -> frozenset:
        return frozenset(self.bg_tuple)


def branching_info(db: Database, q: Query, e: Fact, graph: SolutionGraph | None = None) -> Optional[BranchingInfo]:
    """A witness that ``e`` is branching (q(de) and q(ef), d, e, f distinct)."""
    g = graph or SolutionGraph(db, q)
    ie = g.index[e]
    ds = sorted(i for i, j in g.directed if j == ie and i != ie)
    fs = sorted(j for i, j in g.directed if i == ie and j != ie)
    for i in ds:
        for j in fs:
            if i == j:
                continue
            d, f = g.facts[i], g.facts[j]
            rows = bg_rows(d, e, f)
            kind = "triangle" if (j, i) in g.directed else "fork"
            overlap = {r for r, _ in rows} >= {3, 4}
            return BranchingInfo(e, d, f, kind, rows[0][1], rows[0][0], overlap)
    return None


def bg(db: Database, q: Query, e: Fact) -> tuple:
    info = branching_info(db, q, e)
    return e.key_tuple if info is None else info.bg_tuple


# ------------------------------------------------------------------- export


def to_dot(db: Database, q: Query, name: str = "G") -> str:
    """Undirected solution edges, arrowheads for the direction(s) that hold,
    one cluster per block."""
    g = SolutionGraph(db, q)

    def node(i):
        return f'n{i}'

    lines = [f"graph {name} {{", "  node [shape=box, fontname=monospace];"]
    for b, blk in enumerate(db.blocks):
        lines.append(f"  subgraph cluster_{b} {{")
        lines.append('    style=rounded; label="";')
        for f in blk:
            i = g.index[f]
            extra = ", peripheries=2" if i in g.self_loops else ""
            lines.append(f'    {node(i)} [label="{f}"{extra}];')
        lines.append("  }")
    done = set()
    for i, j in sorted(g.directed):
        if i == j or (j, i) in done:
            continue
        done.add((i, j))
        both = (j, i) in g.directed
        dir_attr = "both" if both else "forward"
        lines.append(f"  {node(i)} -- {node(j)} [dir={dir_attr}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
