"""Tripaths: verification, niceness, extraction from a database, and a bounded
existence search over the query alone.

The existence search builds tripaths symbolically. Every fact is a row of
slots, slots are merged by a union-find, and a tree skeleton plus a choice of
solution orientations determines the most general instance. All the negative
requirements of a tripath (distinct blocks are not key-equal, the center is a
fork, g(e) escapes the root and leaf keys, no extra solutions, ...) can only
be destroyed by further merging, so checking them on the most general instance
is both sound and complete for that skeleton. The one requirement that is not
of this shape, which row of the bg table applies, is fixed up front by
guessing the four key inclusions between d, e and f and enforcing the guess.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .model import Database, Fact, Symbol, serialize_database
from .query import Query
from .solutions import SolutionGraph, _pattern, bg_rows, pair_checker


class TripathSearchCapExceeded(RuntimeError):
    """``find_tripath_in`` ran out of its node budget; the answer is unknown."""


@dataclass(frozen=True)
class TreeBlock:
    """One block of a tripath: ``a`` is absent for leaves, ``b`` for the root."""

    a: Optional[Fact]
    b: Optional[Fact]
    parent: Optional[int]

    @property
    def facts(self) -> tuple:
        return tuple(f for f in (self.a, self.b) if f is not None)


@dataclass(frozen=True)
class TripathCandidate:
    blocks: tuple

    @property
    def database(self) -> Database:
        return Database(f for blk in self.blocks for f in blk.facts)


@dataclass(frozen=True)
class TripathProblem:
    """Why a candidate is not a tripath. ``kind`` is ``malformed`` for tree
    shape errors and ``condition`` for a failed tripath requirement."""

    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class Tripath:
    blocks: tuple
    root: int
    branching: int
    leaves: tuple  # (leaf below d, leaf below f)
    d: Fact
    e: Fact
    f: Fact
    kind: str
    g: tuple
    row: int
    overlap: bool

    @property
    def database(self) -> Database:
        return Database(self.facts)

    @property
    def facts(self) -> list:
        return [f for blk in self.blocks for f in blk.facts]

    @property
    def u0(self) -> Fact:
        return self.blocks[self.root].a

    @property
    def u1(self) -> Fact:
        return self.blocks[self.leaves[0]].b

    @property
    def u2(self) -> Fact:
        return self.blocks[self.leaves[1]].b

    @property
    def candidate(self) -> TripathCandidate:
        return TripathCandidate(self.blocks)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "blocks": [
                {"a": str(b.a) if b.a else None, "b": str(b.b) if b.b else None, "parent": b.parent}
                for b in self.blocks
            ],
            "root": self.root,
            "branching": self.branching,
            "leaves": list(self.leaves),
            "center": {"d": str(self.d), "e": str(self.e), "f": str(self.f)},
            "g": [str(x) for x in self.g],
            "bg_row": self.row,
        }


@dataclass(frozen=True)
class NiceWitness:
    x: object
    y: object
    z: object
    u_root: object
    u_leaf1: object
    u_leaf2: object

    def to_json(self) -> dict:
        return {k: str(v) for k, v in self.__dict__.items()}


# ------------------------------------------------------------- verification


def _tree_shape(blocks) -> tuple[int, list, list, int]:
    """(root, children lists, leaves, branching block) or a malformed problem."""
    n = len(blocks)
    roots = [i for i, b in enumerate(blocks) if b.parent is None]
    if len(roots) != 1:
        raise _Bad("malformed", f"expected one root block, found {len(roots)}")
    children: list[list[int]] = [[] for _ in range(n)]
    for i, b in enumerate(blocks):
        if b.parent is not None:
            if not 0 <= b.parent < n or b.parent == i:
                raise _Bad("malformed", f"block {i} has invalid parent {b.parent}")
            children[b.parent].append(i)
    root = roots[0]
    seen, stack = {root}, [root]
    while stack:
        for c in children[stack.pop()]:
            if c in seen:
                raise _Bad("malformed", "parent map has a cycle")
            seen.add(c)
            stack.append(c)
    if len(seen) != n:
        raise _Bad("malformed", "parent map has a cycle or an unreachable block")
    leaves = [i for i in range(n) if not children[i]]
    if len(leaves) != 2:
        raise _Bad("malformed", f"expected exactly two leaf blocks, found {len(leaves)}")
    branching = [i for i in range(n) if len(children[i]) == 2]
    if len(branching) != 1 or any(len(c) > 2 for c in children):
        raise _Bad("malformed", "expected exactly one block with two children")
    return root, children, leaves, branching[0]


class _Bad(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.problem = TripathProblem(kind, message)


def _leaf_below(children, start: int) -> int:
    while children[start]:
        start = children[start][0]
    return start


def _check(q: Query, cand: TripathCandidate, strict: bool) -> Tripath:
    blocks = tuple(cand.blocks)
    root, children, leaves, br = _tree_shape(blocks)
    for i, blk in enumerate(blocks):
        if i == root and (blk.a is None or blk.b is not None):
            raise _Bad("malformed", "the root block must hold exactly a(B)")
        if i != root and not children[i] and (blk.b is None or blk.a is not None):
            raise _Bad("malformed", f"leaf block {i} must hold exactly b(B)")
        if i != root and children[i] and (blk.a is None or blk.b is None):
            raise _Bad("malformed", f"internal block {i} must hold a(B) and b(B)")
        for fct in blk.facts:
            if fct.sig != q.sig:
                raise _Bad("malformed", f"{fct} does not use the query signature")
        if blk.a is not None and blk.b is not None:
            if blk.a == blk.b:
                raise _Bad("condition", f"block {i} repeats the fact {blk.a}")
            if blk.a.key_tuple != blk.b.key_tuple:
                raise _Bad("condition", f"{blk.a} and {blk.b} are not key-equal")
    keys = [blk.facts[0].key_tuple for blk in blocks]
    if len(set(keys)) != len(keys):
        raise _Bad("condition", "two tree blocks share a key, so they are one block")

    check = pair_checker(q)
    for i, blk in enumerate(blocks):
        if blk.parent is None:
            continue
        a, b = blocks[blk.parent].a, blk.b
        if not (check(a, b) or check(b, a)):
            raise _Bad("condition", f"missing solution between {a} and {b}")

    e = blocks[br].a
    c1, c2 = children[br]
    for cd, cf in ((c1, c2), (c2, c1)):
        d, f = blocks[cd].b, blocks[cf].b
        if check(d, e) and check(e, f):
            break
    else:
        raise _Bad("condition", f"{e} is not branching with the b-facts of its children")
    leaf_d, leaf_f = _leaf_below(children, cd), _leaf_below(children, cf)
    rows = bg_rows(d, e, f)
    us = (blocks[root].a, blocks[leaf_d].b, blocks[leaf_f].b)
    tuples = [t for _, t in rows] if strict else [rows[0][1]]
    for g in tuples:
        for u in us:
            if frozenset(g) <= u.key:
                raise _Bad("condition", f"g(e) = {{{','.join(map(str, g))}}} is contained in key({u})")
    kind = "triangle" if check(f, d) else "fork"
    overlap = {r for r, _ in rows} >= {3, 4}
    return Tripath(blocks, root, br, (leaf_d, leaf_f), d, e, f, kind, rows[0][1], rows[0][0], overlap)


def tripath_problem(q: Query, cand: TripathCandidate, strict: bool = False) -> Optional[TripathProblem]:
    try:
        _check(q, cand, strict)
    except _Bad as exc:
        return exc.problem
    return None


def verify_tripath(q: Query, cand: TripathCandidate, strict: bool = False) -> Optional[Tripath]:
    """The validated tripath, or None (see ``tripath_problem`` for the reason).

    ``strict`` also demands the g-conditions under every matching bg row,
    which only differs when rows 3 and 4 both apply.
    """
    try:
        return _check(q, cand, strict)
    except _Bad:
        return None


# ------------------------------------------------------------------ niceness


def _allowed_pairs(tp: Tripath) -> set:
    allowed = {frozenset((tp.blocks[b.parent].a, b.b)) for b in tp.blocks if b.parent is not None}
    allowed.add(frozenset((tp.f, tp.d)))
    return allowed


def _nice(q: Query, tp: Tripath) -> tuple[Optional[NiceWitness], Optional[str]]:
    check = pair_checker(q)
    facts = tp.facts
    allowed = _allowed_pairs(tp)
    for a in facts:
        for b in facts:
            if check(a, b) and frozenset((a, b)) not in allowed:
                return None, f"extra solution q({a}, {b})"
    us = (tp.u0, tp.u1, tp.u2)
    outer = tp.u0.key | tp.u1.key | tp.u2.key
    inner = [fct for fct in facts if fct not in us]
    var_nice = False
    chosen = None
    for x, y, z in itertools.product(sorted(tp.d.key), sorted(tp.e.key), sorted(tp.f.key)):
        if {x, y, z} & outer:
            continue
        var_nice = True
        if all(fct.key & {x, y, z} for fct in inner):
            chosen = (x, y, z)
            break
    if not var_nice:
        return None, "not variable-nice: every choice of x, y, z meets a root or leaf key"
    if chosen is None:
        return None, "no choice of x, y, z covers the key of every inner fact"
    own = []
    for u in us:
        others = set().union(*(fct.key for fct in facts if fct != u))
        spare = sorted(u.key - others)
        if not spare:
            return None, f"key({u}) has no element of its own"
        own.append(spare[0])
    return NiceWitness(*chosen, *own), None


def check_nice(q: Query, tp: Tripath) -> Optional[NiceWitness]:
    """A witness that ``tp`` is nice, or None. Only parent/child pairs
    {a(parent), b(child)} and {f, d} may be solutions."""
    return _nice(q, tp)[0]


def why_not_nice(q: Query, tp: Tripath) -> Optional[str]:
    return _nice(q, tp)[1]


# ------------------------------------------------- extraction from a database


def find_tripath_in(db: Database, q: Query, kind: Optional[str] = None, cap: int = 200_000) -> Optional[Tripath]:
    """A tripath contained in ``db``, searched exhaustively up to ``cap`` nodes.

    Raises ``TripathSearchCapExceeded`` when the budget runs out before the
    search space is covered.
    """
    if len(db.blocks) < 4:
        return None
    g = SolutionGraph(db, q)
    facts, bo = g.facts, g.block_of
    idx = g.index
    succ: list[list[int]] = [[] for _ in facts]
    for i, j in sorted(g.directed):
        succ[i].append(j)
    nodes = 0

    def tick():
        nonlocal nodes
        nodes += 1
        if nodes > cap:
            raise TripathSearchCapExceeded(f"more than {cap} search nodes")

    def mates(i):
        return [idx[x] for x in db.blocks[bo[i]] if idx[x] != i]

    def neighbours(i, used):
        return [j for j in sorted(g.adj[i]) if bo[j] not in used]

    for ie in range(len(facts)):
        for id_ in sorted(i for i, j in g.directed if j == ie and i != ie):
            for if_ in succ[ie]:
                if len({bo[ie], bo[id_], bo[if_]}) < 3:
                    continue
                d, e, f = facts[id_], facts[ie], facts[if_]
                is_tri = (if_, id_) in g.directed
                if kind is not None and kind != ("triangle" if is_tri else "fork"):
                    continue
                gset = frozenset(bg_rows(d, e, f)[0][1])
                for ie2 in mates(ie):
                    tick()
                    found = _extract(q, facts, bo, neighbours, mates, tick, gset, ie, ie2, id_, if_)
                    if found is not None:
                        return found
    return None


def _extract(q, facts, bo, neighbours, mates, tick, gset, ie, ie2, id_, if_):
    """Grow the three arms around a fixed center inside the database."""

    def arms_up(top, used, chain):
        # chain: list of (a, b) index pairs from the branching block upwards
        for a in neighbours(top, used):
            tick()
            if not gset <= facts[a].key:
                yield chain + [(a, None)], used | {bo[a]}
            for b in mates(a):
                yield from arms_up(b, used | {bo[a]}, chain + [(a, b)])

    def arms_down(bottom, used, chain):
        # chain: list of (a, b) pairs from the child of the branching block down
        if not gset <= facts[bottom].key:
            yield chain[:-1] + [(None, bottom)], used
        for a in mates(bottom):
            for b in neighbours(a, used):
                tick()
                yield from arms_down(b, used | {bo[b]}, chain[:-1] + [(a, bottom), (None, b)])

    used0 = {bo[ie], bo[id_], bo[if_]}
    for up, u1 in arms_up(ie2, used0, []):
        for down_d, u2 in arms_down(id_, u1, [(None, id_)]):
            for down_f, _ in arms_down(if_, u2, [(None, if_)]):
                cand = _assemble(facts, ie, ie2, up, down_d, down_f)
                tp = verify_tripath(q, cand)
                if tp is not None:
                    return tp
    return None


def _assemble(facts, ie, ie2, up, down_d, down_f) -> TripathCandidate:
    F = lambda i: None if i is None else facts[i]  # noqa: E731
    blocks = [TreeBlock(F(ie), F(ie2), None)]
    prev = 0
    for a, b in up:
        blocks.append(TreeBlock(F(a), F(b), None))
        blocks[prev] = TreeBlock(blocks[prev].a, blocks[prev].b, len(blocks) - 1)
        prev = len(blocks) - 1
    for arm in (down_d, down_f):
        par = 0
        for a, b in arm:
            blocks.append(TreeBlock(F(a), F(b), par))
            par = len(blocks) - 1
    return TripathCandidate(tuple(blocks))


# ------------------------------------------------------ query-level search


class SearchStatus(str, enum.Enum):
    FOUND = "found"
    NONE_WITHIN_BUDGET = "none-within-budget"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class SearchBudget:
    max_blocks: int = 9
    max_domain: Optional[int] = None
    node_limit: int = 400_000

    @classmethod
    def default(cls, q: Query) -> "SearchBudget":
        return cls(max_domain=2 * q.sig.arity * 9)

    def domain_for(self, q: Query) -> int:
        return self.max_domain if self.max_domain is not None else 2 * q.sig.arity * self.max_blocks


@dataclass
class SearchResult:
    status: SearchStatus
    tripath: Optional[Tripath] = None
    witness: Optional[NiceWitness] = None
    truncated: bool = False
    nodes: int = 0
    centers: int = 0
    notes: list = field(default_factory=list)


class _NodeLimit(Exception):
    pass


# Fact ids of the center in every symbolic state.
_E, _E2, _D, _F = 0, 1, 2, 3


class _State:
    """A symbolic tripath under construction."""

    __slots__ = ("parent", "nfacts", "blocks", "hyp", "kind", "us", "allowed")

    def copy(self) -> "_State":
        s = _State.__new__(_State)
        s.parent = self.parent[:]
        s.nfacts = self.nfacts
        s.blocks = [b[:] for b in self.blocks]
        s.hyp = self.hyp
        s.kind = self.kind
        s.us = dict(self.us)
        s.allowed = self.allowed[:]
        return s


def _find(p: list, i: int) -> int:
    while p[i] != i:
        p[i] = p[p[i]]
        i = p[i]
    return i


def _union(p: list, i: int, j: int) -> None:
    ri, rj = _find(p, i), _find(p, j)
    if ri != rj:
        if ri < rj:
            p[rj] = ri
        else:
            p[ri] = rj


class _Searcher:
    def __init__(self, q: Query, budget: SearchBudget, kinds: tuple, require_nice: bool, strict: bool):
        self.q = q
        self.k = q.sig.arity
        self.l = q.sig.key_len
        self.eqs = _pattern(q)
        self.budget = budget
        self.domain = budget.domain_for(q)
        self.kinds = kinds
        self.require_nice = require_nice
        self.strict = strict
        self.nodes = 0
        self.truncated = False

    # -- primitive steps

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.node_limit:
            raise _NodeLimit

    def new_fact(self, st: _State) -> int:
        fid = st.nfacts
        base = len(st.parent)
        st.parent.extend(range(base, base + self.k))
        st.nfacts += 1
        return fid

    def slot(self, fid: int, pos: int) -> int:
        return fid * self.k + pos

    def add_solution(self, st: _State, a: int, b: int) -> None:
        """Enforce q(a, b)."""
        k = self.k
        for i, j in self.eqs:
            si = self.slot(a, i) if i < k else self.slot(b, i - k)
            sj = self.slot(a, j) if j < k else self.slot(b, j - k)
            _union(st.parent, si, sj)

    def add_mate(self, st: _State, src: int) -> int:
        fid = self.new_fact(st)
        for p in range(self.l):
            _union(st.parent, self.slot(fid, p), self.slot(src, p))
        return fid

    # -- evaluation on class vectors

    def classes(self, st: _State) -> list:
        p = st.parent
        return [_find(p, i) for i in range(len(p))]

    def key_of(self, cls, fid) -> tuple:
        b = fid * self.k
        return tuple(cls[b : b + self.l])

    def row_of(self, cls, fid) -> tuple:
        b = fid * self.k
        return tuple(cls[b : b + self.k])

    def sol(self, cls, a: int, b: int) -> bool:
        k = self.k
        ba, bb = a * k, b * k
        for i, j in self.eqs:
            ci = cls[ba + i] if i < k else cls[bb + i - k]
            cj = cls[ba + j] if j < k else cls[bb + j - k]
            if ci != cj:
                return False
        return True

    def g_tuples(self, st: _State, cls) -> list:
        i_de, i_fe, i_df, i_fd = st.hyp
        rows = []
        if i_de and not i_fe:
            rows.append(_D)
        if not i_de and i_fe:
            rows.append(_F)
        if i_df and i_fe:
            rows.append(_D)
        if i_fd and i_de:
            rows.append(_F)
        if not rows:
            rows.append(_E)
        src = rows if self.strict else rows[:1]
        return [self.key_of(cls, s) for s in src]

    def ok(self, st: _State) -> bool:
        cls = self.classes(st)
        keys = [self.key_of(cls, blk[0] if blk[0] is not None else blk[1]) for blk in st.blocks]
        if len(set(keys)) != len(keys):
            return False
        for a, b, _ in st.blocks:
            if a is not None and b is not None and self.row_of(cls, a) == self.row_of(cls, b):
                return False
        kd, ke, kf = (set(self.key_of(cls, x)) for x in (_D, _E, _F))
        truth = (kd <= ke, kf <= ke, kd <= kf, kf <= kd)
        for want, have in zip(st.hyp, truth):
            if not want and have:
                return False
        if st.kind == "fork" and self.sol(cls, _F, _D):
            return False
        if st.us:
            gs = self.g_tuples(st, cls)
            for u in st.us.values():
                ku = set(self.key_of(cls, u))
                if any(set(g) <= ku for g in gs):
                    return False
        if self.require_nice:
            allowed = set(st.allowed)
            for a in range(st.nfacts):
                for b in range(st.nfacts):
                    if (a == b or frozenset((a, b)) not in allowed) and self.sol(cls, a, b):
                        return False
        return True

    # -- center states

    def centers(self) -> list:
        out, seen = [], set()
        for kind in self.kinds:
            for hyp in itertools.product((True, False), repeat=4):
                for st in self._center_variants(kind, hyp):
                    sig = (kind, hyp, tuple(self.classes(st)))
                    if sig not in seen and self.ok(st):
                        seen.add(sig)
                        out.append(st)
        return out

    def _center_variants(self, kind: str, hyp: tuple) -> Iterator[_State]:
        st = _State()
        st.parent, st.nfacts, st.hyp, st.kind, st.us = [], 0, hyp, kind, {}
        for _ in range(4):
            self.new_fact(st)
        for p in range(self.l):
            _union(st.parent, self.slot(_E, p), self.slot(_E2, p))
        self.add_solution(st, _D, _E)
        self.add_solution(st, _E, _F)
        if kind == "triangle":
            self.add_solution(st, _F, _D)
        # blocks: [a, b, parent]; the branching block's parent is set by the up arm
        st.blocks = [[_E, _E2, None], [None, _D, 0], [None, _F, 0]]
        st.allowed = [frozenset((_D, _E)), frozenset((_E, _F)), frozenset((_F, _D))]
        incl = [(_D, _E), (_F, _E), (_D, _F), (_F, _D)]
        wanted = [pair for pair, h in zip(incl, hyp) if h]
        yield from self._include(st, wanted)

    def _include(self, st: _State, wanted: list) -> Iterator[_State]:
        """Every most general way to make key(src) a subset of key(dst) for
        each (src, dst) in ``wanted``: each missing element class is merged
        with some class of key(dst), one at a time."""
        if not wanted:
            yield st
            return
        src, dst = wanted[0]
        cls = self.classes(st)
        targets = sorted(set(self.key_of(cls, dst)))
        missing = [c for c in dict.fromkeys(self.key_of(cls, src)) if c not in targets]
        if not missing:
            yield from self._include(st, wanted[1:])
            return
        for t in targets:
            self.tick()
            s = st.copy()
            _union(s.parent, missing[0], t)
            if self.ok(s):
                yield from self._include(s, wanted)

    # -- arms

    def run(self, n_blocks: int, center: _State) -> Iterator[_State]:
        yield from self._up(center, _E2, 0, n_blocks)

    def _up(self, st: _State, top: int, top_block: int, n: int) -> Iterator[_State]:
        # at least one block below must still fit: the two child blocks exist already
        if len(st.blocks) + 1 > n:
            return
        for a_first in (True, False):
            self.tick()
            s = st.copy()
            a = self.new_fact(s)
            if a_first:
                self.add_solution(s, a, top)
            else:
                self.add_solution(s, top, a)
            s.blocks.append([a, None, None])
            nb = len(s.blocks) - 1
            s.blocks[top_block][2] = nb
            s.allowed.append(frozenset((a, top)))
            if not self.ok(s):
                continue
            root = s.copy()
            root.us["u0"] = a
            if self.ok(root):
                yield from self._down(root, _D, 1, "u1", n)
            if len(s.blocks) + 1 <= n:
                self.tick()
                b = self.add_mate(s, a)
                s.blocks[nb][1] = b
                if self.ok(s):
                    yield from self._up(s, b, nb, n)

    def _down(self, st: _State, bottom: int, bottom_block: int, leaf: str, n: int) -> Iterator[_State]:
        leafy = st.copy()
        leafy.us[leaf] = bottom
        if self.ok(leafy):
            if leaf == "u1":
                yield from self._down(leafy, _F, 2, "u2", n)
            elif len(leafy.blocks) == n:
                yield leafy
        if len(st.blocks) + 1 > n:
            return
        base = st.copy()
        self.tick()
        a = self.add_mate(base, bottom)
        base.blocks[bottom_block][0] = a
        if not self.ok(base):
            return
        for a_first in (True, False):
            self.tick()
            s = base.copy()
            b = self.new_fact(s)
            if a_first:
                self.add_solution(s, a, b)
            else:
                self.add_solution(s, b, a)
            s.blocks.append([None, b, bottom_block])
            s.allowed.append(frozenset((a, b)))
            if self.ok(s):
                yield from self._down(s, b, len(s.blocks) - 1, leaf, n)

    # -- niceness completion at a finished state

    def nice_completions(self, st: _State) -> Iterator[_State]:
        l = self.l
        for xi, yi, zi in itertools.product(range(l), repeat=3):
            picks = (self.slot(_D, xi), self.slot(_E, yi), self.slot(_F, zi))
            yield from self._nice_dfs(st, picks)

    def _nice_dfs(self, st: _State, picks: tuple) -> Iterator[_State]:
        cls = self.classes(st)
        us = set(st.us.values())
        outer = set()
        for u in us:
            outer.update(self.key_of(cls, u))
        xyz = {cls[s] for s in picks}
        if xyz & outer:
            return
        for u in us:
            others = set()
            for fid in range(st.nfacts):
                if fid != u:
                    others.update(self.key_of(cls, fid))
            if set(self.key_of(cls, u)) <= others:
                return
        lacking = next((fid for fid in range(st.nfacts) if fid not in us and not xyz & set(self.key_of(cls, fid))), None)
        if lacking is None:
            yield st
            return
        for p in range(self.l):
            for t in picks:
                self.tick()
                s = st.copy()
                _union(s.parent, self.slot(lacking, p), t)
                if self.ok(s):
                    yield from self._nice_dfs(s, picks)

    # -- instantiation

    def instantiate(self, st: _State) -> Optional[TripathCandidate]:
        cls = self.classes(st)
        names: dict[int, Symbol] = {}
        for c in cls:
            if c not in names:
                names[c] = Symbol(f"t{len(names)}")
        if len(names) > self.domain:
            self.truncated = True
            return None
        facts = [Fact(self.q.sig, tuple(names[c] for c in self.row_of(cls, fid))) for fid in range(st.nfacts)]
        F = lambda i: None if i is None else facts[i]  # noqa: E731
        return TripathCandidate(tuple(TreeBlock(F(a), F(b), p) for a, b, p in st.blocks))


def search_tripath(
    q: Query,
    budget: Optional[SearchBudget] = None,
    kind: Optional[str] = None,
    require_nice: bool = False,
    strict: bool = False,
) -> SearchResult:
    """Look for a tripath of ``q`` with at most ``budget.max_blocks`` blocks.

    Sizes are tried in increasing order, so a FOUND result is a smallest
    tripath of the requested kind. EXHAUSTED means no center d, e, f can be
    realised at all, which rules out tripaths of every size.
    """
    budget = budget or SearchBudget.default(q)
    kinds = ("fork", "triangle") if kind is None else (kind,)
    srch = _Searcher(q, budget, kinds, require_nice, strict)
    centers = srch.centers()
    if not centers:
        return SearchResult(SearchStatus.EXHAUSTED, centers=0, notes=["no center can be realised"])
    try:
        for n in range(4, budget.max_blocks + 1):
            for center in centers:
                for st in srch.run(n, center):
                    finals = srch.nice_completions(st) if require_nice else iter((st,))
                    for fin in finals:
                        cand = srch.instantiate(fin)
                        if cand is None:
                            continue
                        tp = verify_tripath(q, cand, strict=strict)
                        assert tp is not None, f"search produced an invalid tripath: {tripath_problem(q, cand)}"
                        assert tp.kind == fin.kind
                        wit = check_nice(q, tp)
                        if require_nice:
                            assert wit is not None, f"search produced a tripath that is not nice: {why_not_nice(q, tp)}"
                        return SearchResult(SearchStatus.FOUND, tp, wit, srch.truncated, srch.nodes, len(centers))
    except _NodeLimit:
        return SearchResult(SearchStatus.NONE_WITHIN_BUDGET, truncated=True, nodes=srch.nodes, centers=len(centers))
    return SearchResult(SearchStatus.NONE_WITHIN_BUDGET, truncated=srch.truncated, nodes=srch.nodes, centers=len(centers))


# ------------------------------------------------------------------- output


def tripath_to_text(tp: Tripath, witness: Optional[NiceWitness] = None) -> str:
    """Database text with the tree, designations and center as comments."""
    notes = [f"tripath kind={tp.kind} blocks={len(tp.blocks)} root={tp.root} branching={tp.branching}"]
    for i, b in enumerate(tp.blocks):
        notes.append(f"block {i}: parent={b.parent} a={b.a or '-'} b={b.b or '-'}")
    notes.append(f"center: d={tp.d} e={tp.e} f={tp.f}")
    notes.append(f"g(e)={{{','.join(map(str, dict.fromkeys(tp.g)))}}} (bg row {tp.row})")
    if witness is not None:
        w = witness
        notes.append(f"nice: x={w.x} y={w.y} z={w.z} u0={w.u_root} u1={w.u_leaf1} u2={w.u_leaf2}")
    facts = [f for b in tp.blocks for f in b.facts]
    return serialize_database(Database(facts), comments=notes)
