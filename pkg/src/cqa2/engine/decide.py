"""The front door: pick and run the right decider for a query class."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..model import Database, Fact, Repair
from ..query import Atom, Classification, Query, TripathStatus, Verdict, classify
from ..solutions import matches_atom, pair_checker
from ..tripath import SearchBudget
from .fixpoint import DeltaBudgetExceeded, DeltaTable, delta_k, paper_k
from .matching import matching_report, matching_repair
from .oracle import DEFAULT_NODE_LIMIT, DEFAULT_REPAIR_CAP, falsifies, oracle_certain, search_falsifying
from .result import Answer, CertaintyResult

METHODS = ("auto", "oracle", "search", "cqk", "matching", "combined", "trivial")


@dataclass
class EngineConfig:
    method: str = "auto"
    k: Optional[int] = None  # fixed k; otherwise iterate 2..k_cap
    k_cap: int = 4
    repair_cap: int = DEFAULT_REPAIR_CAP
    node_limit: int = DEFAULT_NODE_LIMIT
    tripath_budget: Optional[SearchBudget] = None
    classification: Optional[Classification] = None
    delta_options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.k_cap < 1 or self.repair_cap < 1 or self.node_limit < 1:
            raise ValueError("caps must be positive")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be at least 1")


class _Clock:
    def __init__(self):
        self.ms: dict[str, float] = {}

    def run(self, name: str, fn: Callable, *args, **kw):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kw)
        finally:
            self.ms[name] = self.ms.get(name, 0.0) + (time.perf_counter() - t0) * 1000


# ------------------------------------------------------------ simple deciders


def trivial_certain(db: Database, c: Atom) -> CertaintyResult:
    """Certainty of the single atom ``c``: some block must match it entirely."""
    for b, blk in enumerate(db.blocks):
        if all(matches_atom(c, f) for f in blk):
            return CertaintyResult(Answer.CERTAIN, "trivial", evidence={"block": b, "atom": str(c)})
    choice = tuple(next(i for i, f in enumerate(blk) if not matches_atom(c, f)) for blk in db.blocks)
    return CertaintyResult(Answer.NOT_CERTAIN, "trivial", Repair(db, choice), evidence={"atom": str(c)})


def q_connected_partition(db: Database, q: Query) -> list[Database]:
    """Blocks grouped by the equivalence generated by "some facts of the two
    blocks form a solution", each group as its own database, in block order."""
    m = len(db.blocks)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    check = pair_checker(q)
    facts = db.sorted_facts
    bo = [b for b, blk in enumerate(db.blocks) for _ in blk]
    for i, a in enumerate(facts):
        for j in range(i + 1, len(facts)):
            if bo[i] != bo[j] and find(bo[i]) != find(bo[j]):
                b = facts[j]
                if check(a, b) or check(b, a):
                    ri, rj = find(bo[i]), find(bo[j])
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[Fact]] = {}
    for b, blk in enumerate(db.blocks):
        groups.setdefault(find(b), []).extend(blk)
    return [db.restrict(groups[r]) for r in sorted(groups)]


def _lift(db: Database, parts: list[tuple[Database, Repair]]) -> Repair:
    """Glue per-component repairs into a repair of ``db``."""
    pos = {}
    for _, r in parts:
        for f in r.facts:
            b = db.block_index(f)
            pos[b] = db.blocks[b].index(f)
    return Repair(db, tuple(pos[b] for b in range(len(db.blocks))))


# ------------------------------------------------------------- per component


class _Part:
    """Sound tests and falsifier search on one database."""

    def __init__(self, db: Database, q: Query, cfg: EngineConfig, clock: _Clock):
        self.db, self.q, self.cfg, self.clock = db, q, cfg, clock
        self.table: Optional[DeltaTable] = None
        self.notes: dict = {}

    def cqk(self, ks) -> Optional[int]:
        """First k in ``ks`` for which Cqk holds, keeping the last full table.
        Values beyond the number of blocks add nothing and are skipped."""
        m = max(len(self.db.blocks), 1)
        for n, k in enumerate(ks):
            if n and k > m:
                break
            try:
                tab = self.clock.run("cqk", delta_k, self.db, self.q, k, stop_on_empty=True, **self.cfg.delta_options)
            except DeltaBudgetExceeded as exc:
                self.notes["cqk_guard"] = f"k={k}: {exc}"
                return None
            if tab.contains_empty:
                return k
            self.table = tab
        return None

    def not_matching(self) -> bool:
        rep = self.clock.run("matching", matching_report, self.db, self.q)
        self.notes["matching"] = rep.to_json()
        return not rep.saturated

    def oracle(self) -> CertaintyResult:
        return self.clock.run("oracle", oracle_certain, self.db, self.q, self.cfg.repair_cap)

    def falsify(self) -> tuple[int, Optional[Repair]]:
        """Exact search, pruned by the last fixpoint table when there is one:
        facts u with {u} derived and pairs derived cannot appear together in
        a falsifying repair."""
        banned, conflicts = (), ()
        if self.table is not None:
            banned = self.table.singletons()
            conflicts = self.table.pairs()
        return self.clock.run(
            "search", search_falsifying, self.db, self.q, self.cfg.node_limit, banned, conflicts
        )

    def matching_falsifier(self) -> Optional[Repair]:
        r = self.clock.run("matching", matching_repair, self.db, self.q)
        if r is not None and falsifies(self.q, r):
            return r
        return None


def _ks(cfg: EngineConfig, upper: Optional[int] = None) -> range:
    if cfg.k is not None:
        return range(cfg.k, cfg.k + 1)
    top = cfg.k_cap if upper is None else min(cfg.k_cap, upper)
    return range(2, max(top, 2) + 1)


def _settle(part: _Part, label: str, k: Optional[int] = None, matching_first: bool = False) -> CertaintyResult:
    """Negative sound tests: find a falsifying repair or prove there is none."""
    ev = dict(part.notes)
    if matching_first:
        r = part.matching_falsifier()
        if r is not None:
            return CertaintyResult(Answer.NOT_CERTAIN, label, r, k_used=k, evidence={**ev, "falsifier": "matching"})
    status, r = part.falsify()
    if status == 1:
        return CertaintyResult(Answer.NOT_CERTAIN, label, r, k_used=k, evidence={**ev, "falsifier": "search"})
    if status == 0:
        return CertaintyResult(Answer.CERTAIN, "search", k_used=k, evidence=ev)
    return CertaintyResult(Answer.UNKNOWN, label, k_used=k, evidence={**ev, "node_limit": part.cfg.node_limit})


def _decide_part(db: Database, q: Query, cls: Classification, cfg: EngineConfig, clock: _Clock) -> CertaintyResult:
    part = _Part(db, q, cfg, clock)
    v = cls.verdict
    if v is Verdict.PTIME_CERT2:
        k = part.cqk([2] if cfg.k is None else [cfg.k])
        if k is not None:
            return CertaintyResult(Answer.CERTAIN, "cert2", k_used=k)
        return _settle(part, "cert2", 2)
    if v is Verdict.TWO_WAY_DETERMINED and cls.status is TripathStatus.NONE_FOUND:
        k = part.cqk(_ks(cfg, paper_k(q.sig.key_len)))
        if k is not None:
            return CertaintyResult(Answer.CERTAIN, "cqk", k_used=k)
        return _settle(part, "cqk", max(_ks(cfg)))
    if v is Verdict.TWO_WAY_DETERMINED and cls.status is TripathStatus.TRIANGLE_ONLY:
        if part.not_matching():
            return CertaintyResult(Answer.CERTAIN, "not-matching", evidence=dict(part.notes))
        k = part.cqk(_ks(cfg))
        if k is not None:
            return CertaintyResult(Answer.CERTAIN, "cqk", k_used=k, evidence=dict(part.notes))
        return _settle(part, "combined", max(_ks(cfg)), matching_first=True)
    # coNP-complete classes: cheap sound tests, then the oracle, then search
    if part.not_matching():
        return CertaintyResult(Answer.CERTAIN, "not-matching", evidence=dict(part.notes))
    k = part.cqk(_ks(cfg))
    if k is not None:
        return CertaintyResult(Answer.CERTAIN, "cqk", k_used=k, evidence=dict(part.notes))
    res = part.oracle()
    if res.answer is not Answer.UNKNOWN:
        res.evidence.update(part.notes)
        return res
    return _settle(part, "oracle")


def _decide_explicit(db: Database, q: Query, cfg: EngineConfig, clock: _Clock) -> CertaintyResult:
    part = _Part(db, q, cfg, clock)
    m = cfg.method
    if m == "oracle":
        return part.oracle()
    if m == "search":
        return _settle(part, "search")
    if m == "trivial":
        c = cfg.classification.reduced_atom if cfg.classification else None
        if c is None:
            raise ValueError("method 'trivial' needs a query that reduces to one atom")
        return trivial_certain(db, c)
    if m == "cqk":
        k = part.cqk(_ks(cfg))
        if k is not None:
            return CertaintyResult(Answer.CERTAIN, "cqk", k_used=k)
        return _settle(part, "cqk", max(_ks(cfg)))
    if m == "matching":
        if part.not_matching():
            return CertaintyResult(Answer.CERTAIN, "not-matching", evidence=dict(part.notes))
        return _settle(part, "matching", matching_first=True)
    # combined
    if part.not_matching():
        return CertaintyResult(Answer.CERTAIN, "not-matching", evidence=dict(part.notes))
    k = part.cqk(_ks(cfg))
    if k is not None:
        return CertaintyResult(Answer.CERTAIN, "cqk", k_used=k, evidence=dict(part.notes))
    return _settle(part, "combined", max(_ks(cfg)), matching_first=True)


def decide_certain(db: Database, q: Query, config: Optional[EngineConfig] = None, **overrides) -> CertaintyResult:
    """Decide whether every repair of ``db`` satisfies ``q``.

    ``auto`` classifies the query and works per q-connected component: the
    database is certain iff some component is, and a falsifying repair is the
    union of per-component ones. A not-certain answer always carries a
    repair that has been checked against ``q``.
    """
    cfg = config or EngineConfig(**overrides)
    if config is not None and overrides:
        raise TypeError("pass either a config or keyword overrides, not both")
    clock = _Clock()
    t0 = time.perf_counter()
    if cfg.method == "auto" or cfg.method == "trivial":
        cls = cfg.classification or clock.run("classify", classify, q, cfg.tripath_budget)
        cfg.classification = cls
    if cfg.method != "auto":
        res = _decide_explicit(db, q, cfg, clock)
    elif cls.verdict is Verdict.TRIVIAL:
        res = trivial_certain(db, cls.reduced_atom)
    else:
        parts = clock.run("partition", q_connected_partition, db, q)
        results = []
        res = None
        for i, p in enumerate(parts):
            r = _decide_part(p, q, cls, cfg, clock)
            if r.answer is Answer.CERTAIN:
                r.evidence["certain_component"] = i
                res = r
                break
            results.append((p, r))
        if res is None:
            if all(r.answer is Answer.NOT_CERTAIN for _, r in results):
                repair = _lift(db, [(p, r.falsifying_repair) for p, r in results])
                how = sorted({r.evidence.get("falsifier", r.method) for _, r in results})
                ks = [r.k_used for _, r in results if r.k_used is not None]
                res = CertaintyResult(
                    Answer.NOT_CERTAIN, _pipeline_label(cls), repair,
                    k_used=max(ks) if ks else None, evidence={"falsifier": how},
                )
            else:
                res = CertaintyResult(Answer.UNKNOWN, _pipeline_label(cls), evidence={
                    "undecided_components": [i for i, (_, r) in enumerate(results) if r.answer is Answer.UNKNOWN]
                })
        res.components = len(parts)
    if res.answer is Answer.NOT_CERTAIN and not falsifies(q, res.falsifying_repair):
        raise AssertionError("internal error: the reported falsifying repair satisfies the query")
    clock.ms["total"] = (time.perf_counter() - t0) * 1000
    res.timings_ms = clock.ms
    return res


def _pipeline_label(cls: Classification) -> str:
    if cls.verdict is Verdict.PTIME_CERT2:
        return "cert2"
    if cls.verdict is Verdict.TWO_WAY_DETERMINED and cls.status is TripathStatus.NONE_FOUND:
        return "cqk"
    if cls.verdict is Verdict.TWO_WAY_DETERMINED and cls.status is TripathStatus.TRIANGLE_ONLY:
        return "combined"
    return "oracle"
