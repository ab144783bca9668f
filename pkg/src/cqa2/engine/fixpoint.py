"""The greedy fixpoint over k-sets and the Cqk test.

A k-set holds at most k facts, no two key-equal. The fixpoint starts from the
k-sets containing a solution and adds S whenever some block B has, for each
u in B, a member of the table inside S + {u}. Cqk holds when the empty set
is derived.

The table is upward closed (within k-sets), so only blocks disjoint from S
can fire, and "S + {u} has a subset in the table" reduces to S + {u} itself
when |S| < k, or to some S - {v} + {u} when |S| = k. Both implementations
below run a worklist with one counter per (S, block) and touch every
derivation once.
"""
from __future__ import annotations

import itertools
from collections import deque
from typing import Iterator, Optional

from .. import kernels
from ..model import Database, Fact
from ..query import Query
from ..solutions import pair_checker

DENSE_BYTES_LIMIT = 2**27
SPARSE_LIMIT = 400_000


class DeltaBudgetExceeded(RuntimeError):
    """The k-set family is too large for the configured resource guard."""


def paper_k(key_len: int) -> int:
    """The completeness threshold 2^(2*kappa+1) + kappa - 1 with kappa = l^l."""
    kappa = key_len**key_len
    return 2 ** (2 * kappa + 1) + kappa - 1


def count_ksets(sizes: list[int], k: int) -> int:
    """Number of sets with at most k facts from distinct blocks."""
    e = [1] + [0] * k
    for s in sizes:
        for j in range(k, 0, -1):
            e[j] += e[j - 1] * s
    return sum(e)


class DeltaTable:
    """Result of the fixpoint. Membership, justification and iteration take
    sets of facts; internally k-sets are either dense mixed-radix indices or
    frozensets of fact ids."""

    def __init__(self, db: Database, k: int, dense=None, sparse=None, complete: bool = True):
        self.db = db
        self.k = k
        self.facts = db.sorted_facts
        self._id = {f: i for i, f in enumerate(self.facts)}
        self._block = [b for b, blk in enumerate(db.blocks) for _ in blk]
        self._start = []
        pos = 0
        for blk in db.blocks:
            self._start.append(pos)
            pos += len(blk)
        self._stride = [1]
        for blk in db.blocks:
            self._stride.append(self._stride[-1] * (len(blk) + 1))
        self._dense = dense
        self._sparse = sparse
        # False when the computation stopped as soon as the empty set appeared.
        self.complete = complete

    @property
    def backend(self) -> str:
        return "dense" if self._dense is not None else "sparse"

    def _code(self, ids) -> Optional[int]:
        if self._dense is not None:
            idx = 0
            for i in ids:
                idx += (i - self._start[self._block[i]] + 1) * self._stride[self._block[i]]
            return self._dense[idx]
        return self._sparse.get(frozenset(ids), 0)

    def _ids(self, facts) -> Optional[list]:
        ids = []
        for f in facts:
            if f not in self._id:
                return None
            ids.append(self._id[f])
        if len({self._block[i] for i in ids}) != len(ids) or len(ids) > self.k:
            return None
        return ids

    def __contains__(self, facts) -> bool:
        ids = self._ids(facts)
        return ids is not None and self._code(ids) != 0

    def justification(self, facts) -> Optional[str]:
        ids = self._ids(facts)
        code = 0 if ids is None else self._code(ids)
        if code == 0:
            return None
        if code == 1:
            return "contains a solution"
        return f"block rule on block {code - 2} {self.db.block_ids[code - 2][1]}"

    @property
    def contains_empty(self) -> bool:
        return self._code([]) != 0

    def _entry_ids(self) -> Iterator[tuple]:
        if self._sparse is not None:
            for s, code in self._sparse.items():
                if code:
                    yield tuple(sorted(s))
            return
        sizes = [len(b) for b in self.db.blocks]
        for I, code in enumerate(self._dense):
            if not code:
                continue
            ids, rest = [], I
            for b, s in enumerate(sizes):
                rest, c = divmod(rest, s + 1)
                if c:
                    ids.append(self._start[b] + c - 1)
            yield tuple(ids)

    def entries(self) -> Iterator[frozenset]:
        for ids in self._entry_ids():
            yield frozenset(self.facts[i] for i in ids)

    def __len__(self) -> int:
        return sum(1 for _ in self._entry_ids())

    def singletons(self) -> set:
        return {self.facts[i] for i in range(len(self.facts)) if self._code([i])}

    def pairs(self) -> set:
        """Pairs {u, v} from different blocks that are in the table."""
        out = set()
        if self.k < 2:
            return out
        n = len(self.facts)
        for i in range(n):
            for j in range(i + 1, n):
                if self._block[i] != self._block[j] and self._code([i, j]):
                    out.add((self.facts[i], self.facts[j]))
        return out


def _solution_matrix(db: Database, q: Query) -> bytearray:
    facts = db.sorted_facts
    n = len(facts)
    check = pair_checker(q)
    sol = bytearray(n * n)
    for i, a in enumerate(facts):
        for j, b in enumerate(facts):
            if check(a, b):
                sol[i * n + j] = 1
    return sol


def _delta_sparse(sizes: list[int], k: int, sol: bytearray, stop_on_empty: bool) -> dict:
    m = len(sizes)
    n = sum(sizes)
    block, start = [], []
    for b, s in enumerate(sizes):
        start.append(len(block))
        block.extend([b] * s)
    reason: dict = {}
    work: deque = deque()

    def supersets(core: tuple) -> Iterator[frozenset]:
        used = {block[i] for i in core}
        free = [b for b in range(m) if b not in used]
        room = k - len(core)
        for r in range(0, min(room, len(free)) + 1):
            for bs in itertools.combinations(free, r):
                for pick in itertools.product(*(range(start[b], start[b] + sizes[b]) for b in bs)):
                    yield frozenset(core + pick)

    for i in range(n):
        for j in range(n):
            if not sol[i * n + j]:
                continue
            if i != j and block[i] == block[j]:
                continue
            core = (i,) if i == j else (i, j)
            if len(core) > k:
                continue
            for s in supersets(core):
                if s not in reason:
                    reason[s] = 1
                    work.append(s)

    cov: set = set()
    count: dict = {}

    def mark(S: frozenset, u: int, b: int) -> None:
        if S in reason or (S, u) in cov:
            return
        cov.add((S, u))
        key = (S, b)
        c = count.get(key, 0) + 1
        count[key] = c
        if c == sizes[b]:
            reason[S] = 2 + b
            work.append(S)

    empty = frozenset()
    while work:
        if stop_on_empty and empty in reason:
            break
        T = work.popleft()
        full = len(T) == k
        tblocks = {block[i] for i in T}
        for u in T:
            b = block[u]
            S0 = T - {u}
            mark(S0, u, b)
            if full:
                for v in range(n):
                    if block[v] not in tblocks:
                        mark(S0 | {v}, u, b)
    return reason


def delta_k(
    db: Database,
    q: Query,
    k: int,
    *,
    stop_on_empty: bool = False,
    backend: str = "auto",
    dense_bytes_limit: int = DENSE_BYTES_LIMIT,
    sparse_limit: int = SPARSE_LIMIT,
) -> DeltaTable:
    """Least fixpoint of the k-set rules. ``k`` larger than the number of
    blocks behaves exactly like the number of blocks.

    Raises ``DeltaBudgetExceeded`` when the chosen representation would
    exceed the resource guard.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    sizes = [len(b) for b in db.blocks]
    m, n = len(sizes), sum(sizes)
    k_eff = min(k, m) if m else 1
    N = 1
    for s in sizes:
        N *= s + 1
    dense_bytes = N * (n + m + 13)
    total = count_ksets(sizes, k_eff)
    if backend == "auto":
        if dense_bytes <= dense_bytes_limit and (
            N <= 4 * total or (kernels.BACKEND == "compiled" and N <= 64 * total)
        ):
            backend = "dense"
        else:
            backend = "sparse"
    sol = _solution_matrix(db, q)
    if backend == "dense":
        if dense_bytes > dense_bytes_limit:
            raise DeltaBudgetExceeded(f"dense table needs {dense_bytes} bytes")
        reason = kernels.delta_dense(sizes, k_eff, bytes(sol), stop_on_empty)
        return DeltaTable(db, k, dense=reason, complete=not stop_on_empty)
    if total > sparse_limit:
        raise DeltaBudgetExceeded(f"{total} k-sets exceed the limit {sparse_limit}")
    reason = _delta_sparse(sizes, k_eff, sol, stop_on_empty)
    return DeltaTable(db, k, sparse=reason, complete=not stop_on_empty)


def cqk(db: Database, q: Query, k: int, **kw) -> bool:
    return delta_k(db, q, k, stop_on_empty=True, **kw).contains_empty


def cqk_iterative(db: Database, q: Query, k_max: int, k_min: int = 1, **kw) -> tuple[bool, int]:
    """Cqk for k = k_min .. k_max, stopping at the first success.

    Returns ``(holds, k)`` where ``k`` is the first k that worked, or the last
    k tried. Values of k beyond the number of blocks are skipped because they
    cannot change the answer.
    """
    m = max(len(db.blocks), 1)
    last = k_min
    for k in range(k_min, k_max + 1):
        if k > m and k > k_min:
            break
        last = k
        if cqk(db, q, k, **kw):
            return True, k
    return False, last


def delta_k_naive(db: Database, q: Query, k: int) -> set:
    """Literal reading of the two rules, for cross-checking on tiny inputs."""
    check = pair_checker(q)
    blocks = db.blocks
    ksets = []
    for r in range(0, min(k, len(blocks)) + 1):
        for bs in itertools.combinations(range(len(blocks)), r):
            for pick in itertools.product(*(blocks[b] for b in bs)):
                ksets.append(frozenset(pick))
    delta = {s for s in ksets if any(check(a, b) for a in s for b in s)}

    def has_sub(t: frozenset) -> bool:
        items = list(t)
        for r in range(len(items) + 1):
            for sub in itertools.combinations(items, r):
                if frozenset(sub) in delta:
                    return True
        return False

    changed = True
    while changed:
        changed = False
        for s in ksets:
            if s in delta:
                continue
            if any(all(has_sub(s | {u}) for u in blk) for blk in blocks):
                delta.add(s)
                changed = True
    return delta
