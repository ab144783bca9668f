"""Reference deciders: plain repair enumeration and an exact backtracking
search for a falsifying repair (the compiled kernel)."""
from __future__ import annotations

import random
from typing import Iterable, Optional

from .. import kernels
from ..model import Database, Fact, Repair, count_repairs
from ..query import Query
from ..solutions import pair_checker
from .result import Answer, CertaintyResult

DEFAULT_REPAIR_CAP = 2**14
DEFAULT_NODE_LIMIT = 2_000_000


def _solution_index(db: Database, q: Query):
    """Facts in block order, their block, self-solutions and the solution
    neighbours of every fact (both directions, other blocks only)."""
    facts = db.sorted_facts
    block = [b for b, blk in enumerate(db.blocks) for _ in blk]
    check = pair_checker(q)
    n = len(facts)
    selfsol = [check(a, a) for a in facts]
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        a = facts[i]
        for j in range(i + 1, n):
            if block[i] != block[j] and (check(a, facts[j]) or check(facts[j], a)):
                nbrs[i].append(j)
                nbrs[j].append(i)
    return facts, block, selfsol, nbrs


def oracle_certain(db: Database, q: Query, cap: int = DEFAULT_REPAIR_CAP) -> CertaintyResult:
    """Check every repair, in odometer order (last block fastest).

    Prefixes that already contain a solution are skipped as a whole, since
    every repair extending them satisfies ``q``. The first falsifying repair
    in odometer order is returned.
    """
    total = count_repairs(db)
    if total > cap:
        return CertaintyResult(Answer.UNKNOWN, "oracle", evidence={"repairs": total, "cap": cap})
    facts, block, selfsol, nbrs = _solution_index(db, q)
    starts = []
    pos = 0
    for blk in db.blocks:
        starts.append(pos)
        pos += len(blk)
    m = len(db.blocks)
    nb_sets = [set(x) for x in nbrs]
    chosen: list[int] = []
    # iterative depth-first walk; nxt[b] is the next candidate fact of block b
    nxt = [starts[b] for b in range(m)]
    b = 0
    while 0 <= b < m:
        if len(chosen) > b:
            chosen.pop()
        end = starts[b] + len(db.blocks[b])
        i = nxt[b]
        while i < end and (selfsol[i] or any(c in nb_sets[i] for c in chosen)):
            i += 1
        if i == end:
            nxt[b] = starts[b]
            b -= 1
            continue
        nxt[b] = i + 1
        chosen.append(i)
        b += 1
    if b == m:
        repair = Repair(db, tuple(i - starts[j] for j, i in enumerate(chosen)))
        return CertaintyResult(Answer.NOT_CERTAIN, "oracle", repair, evidence={"repairs": total})
    return CertaintyResult(Answer.CERTAIN, "oracle", evidence={"repairs": total})


def search_falsifying(
    db: Database,
    q: Query,
    node_limit: int = DEFAULT_NODE_LIMIT,
    banned: Iterable[Fact] = (),
    conflicts: Iterable[tuple[Fact, Fact]] = (),
) -> tuple[int, Optional[Repair]]:
    """Backtracking search with forward checking for a falsifying repair.

    ``banned`` facts and ``conflicts`` pairs may only be passed when no
    falsifying repair can use them (e.g. sets derived by the fixpoint).
    Returns ``(1, repair)``, ``(0, None)`` when none exists, or ``(-1, None)``
    when ``node_limit`` was reached.
    """
    facts, block, selfsol, nbrs = _solution_index(db, q)
    idx = {f: i for i, f in enumerate(facts)}
    for a, b in conflicts:
        i, j = idx[a], idx[b]
        if block[i] != block[j] and j not in nbrs[i]:
            nbrs[i].append(j)
            nbrs[j].append(i)
    dead = bytearray(1 if s else 0 for s in selfsol)
    for f in banned:
        dead[idx[f]] = 1
    block_start = [0]
    for blk in db.blocks:
        block_start.append(block_start[-1] + len(blk))
    adj_start = [0]
    adj: list[int] = []
    for lst in nbrs:
        adj.extend(sorted(lst))
        adj_start.append(len(adj))
    status, choice = kernels.find_falsifying(block_start, adj_start, adj, bytes(dead), node_limit)
    if status != 1:
        return status, None
    return 1, Repair(db, tuple(c - block_start[b] for b, c in enumerate(choice)))


def exact_certain(db: Database, q: Query, node_limit: int = DEFAULT_NODE_LIMIT) -> CertaintyResult:
    """Certainty by exhaustive backtracking; unknown if the node limit is hit."""
    status, repair = search_falsifying(db, q, node_limit)
    if status == 1:
        return CertaintyResult(Answer.NOT_CERTAIN, "search", repair)
    if status == 0:
        return CertaintyResult(Answer.CERTAIN, "search")
    return CertaintyResult(Answer.UNKNOWN, "search", evidence={"node_limit": node_limit})


def falsifies(q: Query, repair: Repair) -> bool:
    check = pair_checker(q)
    fs = repair.facts
    return not any(check(a, b) for a in fs for b in fs)


def sample_falsifying(
    db: Database, q: Query, rng: random.Random, restarts: int = 20, steps: int = 2000, noise: float = 0.2
) -> Optional[Repair]:
    """Randomised local search for a falsifying repair (min-conflicts).

    Starts from a random repair and keeps switching a conflicted block to the
    fact with the fewest conflicts, with occasional random moves. Finds
    nothing when the database is certain; a miss proves nothing.
    """
    facts, block, selfsol, nbrs = _solution_index(db, q)
    m = len(db.blocks)
    starts = [0]
    for blk in db.blocks:
        starts.append(starts[-1] + len(blk))
    nb_sets = [set(x) for x in nbrs]
    for _ in range(restarts):
        cur = [rng.randrange(starts[b], starts[b + 1]) for b in range(m)]
        chosen = set(cur)

        def cost(i: int) -> int:
            return selfsol[i] * m + sum(1 for j in nb_sets[i] if j in chosen)

        for _ in range(steps):
            bad = [b for b in range(m) if cost(cur[b])]
            if not bad:
                return Repair(db, tuple(i - starts[b] for b, i in enumerate(cur)))
            b = rng.choice(bad)
            chosen.discard(cur[b])
            options = list(range(starts[b], starts[b + 1]))
            if rng.random() < noise:
                pick = rng.choice(options)
            else:
                costs = [cost(i) for i in options]
                best = min(costs)
                pick = rng.choice([i for i, c in zip(options, costs) if c == best])
            cur[b] = pick
            chosen.add(pick)
    return None
