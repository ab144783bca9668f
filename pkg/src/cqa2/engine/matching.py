"""The bipartite test between blocks and cliques of the solution graph."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from ..model import Database, Repair
from ..query import Query
from ..solutions import SolutionGraph

_INF = float("inf")


def hopcroft_karp(n_left: int, n_right: int, adj: list) -> tuple[int, list, list]:
    """Maximum matching of a bipartite graph given as left adjacency lists.

    Returns ``(size, match_left, match_right)`` with -1 for unmatched.
    """
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        queue = deque()
        for u in range(n_left):
            if match_l[u] < 0:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = _INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w < 0:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(root: int) -> bool:
        # iterative augmenting-path search along the BFS layering
        stack = [(root, iter(adj[root]))]
        path = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                w = match_r[v]
                if w < 0:
                    path.append((u, v))
                    for a, b in path:
                        match_l[a] = b
                        match_r[b] = a
                    return True
                if dist[w] == dist[u] + 1:
                    path.append((u, v))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[u] = _INF
                stack.pop()
                if path:
                    path.pop()
        return False

    size = 0
    while bfs():
        for u in range(n_left):
            if match_l[u] < 0 and dfs(u):
                size += 1
    return size, match_l, match_r


@dataclass
class MatchingReport:
    saturated: bool
    size: int
    blocks: int
    cliques: int
    match: list  # per block: clique label or -1

    def to_json(self) -> dict:
        return {"saturated": self.saturated, "size": self.size, "blocks": self.blocks, "cliques": self.cliques}


def build_h(db: Database, q: Query, graph: Optional[SolutionGraph] = None):
    """H(D,q) as left adjacency lists (blocks to clique labels)."""
    g = graph or SolutionGraph(db, q)
    labels = g.clique_ids()
    n_right = max(labels) + 1 if labels else 0
    adj: list[set] = [set() for _ in db.blocks]
    for i, f in enumerate(g.facts):
        if i not in g.self_loops:
            adj[g.block_of[i]].add(labels[i])
    return g, labels, n_right, [sorted(a) for a in adj]


def matching_report(db: Database, q: Query, graph: Optional[SolutionGraph] = None) -> MatchingReport:
    _, _, n_right, adj = build_h(db, q, graph)
    size, match_l, _ = hopcroft_karp(len(adj), n_right, adj)
    return MatchingReport(size == len(adj), size, len(adj), n_right, match_l)


def matching(db: Database, q: Query) -> bool:
    """D |= Matching: some matching of H(D,q) saturates every block."""
    return matching_report(db, q).saturated


def certain_by_not_matching(db: Database, q: Query) -> bool:
    return not matching(db, q)


def matching_repair(db: Database, q: Query) -> Optional[Repair]:
    """The repair read off a saturating matching: each block picks a fact of
    its matched clique that is not a self-solution. On clique-databases this
    repair falsifies q; elsewhere callers must check it."""
    g, labels, n_right, adj = build_h(db, q)
    size, match_l, _ = hopcroft_karp(len(adj), n_right, adj)
    if size != len(adj):
        return None
    choice = []
    for b, blk in enumerate(db.blocks):
        for pos, f in enumerate(blk):
            i = g.index[f]
            if labels[i] == match_l[b] and i not in g.self_loops:
                choice.append(pos)
                break
    return Repair(db, tuple(choice))
