"""Compiled vs pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat N] [--seed S]

Both backends are imported directly, so the comparison does not depend on
which one ``cqa2.kernels`` picked at import.
"""
import argparse
import itertools
import random
import time

from cqa2 import _kernels_py
from cqa2.engine.fixpoint import _solution_matrix
from cqa2.engine.oracle import _solution_index
from cqa2.gadget import Cnf, build_gadget, make_plan, normalize_3sat
from cqa2.generate import random_database, random_triangle_database
from cqa2.query import parse_query

try:
    from cqa2 import _kernels as _compiled
except ImportError:
    _compiled = None

Q2 = parse_query("@sig R 4 2 R(x,u|x,y) & R(u,y|x,z)")
Q6 = parse_query("@sig R 3 1 R(x|y,z) & R(z|x,y)")


def falsifier_args(db, q):
    facts, block, selfsol, nbrs = _solution_index(db, q)
    block_start = [0]
    for blk in db.blocks:
        block_start.append(block_start[-1] + len(blk))
    adj_start, adj = [0], []
    for lst in nbrs:
        adj.extend(sorted(lst))
        adj_start.append(len(adj))
    return block_start, adj_start, adj, bytes(selfsol), 10**7


def delta_args(db, q, k):
    return [len(b) for b in db.blocks], k, bytes(_solution_matrix(db, q)), False


def pigeonhole(n, h):
    var = lambda i, j: i * h + j + 1  # noqa: E731
    clauses = [tuple(var(i, j) for j in range(h)) for i in range(n)]
    clauses += [(-var(i, j), -var(k, j)) for j in range(h) for i, k in itertools.combinations(range(n), 2)]
    return Cnf.of(clauses)


def gadget_databases():
    plan = make_plan(Q2)
    formulas = [
        Cnf.of([(-1, 2, 3), (-1, -2, 3), (1, -2, -3)]),
        Cnf.of([(1, 2), (-1, 2), (1, -2), (-1, -2)]),
        pigeonhole(3, 2),
        Cnf.of([(1,), (-1,)]),
    ]
    return [build_gadget(Q2, plan, normalize_3sat(phi)).database for phi in formulas]


def workloads(seed):
    rng = random.Random(seed)
    tri = [random_triangle_database(rng, rng.randint(6, 9), rng.randint(5, 8)) for _ in range(40)]
    tri = [db for db in tri if len(db.blocks) <= 9]
    dense = [random_database(Q2, rng, max_blocks=7, max_block_size=3, domain=3, fill=0.5) for _ in range(40)]
    gadgets = gadget_databases() * 10
    return [
        ("find_falsifying q6 triangles", "find_falsifying", [falsifier_args(db, Q6) for db in tri]),
        ("find_falsifying q2 gadgets", "find_falsifying", [falsifier_args(db, Q2) for db in gadgets]),
        ("delta_dense q6 k=2", "delta_dense", [delta_args(db, Q6, 2) for db in tri]),
        ("delta_dense q2 k=3", "delta_dense", [delta_args(db, Q2, 3) for db in dense]),
    ]


def timed(fn, inputs, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = [fn(*args) for args in inputs]
        best = min(best, time.perf_counter() - t0)
    return best, out


def norm(x):
    # compiled results come back as typed arrays, Python ones as lists
    if isinstance(x, (int, type(None))):
        return x
    if isinstance(x, tuple):
        return tuple(norm(y) for y in x)
    return tuple(x)


def same(a, b):
    return [norm(x) for x in a] == [norm(x) for x in b]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    if _compiled is None:
        print("compiled backend not built; run `pip install -e . --no-build-isolation`")
    print(f"{'workload':32s} {'inputs':>6s} {'python s':>9s} {'compiled s':>11s} {'speedup':>8s}")
    for title, name, inputs in workloads(a.seed):
        tp, rp = timed(getattr(_kernels_py, name), inputs, a.repeat)
        if _compiled is None:
            print(f"{title:32s} {len(inputs):6d} {tp:9.4f} {'-':>11s} {'-':>8s}")
            continue
        tc, rc = timed(getattr(_compiled, name), inputs, a.repeat)
        assert same(rp, rc), f"{title}: backends disagree"
        print(f"{title:32s} {len(inputs):6d} {tp:9.4f} {tc:11.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
