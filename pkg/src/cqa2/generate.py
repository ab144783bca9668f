"""Random and structured database generators for tests and benchmarks."""
from __future__ import annotations

import random
from typing import Optional

from .model import Database, Fact, Signature, Symbol
from .query import Query, sjf


def _instantiate(q: Query, rng: random.Random, domain: list) -> tuple[Fact, Fact]:
    val = {v: rng.choice(domain) for v in sorted(q.A.var_set | q.B.var_set)}
    a = Fact(q.A.sig, tuple(val[v] for v in q.A.vars))
    b = Fact(q.B.sig, tuple(val[v] for v in q.B.vars))
    return a, b


def _trim(facts: set, rng: random.Random, max_blocks: int, max_block_size: int, declared) -> Database:
    blocks: dict[tuple, list] = {}
    for f in sorted(facts):
        blocks.setdefault(f.block_id, []).append(f)
    ids = sorted(blocks, key=lambda b: (b[0], tuple(map(str, b[1]))))
    if len(ids) > max_blocks:
        ids = sorted(rng.sample(ids, max_blocks), key=lambda b: (b[0], tuple(map(str, b[1]))))
    keep = []
    for bid in ids:
        blk = blocks[bid]
        if len(blk) > max_block_size:
            blk = rng.sample(blk, max_block_size)
        keep.extend(blk)
    return Database(keep, declared=declared)


def random_database(
    q: Query,
    rng: random.Random,
    max_blocks: int = 8,
    max_block_size: int = 3,
    domain: int = 6,
    plant: Optional[int] = None,
    noise: Optional[int] = None,
    fill: float = 0.0,
) -> Database:
    """Planted solution pairs plus uniform noise facts, trimmed to the limits.

    Planting makes certain instances common enough to be interesting. With
    probability ``fill`` each block also receives key-equal siblings, which
    makes non-certain instances common.
    """
    dom = [Symbol(str(i)) for i in range(domain)]
    plant = rng.randint(0, max_blocks) if plant is None else plant
    noise = rng.randint(0, max_blocks) if noise is None else noise
    facts: set = set()
    for _ in range(plant):
        facts.update(_instantiate(q, rng, dom))
    sig = q.sig
    for _ in range(noise):
        facts.add(Fact(sig, tuple(rng.choice(dom) for _ in range(sig.arity))))
    if fill:
        for f in sorted(facts):
            if rng.random() < fill:
                for _ in range(rng.randint(1, max_block_size - 1)):
                    rest = tuple(rng.choice(dom) for _ in range(sig.arity - sig.key_len))
                    facts.add(Fact(sig, f.args[: sig.key_len] + rest))
    return _trim(facts, rng, max_blocks, max_block_size, [sig])


def random_sjf_database(
    q: Query,
    rng: random.Random,
    max_blocks: int = 6,
    max_block_size: int = 3,
    domain: int = 5,
) -> Database:
    """A database over the two relations of sjf(q)."""
    s = sjf(q)
    dom = [Symbol(str(i)) for i in range(domain)]
    facts: set = set()
    for _ in range(rng.randint(0, max_blocks)):
        facts.update(_instantiate(s, rng, dom))
    for _ in range(rng.randint(0, max_blocks)):
        sig = rng.choice([s.A.sig, s.B.sig])
        facts.add(Fact(sig, tuple(rng.choice(dom) for _ in range(sig.arity))))
    return _trim(facts, rng, max_blocks, max_block_size, [s.A.sig, s.B.sig])


def triangle_database(triples, sig: Optional[Signature] = None) -> Database:
    """For R(x|y,z) & R(z|x,y): the three rotations of every (x, y, z).

    Each triple yields a solution triangle (x|y,z) -> (z|x,y) -> (y|z,x).
    """
    sig = sig or Signature("R", 3, 1)
    facts = set()
    for x, y, z in triples:
        x, y, z = (Symbol(str(t)) for t in (x, y, z))
        facts.update({Fact(sig, (x, y, z)), Fact(sig, (z, x, y)), Fact(sig, (y, z, x))})
    return Database(facts, declared=[sig])


def random_triangle_database(rng: random.Random, elements: int, triangles: int) -> Database:
    if triangles > elements * (elements - 1) * (elements - 2):
        raise ValueError(f"{elements} elements allow fewer than {triangles} distinct triples")
    pool = list(range(elements))
    triples = set()
    while len(triples) < triangles:
        t = tuple(rng.sample(pool, 3))
        triples.add(t)
    return triangle_database(sorted(triples))
