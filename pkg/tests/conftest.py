import random
from pathlib import Path

import pytest

from cqa2.generate import random_database
from cqa2.query import parse_query

SAMPLES = Path(__file__).resolve().parent.parent / "samples"

QUERY_TEXT = {
    "q1": "@sig R 4 2 R(x,u|x,v) & R(v,y|u,y)",
    "q2": "@sig R 4 2 R(x,u|x,y) & R(u,y|x,z)",
    "q3": "@sig R 2 1 R(x|y) & R(y|z)",
    "q4": "@sig R 4 2 R(x,x|u,v) & R(x,y|u,x)",
    "q5": "@sig R 3 1 R(x|y,x) & R(y|x,u)",
    "q6": "@sig R 3 1 R(x|y,z) & R(z|x,y)",
    "q7": "@sig R 14 10 R(x1,x2,x3,y1,y1,y2,y3,z1,z2,z3|z4,z4,z4,z4) & R(x3,x1,x2,y3,y1,y1,y2,z2,z3,z4|z1,z2,z3,z4)",
}
Q = {name: parse_query(text) for name, text in QUERY_TEXT.items()}
FIVE = ("q2", "q3", "q4", "q5", "q6")


def mixed_database(q, rng, max_blocks=8, max_block_size=3):
    """Random database with a varying domain and block fill, so that both
    certain and non-certain instances are common."""
    return random_database(
        q, rng, max_blocks=max_blocks, max_block_size=max_block_size,
        domain=rng.randint(2, 6), fill=rng.choice((0.0, 0.3, 0.7)),
    )


def databases(name, count, seed, **kw):
    rng = random.Random(f"{name}/{seed}")
    return [mixed_database(Q[name], rng, **kw) for _ in range(count)]


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")


@pytest.fixture
def rng():
    return random.Random(12345)
