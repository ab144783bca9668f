import dataclasses

import pytest
from conftest import Q, databases

from cqa2.model import Database, Symbol, make_fact, parse_database
from cqa2.solutions import matches
from cqa2.tripath import (
    SearchBudget,
    SearchStatus,
    TreeBlock,
    TripathCandidate,
    check_nice,
    find_tripath_in,
    search_tripath,
    tripath_problem,
    tripath_to_text,
    verify_tripath,
    why_not_nice,
)


@pytest.fixture(scope="module")
def q2_fork():
    return search_tripath(Q["q2"], kind="fork")


@pytest.fixture(scope="module")
def q2_nice():
    return search_tripath(Q["q2"], kind="fork", require_nice=True)


def test_q2_smallest_fork_is_not_nice(q2_fork):
    assert q2_fork.status is SearchStatus.FOUND
    tp = q2_fork.tripath
    assert tp.kind == "fork" and len(tp.blocks) == 4
    assert check_nice(Q["q2"], tp) is None
    assert "nice" in why_not_nice(Q["q2"], tp)


def test_q2_nice_fork(q2_nice):
    q2 = Q["q2"]
    assert q2_nice.status is SearchStatus.FOUND
    tp = q2_nice.tripath
    assert tp.kind == "fork" and len(tp.blocks) == 8
    assert q2_nice.witness is not None
    # the center fact has the shape R(a,b|a,a) with g(e) = {a}
    a, b, c, d = tp.e.args
    assert a == c == d and a != b
    assert set(tp.g) == {a}
    assert verify_tripath(q2, tp.candidate) == tp


def test_smaller_budget_misses_the_nice_fork():
    r = search_tripath(Q["q2"], SearchBudget(max_blocks=7), kind="fork", require_nice=True)
    assert r.status is SearchStatus.NONE_WITHIN_BUDGET


def test_removed_solution_edge_is_rejected(q2_fork):
    q2 = Q["q2"]
    tp = q2_fork.tripath
    blocks = list(tp.blocks)
    root = blocks[tp.root]
    a = root.a
    blocks[tp.root] = dataclasses.replace(root, a=make_fact(a.sig, *a.args[:2], "zz", "zz"))
    cand = TripathCandidate(tuple(blocks))
    assert verify_tripath(q2, cand) is None
    prob = tripath_problem(q2, cand)
    assert prob.kind == "condition" and "missing solution" in prob.message


def test_malformed_candidates():
    q2 = Q["q2"]
    f = make_fact(q2.sig, "a", "b", "a", "c")
    single = TripathCandidate((TreeBlock(f, None, None),))
    assert verify_tripath(q2, single) is None
    assert tripath_problem(q2, single) is not None


def test_q6_triangle_and_no_fork():
    q6 = Q["q6"]
    r = search_tripath(q6)
    assert r.status is SearchStatus.FOUND and r.tripath.kind == "triangle"
    tp = r.tripath
    assert matches(q6, tp.f, tp.d)
    assert verify_tripath(q6, tp.candidate).kind == "triangle"
    assert search_tripath(q6, kind="fork").status is not SearchStatus.FOUND


def test_q5_has_no_tripath():
    q5 = Q["q5"]
    for budget in (SearchBudget(max_blocks=5), SearchBudget(max_blocks=12)):
        assert search_tripath(q5, budget).status is SearchStatus.EXHAUSTED
    for db in databases("q5", 100, seed="tp"):
        assert find_tripath_in(db, q5) is None


def test_search_is_deterministic():
    a = search_tripath(Q["q2"], kind="fork", require_nice=True).tripath.to_json()
    b = search_tripath(Q["q2"], kind="fork", require_nice=True).tripath.to_json()
    assert a == b


def _rename(db: Database, suffix: str) -> Database:
    return Database(
        make_fact(f.sig, *(Symbol(str(x) + suffix) for x in f.args)) for f in db.facts
    )


def test_find_in_noise(q2_nice):
    q2 = Q["q2"]
    tp = q2_nice.tripath
    noise = databases("q2", 1, seed="noise")[0]
    db = Database(list(tp.facts) + list(_rename(noise, "n").facts))
    found = find_tripath_in(db, q2, kind="fork")
    assert found is not None and found.kind == "fork"
    assert set(found.facts) <= set(db.facts)
    assert verify_tripath(q2, found.candidate) is not None


def test_find_needs_four_blocks(q2_fork):
    q2 = Q["q2"]
    facts = q2_fork.tripath.facts
    small = Database(facts[:2])
    assert len(small.blocks) < 4
    assert find_tripath_in(small, q2) is None


def test_find_respects_kind():
    q6 = Q["q6"]
    tp = search_tripath(q6).tripath
    assert find_tripath_in(tp.database, q6, kind="triangle") is not None
    assert find_tripath_in(tp.database, q6, kind="fork") is None


def test_emitted_text_reparses(q2_nice):
    tp = q2_nice.tripath
    text = tripath_to_text(tp, q2_nice.witness)
    assert "nice: x=" in text and "g(e)=" in text
    db = parse_database(text)
    assert sorted(db.facts) == sorted(tp.facts)
    assert find_tripath_in(db, Q["q2"], kind="fork") is not None
