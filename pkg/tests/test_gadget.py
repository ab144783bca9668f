import random

import pytest
from conftest import Q
from hypothesis import given, settings
from hypothesis import strategies as st

from cqa2.engine import Answer, exact_certain, falsifies, sample_falsifying
from cqa2.gadget import (
    Cnf,
    GadgetPlan,
    build_gadget,
    make_plan,
    normalize_3sat,
    parse_dimacs,
    structural_report,
    verify_gadget,
)
from cqa2.model import ParseError, Symbol, parse_database
from cqa2.tripath import search_tripath

THREE_CLAUSE = Cnf.of([(-1, 2, 3), (-1, -2, 3), (1, -2, -3)])


@pytest.fixture(scope="module")
def plan():
    return make_plan(Q["q2"])


# ------------------------------------------------------------------- DIMACS


def test_parse_dimacs():
    text = "c a comment\np cnf 3 2\n1 -2 0\n2 3\n-1 0\n%\n0\n"
    phi = parse_dimacs(text)
    assert phi == Cnf(3, ((1, -2), (2, 3, -1)))
    assert parse_dimacs(phi.to_dimacs()) == phi


@pytest.mark.parametrize("text", [
    "1 2 0\n",
    "p cnf 2 1\np cnf 2 1\n1 0\n",
    "p cnf 2 2\n1 0\n",
    "p cnf 1 1\n2 0\n",
    "p cnf 1 1\nx 0\n",
    "p dnf 1 1\n1 0\n",
    "",
])
def test_parse_dimacs_errors(text):
    with pytest.raises(ParseError):
        parse_dimacs(text)


# -------------------------------------------------------------- normalizing


def test_conforming_formula_is_unchanged():
    assert normalize_3sat(THREE_CLAUSE) is THREE_CLAUSE
    assert THREE_CLAUSE.v3 == [1, 2, 3] and not THREE_CLAUSE.v2


def test_variable_with_four_occurrences_is_split():
    phi = Cnf.of([(1, 2), (1, -2), (-1, 3), (-1, -3)])
    out = normalize_3sat(phi)
    assert out.is_conforming()
    assert out.num_vars > phi.num_vars
    assert all(len(out.occurrences(v)) <= 3 for v in out.variables)
    assert out.satisfiable() == phi.satisfiable()


def test_pure_literal_is_eliminated():
    phi = Cnf.of([(1, 2), (-2, 3), (2, -3)])
    out = normalize_3sat(phi)
    assert 1 not in out.variables
    assert out.clauses == ((-2, 3), (2, -3))


def test_empty_clause_and_tautologies():
    assert normalize_3sat(Cnf.of([(1, -1), ()])) == Cnf(1, ((1,), (-1,)))
    assert normalize_3sat(Cnf.of([(1, -1)])).clauses == ()


def test_long_clauses_are_split():
    phi = Cnf.of([(1, 2, 3, 4, 5), (-1,), (-2,), (-3,), (-4,), (-5,)])
    out = normalize_3sat(phi)
    assert out.is_conforming() and max(map(len, out.clauses)) <= 3
    assert not out.satisfiable()


cnf_strategy = st.lists(
    st.lists(st.integers(1, 5).flatmap(lambda v: st.sampled_from((v, -v))), min_size=0, max_size=5),
    max_size=7,
)


@settings(max_examples=300, deadline=None)
@given(cnf_strategy)
def test_normalize_is_equisatisfiable(clauses):
    phi = Cnf.of(clauses)
    out = normalize_3sat(phi)
    assert out.is_conforming()
    assert out.satisfiable() == phi.satisfiable()


# ------------------------------------------------------------------ gadget


def test_plan_needs_a_nice_fork():
    q2 = Q["q2"]
    plain = search_tripath(q2, kind="fork")
    with pytest.raises(ValueError):
        GadgetPlan(q2, plain.tripath, plain.witness)
    with pytest.raises(ValueError):
        make_plan(Q["q5"])


def test_build_needs_conforming_input(plan):
    with pytest.raises(ValueError):
        build_gadget(Q["q2"], plan, Cnf.of([(1,), (2,)]))


def test_unsat_pair(plan):
    q2 = Q["q2"]
    phi = Cnf.of([(1,), (-1,)])
    g = build_gadget(q2, plan, phi)
    assert len({lab for lab, *_ in g.copies}) == 2
    rep = structural_report(q2, plan, g)
    assert not rep["stray_solutions"]
    # the two clause blocks stay unpadded (see the decisions ledger)
    clause_blocks = [blk for blk in g.database.blocks if blk[0].args[0] in (Symbol("C1"), Symbol("C2"))]
    assert rep["small_blocks"] == len([b for b in clause_blocks if len(b) == 1]) == 2
    check = verify_gadget(q2, plan, phi)
    assert check.answer is Answer.CERTAIN and check.agree
    assert check.describe() == "certain (unsat input)"


def test_sat_pair_gives_falsifying_repair(plan):
    q2 = Q["q2"]
    check = verify_gadget(q2, plan, Cnf.of([(1, 2), (-1, -2)]))
    assert check.answer is Answer.NOT_CERTAIN and check.agree
    assert falsifies(q2, check.falsifying_repair)


def test_three_clause_formula_structure(plan):
    q2 = Q["q2"]
    g = build_gadget(q2, plan, THREE_CLAUSE)
    assert THREE_CLAUSE.satisfying_assignment() is not None
    labels = sorted({lab for lab, *_ in g.copies})
    assert labels == [f"p{v}@C{c}" for v in (1, 2, 3) for c in (1, 2, 3)]
    rep = structural_report(q2, plan, g)
    assert rep["small_blocks"] == 0 and not rep["stray_solutions"]
    assert rep["blocks"] == 60
    # every fact traces back to a copy of the tripath, or is padding
    pads = set(g.pads)
    assert all(f in pads or g.provenance.get(f) for f in g.database.facts)


def test_copies_share_clause_and_leaf_keys(plan):
    g = build_gadget(Q["q2"], plan, THREE_CLAUSE)
    for v in (1, 2, 3):
        # first copy: the occurrence whose polarity is used once
        first, *rest = [(u, {vv, ww}) for _, var, _, u, vv, ww in g.copies if var == v]
        assert len(rest) == 2
        for _, leaves in rest:
            assert len(first[1] & leaves) == 1
        assert not rest[0][1] & rest[1][1]
    # root keys inside a clause are the clause element
    for lab, _, ci, u, _, _ in g.copies:
        assert u == Symbol(f"C{ci + 1}") and lab.endswith(f"@C{ci + 1}")


def test_three_clause_formula_sampler_finds_falsifying_repair(plan):
    q2 = Q["q2"]
    g = build_gadget(q2, plan, THREE_CLAUSE)
    r = sample_falsifying(g.database, q2, random.Random(0), restarts=40, steps=5000)
    assert r is not None and falsifies(q2, r)


def test_gadget_text_reparses(plan):
    g = build_gadget(Q["q2"], plan, THREE_CLAUSE)
    db = parse_database(g.to_text())
    assert sorted(db.facts) == g.database.sorted_facts


def test_gadget_agrees_on_random_formulas(plan):
    q2 = Q["q2"]
    rng = random.Random(21)
    seen = set()
    for _ in range(25):
        clauses = [
            [rng.choice((1, -1)) * rng.randint(1, 4) for _ in range(rng.randint(1, 3))]
            for _ in range(rng.randint(1, 5))
        ]
        phi = normalize_3sat(Cnf.of(clauses))
        if not phi.clauses:
            continue
        check = verify_gadget(q2, plan, phi)
        assert check.agree, phi
        seen.add(check.satisfiable)
    assert seen == {True, False}


def test_whole_database_search_agrees(plan):
    # the exact search on all of D[phi], without splitting into components
    q2 = Q["q2"]
    for phi, want in ((Cnf.of([(1,), (-1,)]), Answer.CERTAIN), (Cnf.of([(1, 2), (-1, -2)]), Answer.NOT_CERTAIN)):
        g = build_gadget(q2, plan, phi)
        assert exact_certain(g.database, q2).answer is want
