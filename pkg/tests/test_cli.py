import io
import json
import subprocess
import sys

import pytest
from conftest import SAMPLES

from cqa2.cli import EXIT_INPUT, EXIT_OK, EXIT_UNKNOWN, run
from cqa2.engine import falsifies
from cqa2.model import Repair, parse_database
from cqa2.query import parse_query


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def sample(name):
    return SAMPLES / name


@pytest.mark.parametrize("name,first", [
    ("q1", "coNP-complete"),
    ("q2", "coNP-complete (fork-tripath found"),
    ("q3", "PTIME"),
    ("q5", "PTIME"),
    ("q6", "PTIME"),
])
def test_classify(name, first):
    code, out, _ = call("classify", "--query", sample(f"{name}.q"))
    assert code == EXIT_OK
    assert out.startswith(first)


def test_classify_json_is_byte_identical():
    a = call("classify", "--query", sample("q2.q"), "--json")[1]
    b = call("classify", "--query", sample("q2.q"), "--json")[1]
    assert a == b
    rep = json.loads(a)
    assert rep["command"] == "classify" and rep["verdict"]


def test_certain_not_certain_repair_reparses():
    code, out, _ = call("certain", "--query", sample("q3.q"), "--db", sample("d3.facts"), "--json")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["answer"] == "not-certain" and rep["method"] == "cert2"
    assert "timings_ms" not in rep
    q = parse_query(sample("q3.q").read_text())
    chosen = parse_database("@sig R 2 1\n" + "\n".join(rep["falsifying_repair"]))
    db = parse_database(sample("d3.facts").read_text())
    pos = {db.block_index(f): db.blocks[db.block_index(f)].index(f) for f in chosen.facts}
    assert sorted(pos) == list(range(len(db.blocks)))
    assert falsifies(q, Repair(db, tuple(pos[b] for b in range(len(db.blocks)))))


def test_certain_text_and_timings():
    code, out, _ = call("certain", "--query", sample("q6.q"), "--db", sample("d6.facts"))
    assert code == EXIT_OK
    assert out.splitlines()[0] in ("certain", "not-certain")
    code, out, _ = call("certain", "--query", sample("q6.q"), "--db", sample("d6.facts"), "--json", "--timings")
    assert "total" in json.loads(out)["timings_ms"]


def test_certain_budget_exhausted_exits_2(tmp_path):
    facts = "\n".join(f"R({i}|{j})" for i in range(20) for j in (0, 1))
    db = tmp_path / "big.facts"
    db.write_text("@sig R 2 1\n" + facts + "\n")
    code, out, _ = call("oracle", "--query", sample("q3.q"), "--db", db, "--repair-cap", 10)
    assert code == EXIT_UNKNOWN and out.startswith("unknown")


def test_oracle_matches_certain():
    a = json.loads(call("oracle", "--query", sample("q3.q"), "--db", sample("d3.facts"), "--json")[1])
    b = json.loads(call("certain", "--query", sample("q3.q"), "--db", sample("d3.facts"), "--json")[1])
    assert a["answer"] == b["answer"]


def test_tripath_emit(tmp_path):
    dest = tmp_path / "tp.facts"
    code, out, _ = call("tripath", "--query", sample("q2.q"), "--kind", "fork", "--nice", "--emit", dest)
    assert code == EXIT_OK
    assert out.startswith("found fork-tripath with 8 blocks")
    db = parse_database(dest.read_text())
    assert len(db.blocks) == 8


def test_tripath_none_within_budget():
    code, out, _ = call("tripath", "--query", sample("q2.q"), "--kind", "fork", "--nice", "--max-blocks", 5)
    assert code == EXIT_UNKNOWN and out.startswith("none-within-budget")
    code, out, _ = call("tripath", "--query", sample("q5.q"))
    assert code == EXIT_OK and out.startswith("exhausted")


def test_gadget_verify(tmp_path):
    dest = tmp_path / "g.facts"
    code, out, _ = call("gadget", "--query", sample("q2.q"), "--cnf", sample("unsat.cnf"), "--verify", "--out", dest)
    assert code == EXIT_OK
    assert "certain (unsat input)" in out
    assert parse_database(dest.read_text()).facts
    code, out, _ = call("gadget", "--query", sample("q2.q"), "--cnf", sample("three_clause.cnf"), "--verify", "--json")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["answer"] == "not-certain" and rep["satisfiable"]


def test_gadget_normalizes_input(tmp_path):
    cnf = tmp_path / "long.cnf"
    cnf.write_text("p cnf 4 2\n1 2 3 4 0\n-1 0\n")
    code, out, _ = call("gadget", "--query", sample("q2.q"), "--cnf", cnf, "--verify")
    assert code == EXIT_OK
    assert "normalised" in out and "(sat input)" in out


def test_gadget_needs_fork_query():
    code, _, err = call("gadget", "--query", sample("q5.q"), "--cnf", sample("unsat.cnf"))
    assert code == EXIT_INPUT and err.startswith("cqa2 gadget:")


def test_reduce_sjf(tmp_path):
    code, out, _ = call("reduce-sjf", "--query", sample("q1.q"), "--db", sample("d1_sjf.facts"))
    assert code == EXIT_OK
    db = parse_database(out)
    assert len(db) == 3
    dest = tmp_path / "mu.facts"
    code, out, _ = call("reduce-sjf", "--query", sample("q1.q"), "--db", sample("d1_sjf.facts"), "--out", dest)
    assert code == EXIT_OK and len(parse_database(dest.read_text())) == 3


def test_reduce_sjf_rejects_foreign_relation():
    code, _, err = call("reduce-sjf", "--query", sample("q1.q"), "--db", sample("d3.facts"))
    assert code == EXIT_INPUT and "cqa2 reduce-sjf:" in err


def test_graph_dot(tmp_path):
    dest = tmp_path / "g.dot"
    code, out, _ = call("graph", "--query", sample("q6.q"), "--db", sample("d6.facts"), "--dot", dest)
    assert code == EXIT_OK
    assert "clique-database" in out
    assert dest.read_text().startswith("graph")


def test_input_errors(tmp_path):
    bad = tmp_path / "bad.q"
    bad.write_text("@sig R 2 1 R(x|y)\n")
    assert call("classify", "--query", bad)[0] == EXIT_INPUT
    assert call("classify", "--query", tmp_path / "missing.q")[0] == EXIT_INPUT
    # header of the database disagrees with the query
    assert call("certain", "--query", sample("q6.q"), "--db", sample("d3.facts"))[0] == EXIT_INPUT


def test_usage_errors_exit_1(capsys):
    assert call()[0] == EXIT_INPUT
    assert call("certain", "--query", sample("q3.q"))[0] == EXIT_INPUT
    assert call("certain", "--query", sample("q3.q"), "--db", sample("d3.facts"), "--k", 0)[0] == EXIT_INPUT
    assert call("certain", "--query", sample("q3.q"), "--db", sample("d3.facts"), "--method", "guess")[0] == EXIT_INPUT


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cqa2", "classify", "--query", str(sample("q3.q"))],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("PTIME")
