"""Two-atom queries: parsing, syntactic classifiers, the sjf transform and the
self-join reduction, and the top-level complexity classifier."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

from .model import Database, Fact, ParseError, Signature, Symbol, Tup, parse_header

if TYPE_CHECKING:
    from .tripath import SearchBudget, Tripath

_VAR = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Atom:
    sig: Signature
    vars: tuple

    def __post_init__(self):
        if len(self.vars) != self.sig.arity:
            raise ValueError(f"atom over {self.sig.relation} needs {self.sig.arity} variables")

    @property
    def key_tuple(self) -> tuple:
        return self.vars[: self.sig.key_len]

    @property
    def key(self) -> frozenset:
        return frozenset(self.key_tuple)

    @property
    def var_set(self) -> frozenset:
        return frozenset(self.vars)

    def __str__(self) -> str:
        l = self.sig.key_len
        return f"{self.sig.relation}({','.join(self.vars[:l])}|{','.join(self.vars[l:])})"


@dataclass(frozen=True)
class Query:
    A: Atom
    B: Atom

    def __post_init__(self):
        a, b = self.A.sig, self.B.sig
        if (a.arity, a.key_len) != (b.arity, b.key_len):
            raise ValueError(f"atoms disagree on signature: {a} vs {b}")

    @property
    def sig(self) -> Signature:
        return self.A.sig

    @property
    def shared(self) -> frozenset:
        return self.A.var_set & self.B.var_set

    def swapped(self) -> "Query":
        return Query(self.B, self.A)

    def __str__(self) -> str:
        return f"{self.A} & {self.B}"

    def to_text(self) -> str:
        return f"{self.A.sig.header()}\n{self}\n"


def atom(sig: Signature, *names: str) -> Atom:
    return Atom(sig, tuple(names))


def _parse_atom(text: str, sig: Signature) -> Atom:
    m = re.fullmatch(r"\s*([A-Za-z0-9_]+)\s*\((.*)\)\s*", text)
    if not m:
        raise ParseError(f"malformed atom {text!r}")
    rel, body = m.groups()
    if rel != sig.relation:
        raise ParseError(f"atom uses relation {rel!r}, header declares {sig.relation!r}")
    if body.count("|") != 1:
        raise ParseError(f"atom {text!r} needs exactly one '|' separating the key")
    head, tail = body.split("|")
    names = [t.strip() for part in (head, tail) for t in part.split(",") if t.strip()]
    nkey = len([t for t in head.split(",") if t.strip()])
    for n in names:
        if not _VAR.match(n):
            raise ParseError(f"{n!r} is not a variable (constants are not allowed in atoms)")
    if nkey != sig.key_len or len(names) != sig.arity:
        raise ParseError(f"atom {text!r} does not fit signature [{sig.arity},{sig.key_len}]")
    return Atom(sig, tuple(names))


def parse_query(text: str) -> Query:
    """Parse ``@sig R k l`` followed by ``R(..|..) & R(..|..)``.

    Header and atoms may share a line. ``#`` starts a comment.
    """
    body = " ".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    m = re.match(r"(@sig\s+\S+\s+\S+\s+\S+)\s*(.*)\Z", body)
    if not m:
        raise ParseError("query must start with an '@sig R k l' header")
    sig = parse_header(m.group(1))
    parts = m.group(2).split("&")
    if len(parts) != 2:
        raise ParseError("expected exactly two atoms joined by '&'")
    return Query(_parse_atom(parts[0], sig), _parse_atom(parts[1], sig))


# ------------------------------------------------------------------ triviality

UNSATISFIABLE = "unsatisfiable"


def _retracts_onto(src: Atom, dst: Atom) -> bool:
    """Is there h with h(src) = dst that fixes every variable of dst?"""
    fixed = dst.var_set
    h: dict[str, str] = {}
    for v, w in zip(src.vars, dst.vars):
        if v in fixed:
            if v != w:
                return False
        elif h.setdefault(v, w) != w:
            return False
    return True


def _unify(a: Atom, b: Atom) -> Optional[Atom]:
    parent: dict[str, str] = {}

    def find(v):
        while parent.get(v, v) != v:
            v = parent[v]
        return v

    rank = {v: i for i, v in enumerate(list(dict.fromkeys(a.vars + b.vars)))}
    for v, w in zip(a.vars, b.vars):
        rv, rw = find(v), find(w)
        if rv != rw:
            lo, hi = sorted((rv, rw), key=rank.__getitem__)
            parent[hi] = lo
    return Atom(a.sig, tuple(find(v) for v in a.vars))


def is_trivial(q: Query):
    """The single atom ``q`` is equivalent to over consistent databases, or None.

    Returns ``UNSATISFIABLE`` only if the key-equal atoms fail to unify, which
    cannot happen for all-variable atoms.
    """
    if _retracts_onto(q.B, q.A):
        return q.A
    if _retracts_onto(q.A, q.B):
        return q.B
    if q.A.key_tuple == q.B.key_tuple:
        c = _unify(q.A, q.B)
        return c if c is not None else UNSATISFIABLE
    return None


# ----------------------------------------------------------- syntactic tests


def conp_condition1(q: Query) -> bool:
    A, B, sh = q.A, q.B, q.shared
    return not sh <= A.key and not sh <= B.key and not A.key <= B.key and not B.key <= A.key


def conp_condition2(q: Query) -> bool:
    return not q.A.key <= q.B.var_set or not q.B.key <= q.A.var_set


def syntactic_conp(q: Query) -> bool:
    return conp_condition1(q) and conp_condition2(q)


def cert2_applicable(q: Query) -> Optional[str]:
    A, B, sh = q.A, q.B, q.shared
    if A.key <= B.key or sh <= B.key:
        return "AB"
    if B.key <= A.key or sh <= A.key:
        return "BA"
    return None


def is_2way_determined(q: Query) -> bool:
    A, B = q.A, q.B
    return not A.key <= B.key and not B.key <= A.key and A.key <= B.var_set and B.key <= A.var_set


# ------------------------------------------------------- sjf and reduction


def sjf(q: Query) -> Query:
    return Query(
        Atom(q.A.sig.renamed(q.A.sig.relation + "1"), q.A.vars),
        Atom(q.B.sig.renamed(q.B.sig.relation + "2"), q.B.vars),
    )


def mu_fact(q: Query, fact: Fact) -> Fact:
    s = sjf(q)
    if fact.sig == s.A.sig:
        names = q.A.vars
    elif fact.sig == s.B.sig:
        names = q.B.vars
    else:
        raise ValueError(f"{fact} is neither an {s.A.sig.relation} nor an {s.B.sig.relation} fact")
    return Fact(q.sig, tuple(Tup("p", (Symbol(z), a)) for z, a in zip(names, fact.args)))


def mu_reduce(q: Query, db2: Database) -> Database:
    """Map a database over sjf(q)'s two relations to one over q's relation.

    ``db2`` is certain for sjf(q) iff the image is certain for q, provided q
    is not trivial.
    """
    return Database((mu_fact(q, f) for f in db2.facts), declared=[q.sig])


# ------------------------------------------------------------ classification


class Verdict(str, enum.Enum):
    TRIVIAL = "trivial"
    PTIME_CERT2 = "ptime-cert2"
    CONP_SYNTACTIC = "conp-syntactic"
    TWO_WAY_DETERMINED = "2way-determined"


class TripathStatus(str, enum.Enum):
    FORK = "fork-tripath"
    TRIANGLE_ONLY = "triangle-only"
    NONE_FOUND = "no-tripath-found"


@dataclass
class Classification:
    query: Query
    verdict: Verdict
    confidence: str = "conclusive"
    reduced_atom: object = None
    orientation: Optional[str] = None
    status: Optional[TripathStatus] = None
    witness: Optional["Tripath"] = None
    fork_search_exhaustive: Optional[bool] = None
    search_exhaustive: Optional[bool] = None
    notes: list = field(default_factory=list)

    @property
    def complexity(self) -> str:
        if self.verdict in (Verdict.TRIVIAL, Verdict.PTIME_CERT2):
            return "PTIME"
        if self.verdict is Verdict.CONP_SYNTACTIC or self.status is TripathStatus.FORK:
            return "coNP-complete"
        return "PTIME" if self.confidence == "conclusive" else "PTIME (bounded tripath search)"

    def describe(self) -> str:
        if self.verdict is Verdict.TRIVIAL:
            return f"PTIME (trivial, equivalent to {self.reduced_atom})"
        if self.verdict is Verdict.CONP_SYNTACTIC:
            return "coNP-complete (syntactic conditions on sjf(q))"
        if self.verdict is Verdict.PTIME_CERT2:
            return f"PTIME (cert_2 applies, orientation {self.orientation})"
        n = len(self.witness.blocks) if self.witness is not None else 0
        if self.status is TripathStatus.FORK:
            return f"coNP-complete (fork-tripath found, {n} blocks)"
        tag = "" if self.confidence == "conclusive" else ", bounded search"
        if self.status is TripathStatus.TRIANGLE_ONLY:
            return f"PTIME (triangle-tripath only, {n} blocks; Cqk or not-Matching{tag})"
        return f"PTIME (no tripath; Cqk{tag})"

    def to_json(self) -> dict:
        out = {
            "query": str(self.query),
            "verdict": self.verdict.value,
            "complexity": self.complexity,
            "confidence": self.confidence,
            "description": self.describe(),
        }
        if self.reduced_atom is not None:
            out["reduced_atom"] = str(self.reduced_atom)
        if self.orientation:
            out["orientation"] = self.orientation
        if self.status is not None:
            out["tripath_status"] = self.status.value
            out["fork_search_exhaustive"] = self.fork_search_exhaustive
            out["search_exhaustive"] = self.search_exhaustive
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def classify(q: Query, budget: "SearchBudget | None" = None) -> Classification:
    from .tripath import SearchBudget, SearchStatus, search_tripath

    reduced = is_trivial(q)
    if reduced is not None:
        if reduced == UNSATISFIABLE:
            raise AssertionError("unification of two variable atoms cannot fail")
        return Classification(q, Verdict.TRIVIAL, reduced_atom=reduced)
    if syntactic_conp(q):
        return Classification(q, Verdict.CONP_SYNTACTIC)
    orient = cert2_applicable(q)
    if orient is not None:
        return Classification(q, Verdict.PTIME_CERT2, orientation=orient)
    assert is_2way_determined(q), f"{q} fell through every syntactic class"

    budget = budget or SearchBudget.default(q)
    fork = search_tripath(q, budget, kind="fork")
    if fork.status is SearchStatus.FOUND:
        return Classification(
            q, Verdict.TWO_WAY_DETERMINED, status=TripathStatus.FORK, witness=fork.tripath,
            fork_search_exhaustive=False, search_exhaustive=False,
        )
    fork_done = fork.status is SearchStatus.EXHAUSTED
    notes = [f"fork search: {fork.status.value}" + (" (node limit hit)" if fork.truncated else "")]
    tri = search_tripath(q, budget, kind="triangle")
    notes.append(f"triangle search: {tri.status.value}" + (" (node limit hit)" if tri.truncated else ""))
    if tri.status is SearchStatus.FOUND:
        return Classification(
            q, Verdict.TWO_WAY_DETERMINED, status=TripathStatus.TRIANGLE_ONLY, witness=tri.tripath,
            confidence="conclusive" if fork_done else "boundedSearch",
            fork_search_exhaustive=fork_done, search_exhaustive=False, notes=notes,
        )
    done = fork_done and tri.status is SearchStatus.EXHAUSTED
    return Classification(
        q, Verdict.TWO_WAY_DETERMINED, status=TripathStatus.NONE_FOUND,
        confidence="conclusive" if done else "boundedSearch",
        fork_search_exhaustive=fork_done, search_exhaustive=done, notes=notes,
    )
