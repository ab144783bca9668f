"""Ground data: elements, facts, databases, blocks and repairs.

Database file format (one fact per line)::

    @sig R 2 1
    R(a|b)        # key part before the bar
    R(<x:C1,s>|a) # tuple elements nest

A two-relation file simply carries one ``@sig`` line per relation.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class RepairCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Symbol:
    name: str

    def __str__(self) -> str:
        return self.name

    def __lt__(self, other: "Element") -> bool:
        return str(self) < str(other)


@dataclass(frozen=True)
class Tup:
    """A tagged tuple element, written ``<tag:e1,e2>``."""

    tag: str
    children: tuple = ()

    @cached_property
    def _text(self) -> str:
        return f"<{self.tag}:{','.join(map(str, self.children))}>"

    def __str__(self) -> str:
        return self._text

    def __lt__(self, other: "Element") -> bool:
        return str(self) < str(other)


Element = Union[Symbol, Tup]

_IDENT = re.compile(r"[A-Za-z0-9_]+")


def sym(name: str) -> Symbol:
    return Symbol(name)


def tup(tag: str, *children) -> Tup:
    return Tup(tag, tuple(c if isinstance(c, (Symbol, Tup)) else Symbol(str(c)) for c in children))


@dataclass(frozen=True)
class Signature:
    relation: str
    arity: int
    key_len: int

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError(f"arity must be >= 1, got {self.arity}")
        if not 0 <= self.key_len <= self.arity:
            raise ValueError(f"key length {self.key_len} outside [0, {self.arity}]")

    def renamed(self, relation: str) -> "Signature":
        return Signature(relation, self.arity, self.key_len)

    def header(self) -> str:
        return f"@sig {self.relation} {self.arity} {self.key_len}"


@dataclass(frozen=True)
class Fact:
    sig: Signature
    args: tuple

    def __post_init__(self):
        if len(self.args) != self.sig.arity:
            raise ValueError(
                f"{self.sig.relation} has arity {self.sig.arity}, got {len(self.args)} arguments"
            )

    @property
    def key_tuple(self) -> tuple:
        return self.args[: self.sig.key_len]

    @property
    def block_id(self) -> tuple:
        return (self.sig.relation, self.args[: self.sig.key_len])

    @property
    def key(self) -> frozenset:
        return frozenset(self.key_tuple)

    @property
    def adom(self) -> frozenset:
        return frozenset(self.args)

    @cached_property
    def _text(self) -> str:
        l = self.sig.key_len
        head = ",".join(map(str, self.args[:l]))
        tail = ",".join(map(str, self.args[l:]))
        return f"{self.sig.relation}({head}|{tail})"

    def __str__(self) -> str:
        return self._text

    def __lt__(self, other: "Fact") -> bool:
        return str(self) < str(other)


def make_fact(sig: Signature, *args) -> Fact:
    """Build a fact, turning plain strings/ints into symbols."""
    return Fact(sig, tuple(a if isinstance(a, (Symbol, Tup)) else Symbol(str(a)) for a in args))


def key_equal(a: Fact, b: Fact) -> bool:
    if a.sig != b.sig:
        raise ValueError(f"signature mismatch: {a.sig} vs {b.sig}")
    return a.key_tuple == b.key_tuple


class Database:
    """An immutable finite set of facts together with its partition into blocks."""

    def __init__(self, facts: Iterable[Fact] = (), declared: Sequence[Signature] = ()):
        self.facts = frozenset(facts)
        self.declared = tuple(sorted(set(declared) | {f.sig for f in self.facts}, key=lambda s: s.relation))
        index: dict[tuple, list[Fact]] = {}
        for f in self.facts:
            index.setdefault(f.block_id, []).append(f)
        order = sorted(index, key=lambda bid: (bid[0], tuple(map(str, bid[1]))))
        self.blocks: list[tuple[Fact, ...]] = [tuple(sorted(index[b])) for b in order]
        self.block_ids: list[tuple] = order
        self._block_pos = {bid: i for i, bid in enumerate(order)}

    def __iter__(self) -> Iterator[Fact]:
        return iter(self.sorted_facts)

    def __len__(self) -> int:
        return len(self.facts)

    def __contains__(self, fact) -> bool:
        return fact in self.facts

    def __eq__(self, other) -> bool:
        return isinstance(other, Database) and self.facts == other.facts

    def __hash__(self) -> int:
        return hash(self.facts)

    def __repr__(self) -> str:
        return f"Database({len(self.facts)} facts, {len(self.blocks)} blocks)"

    def __or__(self, other: "Database") -> "Database":
        return Database(self.facts | other.facts, declared=self.declared + other.declared)

    @cached_property
    def sorted_facts(self) -> list[Fact]:
        return [f for blk in self.blocks for f in blk]

    @property
    def signatures(self) -> set[Signature]:
        return {f.sig for f in self.facts}

    def block_index(self, fact: Fact) -> int:
        return self._block_pos[fact.block_id]

    def block_of(self, fact: Fact) -> tuple[Fact, ...]:
        return self.blocks[self._block_pos[fact.block_id]]

    def is_consistent(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def restrict(self, facts: Iterable[Fact]) -> "Database":
        return Database(facts, declared=self.declared)


@dataclass(frozen=True)
class Repair:
    """One fact per block, stored as per-block choice indices into ``database.blocks``."""

    database: Database
    choice: tuple

    @property
    def facts(self) -> list[Fact]:
        return [blk[i] for blk, i in zip(self.database.blocks, self.choice)]

    def __iter__(self):
        return iter(self.facts)

    def __contains__(self, fact: Fact) -> bool:
        b = self.database.block_index(fact)
        return self.database.blocks[b][self.choice[b]] == fact

    def replace(self, a: Fact, a2: Fact) -> "Repair":
        """``r[a -> a2]``; ``a2`` must be key-equal to ``a``."""
        if a.block_id != a2.block_id:
            raise ValueError(f"{a2} is not key-equal to {a}")
        b = self.database.block_index(a2)
        choice = list(self.choice)
        choice[b] = self.database.blocks[b].index(a2)
        return Repair(self.database, tuple(choice))

    def as_database(self) -> Database:
        return Database(self.facts)


def count_repairs(db: Database) -> int:
    return math.prod(len(b) for b in db.blocks)


def enumerate_repairs(db: Database, cap: int | None = None) -> Iterator[Repair]:
    """All repairs in odometer order (last block varies fastest)."""
    if cap is not None and count_repairs(db) > cap:
        raise RepairCapExceeded(f"{count_repairs(db)} repairs exceed cap {cap}")
    sizes = [len(b) for b in db.blocks]
    choice = [0] * len(sizes)
    while True:
        yield Repair(db, tuple(choice))
        i = len(sizes) - 1
        while i >= 0:
            choice[i] += 1
            if choice[i] < sizes[i]:
                break
            choice[i] = 0
            i -= 1
        if i < 0:
            return


# ---------------------------------------------------------------- text format


class _Reader:
    def __init__(self, text: str, line: int | None):
        self.text = text
        self.pos = 0
        self.line = line

    def fail(self, msg: str):
        raise ParseError(f"{msg} at column {self.pos + 1} in {self.text!r}", self.line)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.fail(f"expected {ch!r}")
        self.pos += 1

    def ident(self) -> str:
        self.skip_ws()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            self.fail("expected identifier")
        self.pos = m.end()
        return m.group()

    def element(self) -> Element:
        if self.peek() == "<":
            self.pos += 1
            tag = self.ident()
            self.expect(":")
            children = []
            if self.peek() != ">":
                children.append(self.element())
                while self.peek() == ",":
                    self.pos += 1
                    children.append(self.element())
            self.expect(">")
            return Tup(tag, tuple(children))
        return Symbol(self.ident())

    def element_list(self, stop: str) -> list[Element]:
        out: list[Element] = []
        if self.peek() == stop:
            return out
        out.append(self.element())
        while self.peek() == ",":
            self.pos += 1
            out.append(self.element())
        return out


def parse_element(text: str) -> Element:
    r = _Reader(text, None)
    e = r.element()
    if r.peek():
        r.fail("trailing input")
    return e


def _parse_fact(text: str, sigs: dict[str, Signature], line: int | None) -> Fact:
    r = _Reader(text, line)
    rel = r.ident()
    if rel not in sigs:
        raise ParseError(f"relation {rel!r} has no @sig header", line)
    sig = sigs[rel]
    r.expect("(")
    key = r.element_list("|")
    r.expect("|")
    rest = r.element_list(")")
    r.expect(")")
    if r.peek():
        r.fail("trailing input")
    if len(key) != sig.key_len:
        raise ParseError(f"{rel} expects {sig.key_len} key elements, got {len(key)}", line)
    if len(key) + len(rest) != sig.arity:
        raise ParseError(f"{rel} expects arity {sig.arity}, got {len(key) + len(rest)}", line)
    return Fact(sig, tuple(key + rest))


def parse_header(line: str, lineno: int | None = None) -> Signature:
    parts = line.split()
    if len(parts) != 4 or parts[0] != "@sig":
        raise ParseError(f"malformed header {line!r}, expected '@sig R k l'", lineno)
    try:
        return Signature(parts[1], int(parts[2]), int(parts[3]))
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_database(text: str) -> Database:
    sigs: dict[str, Signature] = {}
    facts = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.startswith("@sig"):
            sig = parse_header(line, n)
            if sig.relation in sigs and sigs[sig.relation] != sig:
                raise ParseError(f"conflicting headers for {sig.relation}", n)
            sigs[sig.relation] = sig
            continue
        if not sigs:
            raise ParseError("fact before any '@sig' header", n)
        facts.append(_parse_fact(line, sigs, n))
    if not sigs:
        raise ParseError("missing '@sig R k l' header")
    return Database(facts, declared=sigs.values())


def parse_fact(text: str, sig: Signature) -> Fact:
    return _parse_fact(text.strip(), {sig.relation: sig}, None)


def serialize_database(db: Database, sigs: Sequence[Signature] | None = None, comments: Sequence[str] = ()) -> str:
    """Canonical text: headers sorted by relation, then facts in block order."""
    if sigs is None:
        sigs = db.declared
    lines = [f"# {c}" for c in comments]
    lines += [s.header() for s in sigs]
    lines += [str(f) for f in db]
    return "\n".join(lines) + "\n"
