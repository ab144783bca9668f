"""Consistent query answering for two-atom self-join queries under primary keys."""
from .engine import Answer, CertaintyResult, EngineConfig, decide_certain, oracle_certain
from .kernels import BACKEND
from .model import Database, Fact, ParseError, Repair, Signature, Symbol, Tup, parse_database, serialize_database
from .query import Classification, Query, TripathStatus, Verdict, classify, mu_reduce, parse_query, sjf
from .tripath import SearchBudget, SearchStatus, Tripath, search_tripath, verify_tripath

__version__ = "0.1.0"

__all__ = [
    "Answer", "BACKEND", "CertaintyResult", "Classification", "Database", "EngineConfig", "Fact", "ParseError",
    "Query", "Repair", "SearchBudget", "SearchStatus", "Signature", "Symbol", "Tripath", "TripathStatus", "Tup",
    "Verdict", "classify", "decide_certain", "mu_reduce", "oracle_certain", "parse_database", "parse_query",
    "search_tripath", "serialize_database", "sjf", "verify_tripath",
]
