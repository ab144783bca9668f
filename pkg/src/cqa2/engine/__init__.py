"""Certainty deciders."""
from .decide import METHODS, EngineConfig, decide_certain, q_connected_partition, trivial_certain
from .fixpoint import (
    DeltaBudgetExceeded,
    DeltaTable,
    count_ksets,
    cqk,
    cqk_iterative,
    delta_k,
    delta_k_naive,
    paper_k,
)
from .matching import MatchingReport, certain_by_not_matching, hopcroft_karp, matching, matching_report, matching_repair
from .oracle import exact_certain, falsifies, oracle_certain, sample_falsifying, search_falsifying
from .result import Answer, CertaintyResult

__all__ = [
    "Answer", "CertaintyResult", "DeltaBudgetExceeded", "DeltaTable", "EngineConfig", "METHODS",
    "MatchingReport", "certain_by_not_matching", "count_ksets", "cqk", "cqk_iterative", "decide_certain",
    "delta_k", "delta_k_naive", "exact_certain", "falsifies", "hopcroft_karp", "matching", "matching_report",
    "matching_repair", "oracle_certain", "paper_k", "q_connected_partition", "sample_falsifying", "search_falsifying",
    "trivial_certain",
]
