"""Answers of the certainty deciders."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from ..model import Repair


class Answer(str, enum.Enum):
    CERTAIN = "certain"
    NOT_CERTAIN = "not-certain"
    UNKNOWN = "unknown"


@dataclass
class CertaintyResult:
    """``falsifying_repair`` is always set when the answer is NOT_CERTAIN."""

    answer: Answer
    method: str
    falsifying_repair: Optional[Repair] = None
    k_used: Optional[int] = None
    components: Optional[int] = None
    evidence: dict = field(default_factory=dict)
    timings_ms: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.answer is Answer.NOT_CERTAIN and self.falsifying_repair is None:
            raise ValueError("a not-certain answer needs a falsifying repair")

    @property
    def certain(self) -> Optional[bool]:
        if self.answer is Answer.UNKNOWN:
            return None
        return self.answer is Answer.CERTAIN

    def to_json(self, timings: bool = True) -> dict:
        out: dict = {"answer": self.answer.value, "method": self.method}
        if self.k_used is not None:
            out["k_used"] = self.k_used
        if self.falsifying_repair is not None:
            out["falsifying_repair"] = [str(f) for f in self.falsifying_repair.facts]
        if self.components is not None:
            out["components"] = self.components
        if self.evidence:
            out["evidence"] = self.evidence
        if timings:
            out["timings_ms"] = {k: round(v, 3) for k, v in self.timings_ms.items()}
        return out
