"""Report records shared by the weight checks and the verification suites."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict
from typing import Any

__all__ = ["InequalityReport", "SuiteReport", "digest_of"]


def digest_of(obj: Any) -> str:
    """Short stable digest of a JSON-serializable description."""
    blob = json.dumps(obj, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class InequalityReport:
    """One verified inequality instance: lhs <= constant-bearing rhs.

    ``ratio`` is lhs/rhs (0 when both sides vanish, inf when only rhs does);
    ``passed`` means lhs <= rhs + tol.
    """

    check: str
    digest: str
    lhs: float
    rhs: float
    constant: float
    constant_provenance: str
    tol: float
    ratio: float = field(init=False)
    passed: bool = field(init=False)
    detail: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.rhs > 0.0:
            self.ratio = self.lhs / self.rhs
        elif self.lhs <= self.tol:
            self.ratio = 0.0
        else:
            self.ratio = math.inf
        self.passed = bool(self.lhs <= self.rhs + self.tol)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


@dataclass
class SuiteReport:
    """A suite's cases plus the aggregate verdict."""

    suite: str
    params: dict
    seed: int
    cases: list

    def summary(self) -> dict:
        ratios = [c.ratio for c in self.cases if math.isfinite(c.ratio)]
        any_inf = any(math.isinf(c.ratio) for c in self.cases)
        max_ratio = math.inf if any_inf else (max(ratios) if ratios else 0.0)
        return {"max_ratio": max_ratio, "pass": all(c.passed for c in self.cases)}

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "params": self.params,
            "seed": self.seed,
            "cases": [c.as_dict() for c in self.cases],
            "summary": self.summary(),
        }
