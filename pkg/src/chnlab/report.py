"""Structured verification results and their JSON form."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass
class SystemSize:
    rows: int = 0
    cols: int = 0
    rank: int = 0

    def __iadd__(self, other: "SystemSize") -> "SystemSize":
        self.rows += other.rows
        self.cols += other.cols
        self.rank += other.rank
        return self


@dataclass
class VerificationReport:
    """Outcome of one check.

    ``system`` describes the linear system that decided the check (for
    operator identities: the residual's shape and rank, so rank 0 means the
    identity holds).  ``details`` carries residual diagnostics.
    """

    check: str
    passed: bool
    mode: str = "exact"
    degree: int = 0
    system: SystemSize = field(default_factory=SystemSize)
    seed: Optional[int] = None
    points: Optional[list] = None
    elapsed_ms: int = 0
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "check": self.check,
            "mode": self.mode,
            "pass": self.passed,
            "degree": self.degree,
            "system": {"rows": self.system.rows, "cols": self.system.cols, "rank": self.system.rank},
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.points is not None:
            out["points"] = self.points
        out["elapsed_ms"] = self.elapsed_ms
        if self.details:
            out["details"] = self.details
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False, default=str)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" seed={self.seed}" if self.seed is not None else ""
        return (
            f"[{status}] {self.check} ({self.mode}{extra}, degree {self.degree}, "
            f"system {self.system.rows}x{self.system.cols} rank {self.system.rank}, "
            f"{self.elapsed_ms} ms)"
        )


def combine(check: str, reports: list[VerificationReport], **details) -> VerificationReport:
    """All-of report built from sub-reports."""
    system = SystemSize()
    for r in reports:
        system += r.system
    modes = {r.mode for r in reports}
    seeds = {r.seed for r in reports if r.seed is not None}
    points = [p for r in reports if r.points for p in r.points]
    out = VerificationReport(
        check=check,
        passed=all(r.passed for r in reports),
        mode="randomized" if "randomized" in modes else "exact",
        degree=max((r.degree for r in reports), default=0),
        system=system,
        seed=seeds.pop() if len(seeds) == 1 else None,
        points=points or None,
        elapsed_ms=sum(r.elapsed_ms for r in reports),
        details={**details, "parts": [{"check": r.check, "pass": r.passed, **r.details} for r in reports]},
    )
    return out


class Stopwatch:
    def __init__(self):
        self.start = time.perf_counter()

    @property
    def ms(self) -> int:
        return int((time.perf_counter() - self.start) * 1000)
