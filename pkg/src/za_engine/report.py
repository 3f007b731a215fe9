"""Check reports shared by every verification routine."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field


class PreconditionError(ValueError):
    """Parameters outside the domain where a check is finitely decidable."""


class UnsupportedParameter(PreconditionError):
    pass


@dataclass
class CheckReport:
    name: str
    params: dict
    windows: dict = field(default_factory=dict)
    checked: int = 0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    skipped_reason: str | None = None
    optional: bool = False
    wall_time: float = 0.0

    @property
    def verdict(self) -> str:
        if self.skipped_reason is not None:
            return "skipped"
        return "fail" if self.failures else "pass"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def record(self, ok: bool, **where) -> bool:
        self.checked += 1
        if not ok:
            self.failures.append(where)
        return ok

    @contextmanager
    def timed(self):
        t0 = time.perf_counter()
        try:
            yield self
        finally:
            self.wall_time += time.perf_counter() - t0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "windows": self.windows,
            "verdict": self.verdict,
            "checked": self.checked,
            "failures": self.failures[:20],
            "failure_count": len(self.failures),
            "skipped_reason": self.skipped_reason,
            "optional": self.optional,
            "notes": self.notes,
            "details": self.details,
            "wall_time": round(self.wall_time, 3),
        }

    def summary_line(self) -> str:
        extra = f" ({self.skipped_reason})" if self.skipped_reason else ""
        return f"{self.verdict.upper():7s} {self.name} [{self.checked} identities, {self.wall_time:.1f}s]{extra}"


def skipped(name: str, params: dict, reason: str) -> CheckReport:
    return CheckReport(name, params, skipped_reason=reason)
