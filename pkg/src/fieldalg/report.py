"""Machine-readable verdicts for identity sweeps."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

ENGINE_VERSION = "0.1.0"

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass
class CheckReport:
    """Verdict of one identity sweep.

    A fail verdict always carries a witness (the instance plus both
    evaluated sides); an inconclusive verdict states which window was
    insufficient.  `window` records the exactness window actually used.
    """

    identity: str
    swept: dict
    verdict: str
    witness: Optional[dict] = None
    window: Optional[dict] = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict == FAIL and self.witness is None:
            raise ValueError("fail verdict requires a witness")

    @property
    def ok(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "identity": self.identity,
            "swept": self.swept,
            "verdict": self.verdict,
        }
        if self.witness is not None:
            d["witness"] = self.witness
        if self.window is not None:
            d["window"] = self.window
        if self.details:
            d["details"] = self.details
        return d


def merge_verdicts(reports) -> str:
    if any(r.verdict == FAIL for r in reports):
        return FAIL
    if any(r.verdict == INCONCLUSIVE for r in reports):
        return INCONCLUSIVE
    return PASS


@dataclass
class Report:
    """Top-level command report; deterministic for fixed inputs and ranges."""

    command: str
    checks: list[CheckReport] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def add(self, check: CheckReport):
        self.checks.append(check)

    @property
    def verdict(self) -> str:
        return merge_verdicts(self.checks) if self.checks else PASS

    def exit_code(self) -> int:
        v = self.verdict
        return 0 if v == PASS else (1 if v == FAIL else 2)

    def to_dict(self) -> dict:
        return {
            "engine_version": ENGINE_VERSION,
            "command": self.command,
            "verdict": self.verdict,
            "summary": self.summary,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, default=str)

    def to_text(self) -> str:
        lines = [f"# {self.command}  [engine {ENGINE_VERSION}]"]
        for c in self.checks:
            lines.append(f"{c.verdict.upper():12s} {c.identity}  swept={c.swept}")
            if c.witness:
                lines.append(f"  witness: {json.dumps(c.witness, sort_keys=True, default=str)}")
        for k in sorted(self.summary):
            lines.append(f"{k}: {self.summary[k]}")
        lines.append(f"overall: {self.verdict}")
        return "\n".join(lines)
