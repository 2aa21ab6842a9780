"""Verification records and the machine-readable report.

One record per certified identity, with stable names and field layout so CI
can diff reports between runs.  Serialization is deterministic: keys are
sorted, floats go through repr, and no timestamps or host data are included.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3
EXIT_DEGENERACY = 4


@dataclass
class Record:
    """Outcome of one certified identity."""

    name: str
    identity: str
    residual: float | None
    gate: float | None
    passed: bool
    masked_points: int = 0
    grid_points: int | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "identity": self.identity,
            "residual": self.residual,
            "gate": self.gate,
            "passed": bool(self.passed),
            "masked_points": int(self.masked_points),
            "grid_points": self.grid_points,
            "details": self.details,
        }


@dataclass
class Report:
    """Ordered collection of records plus the config echo."""

    config: dict
    records: list[Record] = field(default_factory=list)
    masked_budget: float = 0.01

    def add(self, record: Record) -> Record:
        self.records.append(record)
        return record

    @property
    def failed(self) -> list[Record]:
        return [r for r in self.records if not r.passed]

    @property
    def budget_exceeded(self) -> list[Record]:
        out = []
        for r in self.records:
            if r.grid_points and r.masked_points / r.grid_points > self.masked_budget:
                out.append(r)
        return out

    @property
    def exit_code(self) -> int:
        if self.budget_exceeded:
            return EXIT_DEGENERACY
        if self.failed:
            return EXIT_VERIFY
        return EXIT_OK

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "masked_budget": self.masked_budget,
            "records": [r.to_dict() for r in self.records],
            "summary": {
                "total": len(self.records),
                "passed": sum(r.passed for r in self.records),
                "failed": len(self.failed),
                "budget_exceeded": [r.name for r in self.budget_exceeded],
                "exit_code": self.exit_code,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = []
        width = max((len(r.name) for r in self.records), default=10)
        for r in self.records:
            status = "PASS" if r.passed else "FAIL"
            res = "-" if r.residual is None else f"{r.residual:.3e}"
            gate = "-" if r.gate is None else f"{r.gate:.3e}"
            masked = f" masked={r.masked_points}" if r.masked_points else ""
            lines.append(f"{status}  {r.name:<{width}}  residual={res:>10}  gate={gate:>10}{masked}")
        summary = self.to_dict()["summary"]
        lines.append(
            f"{summary['passed']}/{summary['total']} records passed; exit code {self.exit_code}"
        )
        return "\n".join(lines) + "\n"
