"""Machine-readable outcome of a verification check."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Report:
    check: str
    witnesses: list[str] = field(default_factory=list)
    stages: tuple[int, int] = (0, 0)
    log: list[str] = field(default_factory=list)

    @property
    def status(self) -> str:
        return "fail" if self.witnesses else "pass"

    @property
    def ok(self) -> bool:
        return not self.witnesses

    def fail(self, witness: str) -> None:
        self.witnesses.append(witness)

    def merge(self, other: Report) -> None:
        self.witnesses.extend(f"{other.check}: {w}" for w in other.witnesses)
        self.log.extend(f"{other.check}: {line}" for line in other.log)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "status": self.status,
            "stages": list(self.stages),
            "witnesses": list(self.witnesses),
            "log": list(self.log),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def __str__(self) -> str:
        head = f"{self.check} [{self.stages[0]}..{self.stages[1]}]: {self.status.upper()}"
        return "\n".join([head, *(f"  - {w}" for w in self.witnesses)])
