"""Three-valued verdicts and structured verification reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

HOLDS = "Holds"
REFUTED = "Refuted"
UNKNOWN = "Unknown"

CERTIFICATE_KINDS = (
    "dimension",
    "defect",
    "point-spectrum",
    "word-trace",
    "singular-value-product",
)


@dataclass(eq=False)
class Certificate:
    """Reason a relation fails, with enough data to re-check it."""

    kind: str
    detail: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in CERTIFICATE_KINDS:
            raise ValueError(f"unknown certificate kind {self.kind!r}")

    def to_dict(self):
        return {"kind": self.kind, "detail": self.detail}


@dataclass(eq=False)
class OrderVerdict:
    status: str
    relation: str
    witness: np.ndarray | None = None
    certificate: Certificate | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)
    extra_witnesses: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED

    def to_dict(self):
        out = {"relation": self.relation, "status": self.status, "diagnostics": self.diagnostics}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.extra_witnesses:
            out["extra_witnesses"] = self.extra_witnesses
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out


@dataclass(eq=False)
class Check:
    name: str
    passed: bool
    value: Any = None
    threshold: Any = None
    note: str = ""

    def to_dict(self):
        out = {"name": self.name, "passed": bool(self.passed)}
        if self.value is not None:
            out["value"] = self.value
        if self.threshold is not None:
            out["threshold"] = self.threshold
        if self.note:
            out["note"] = self.note
        return out


@dataclass(eq=False)
class Report:
    """Named list of checks; ``applicable`` is False when a hypothesis is missing."""

    name: str
    checks: list[Check] = field(default_factory=list)
    applicable: bool = True
    notes: list[str] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)

    def add(self, name, passed, value=None, threshold=None, note="") -> bool:
        self.checks.append(Check(name, bool(passed), value, threshold, note))
        return bool(passed)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "name": self.name,
            "applicable": self.applicable,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "notes": list(self.notes),
            "data": self.data,
        }


@dataclass(frozen=True)
class Budget:
    """Multi-start search budget; start ``i`` uses seed ``(seed, i)``."""

    starts: int = 32
    max_iter: int = 2000
    seed: int = 0

    def rng(self, start: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, start])

    def to_dict(self):
        return {"starts": self.starts, "max_iter": self.max_iter, "seed": self.seed}
