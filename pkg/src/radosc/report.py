"""Machine-readable verification records."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

__all__ = [
    "ReportEntry",
    "VerificationReport",
    "CANONICAL_CATALOGUE",
    "DEFORMED_CATALOGUE",
    "CATALOGUE",
    "SCHEMA_VERSION",
    "artifact_version",
]

SCHEMA_VERSION = 1

# identity family -> short tag. Entry names refine a family, e.g. the family
# "polynomial-products" has entries "poli-forward" and "poli-reverse".
CANONICAL_CATALOGUE = {
    "first-factorization": "factor1",
    "reversed-factorization": "factor2a",
    "shifted-factorization": "factor2b",
    "second-factorization": "bes",
    "second-reversed-factorization": "factor3",
    "first-intertwining": "intertwin1",
    "second-intertwining": "intertwin2",
    "s-operator-forms": "ene",
    "s-ladder-action": "ese",
    "s-intertwining": "eseint",
    "s-h-commutator": "conmuta1",
    "s-products": "ese2",
    "s-commutator": "conmuta2",
}
DEFORMED_CATALOGUE = {
    "complex-factorization": "factor4",
    "deformed-hamiltonian": "factor5b",
    "deformed-intertwining": "intertwin2a",
    "fourth-order-intertwining": "mint",
    "fourth-order-commutator": "conmuta3",
    "polynomial-products": "poli",
    "conjugate-factorization": "factor4-conj",
    "non-adjointness": "products",
}
CATALOGUE = {**CANONICAL_CATALOGUE, **DEFORMED_CATALOGUE}


def artifact_version() -> str:
    from . import __version__

    return __version__


@dataclass(frozen=True)
class ReportEntry:
    """One residual measurement.

    ``comparison`` is ``"le"`` when the entry passes with ``residual <=
    tolerance`` and ``"gt"`` for witnesses that must exceed a threshold.
    """

    name: str
    identity: str
    l: int
    subject: str
    residual: float
    tolerance: float
    metric: str = "relative"
    comparison: str = "le"
    spacing: float = math.nan
    epsilon: Optional[complex] = None

    @property
    def tag(self) -> str:
        return CATALOGUE[self.identity]

    @property
    def group(self) -> str:
        return "canonical" if self.identity in CANONICAL_CATALOGUE else "deformed"

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.residual):
            return False
        if self.comparison == "gt":
            return self.residual > self.tolerance
        return self.residual <= self.tolerance

    def to_dict(self) -> dict:
        eps = None if self.epsilon is None else [self.epsilon.real, self.epsilon.imag]
        return {
            "name": self.name,
            "identity": self.identity,
            "tag": self.tag,
            "group": self.group,
            "l": self.l,
            "subject": self.subject,
            "epsilon": eps,
            "metric": self.metric,
            "comparison": self.comparison,
            "residual": _json_float(self.residual),
            "tolerance": self.tolerance,
            "spacing": _json_float(self.spacing),
            "pass": self.passed,
        }


def _json_float(x: float):
    return x if math.isfinite(x) else None


@dataclass(frozen=True)
class VerificationReport:
    """Ordered residual entries plus free-form notes and the run configuration."""

    entries: tuple = ()
    notes: tuple = ()
    config: dict = field(default_factory=dict)

    def __add__(self, other: "VerificationReport") -> "VerificationReport":
        cfg = {**self.config, **other.config}
        return VerificationReport(self.entries + other.entries, self.notes + other.notes, cfg)

    def with_config(self, config: dict) -> "VerificationReport":
        return replace(self, config=dict(config))

    def with_tolerance(self, tol: float) -> "VerificationReport":
        """Copy with every ``"le"`` tolerance replaced by ``tol``; witnesses keep theirs."""
        return replace(
            self,
            entries=tuple(replace(e, tolerance=tol) if e.comparison == "le" else e for e in self.entries),
        )

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list:
        return [e for e in self.entries if not e.passed]

    def identities(self) -> set:
        return {e.identity for e in self.entries}

    def select(self, *, name: str | None = None, identity: str | None = None, group: str | None = None) -> list:
        out = []
        for e in self.entries:
            if name is not None and e.name != name:
                continue
            if identity is not None and e.identity != identity:
                continue
            if group is not None and e.group != group:
                continue
            out.append(e)
        return out

    def summary(self) -> dict:
        n_pass = sum(e.passed for e in self.entries)
        groups = {}
        for e in self.entries:
            g = groups.setdefault(e.group, {"total": 0, "passed": 0, "failed": 0})
            g["total"] += 1
            g["passed" if e.passed else "failed"] += 1
        return {
            "total": len(self.entries),
            "passed": n_pass,
            "failed": len(self.entries) - n_pass,
            "pass": self.passed,
            "by_group": groups,
        }

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "artifact_version": artifact_version(),
            "config": self.config,
            "catalogue": [{"identity": k, "tag": v} for k, v in CATALOGUE.items()],
            "entries": [e.to_dict() for e in self.entries],
            "notes": list(self.notes),
            "summary": self.summary(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def merge(reports: Iterable[VerificationReport]) -> VerificationReport:
    out = VerificationReport()
    for r in reports:
        out = out + r
    return out
