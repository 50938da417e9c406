from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

WITNESS_CAP = 100


def rational_json(q: Any) -> int | str:
    """An exact rational as an int, or as a "p/q" string."""
    if q.denominator == 1:
        return int(q.numerator)
    return f"{int(q.numerator)}/{int(q.denominator)}"


def to_jsonable(value: Any) -> Any:
    """Convert witnesses and report values into JSON compatible data."""
    if hasattr(value, "to_json"):
        return value.to_json()
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return rational_json(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted((to_jsonable(v) for v in value), key=repr)
    return str(value)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a single exhaustive check, with a witness on failure."""

    name: str
    ok: bool
    witness: Any = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        data: dict = {"ok": self.ok}
        if self.detail:
            data["detail"] = self.detail
        if self.witness is not None:
            witness = to_jsonable(self.witness)
            if isinstance(witness, list) and len(witness) > WITNESS_CAP:
                witness = witness[:WITNESS_CAP] + [{"truncated": len(witness) - WITNESS_CAP}]
            data["witness"] = witness
        return data


def passed(name: str, detail: str = "") -> CheckResult:
    return CheckResult(name=name, ok=True, detail=detail)


def failed(name: str, witness: Any = None, detail: str = "") -> CheckResult:
    return CheckResult(name=name, ok=False, witness=witness, detail=detail)


@dataclass
class Report:
    """An ordered collection of named checks."""

    checks: list[CheckResult] = field(default_factory=list)

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def extend(self, other: Report, prefix: str = "") -> None:
        for check in other.checks:
            name = f"{prefix}{check.name}" if prefix else check.name
            self.checks.append(CheckResult(name, check.ok, check.witness, check.detail))

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)

    def __bool__(self) -> bool:
        return self.ok

    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.ok]

    def get(self, name: str) -> Optional[CheckResult]:
        for check in self.checks:
            if check.name == name:
                return check
        return None

    def to_json(self) -> dict:
        return {check.name: check.to_json() for check in self.checks}
