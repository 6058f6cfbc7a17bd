"""Machine-readable pass/fail records for numerical checks."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        # NaN residuals fail
        return bool(self.residual <= self.tolerance)


@dataclass
class VerificationReport:
    d: int
    checks: list[Check] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, name: str, residual: float, tolerance: float, detail: str = "") -> Check:
        c = Check(name, float(residual), float(tolerance), detail)
        self.checks.append(c)
        return c

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "passed": self.passed,
            "checks": [{**asdict(c), "passed": c.passed} for c in self.checks],
            "info": self.info,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        width = max([len(c.name) for c in self.checks] + [5])
        lines = [f"{'check':<{width}}  {'residual':>10}  {'tol':>8}  result"]
        for c in self.checks:
            lines.append(f"{c.name:<{width}}  {c.residual:10.3e}  {c.tolerance:8.1e}  {'PASS' if c.passed else 'FAIL'}")
        return "\n".join(lines)
