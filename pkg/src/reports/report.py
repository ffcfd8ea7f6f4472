from enum import Enum
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


class Status(Enum):
    PASS = "pass"
    FAIL = "fail"


class Relation(Enum):
    BELOW = "<"
    AT_LEAST = ">="
    HOLDS = "holds"
    NON_INCREASING = "non-increasing"


@dataclass(frozen=True)
class CheckResult:
    """
    One named check: the measured value against its tolerance.
    """

    name: str
    passed: bool
    measured: Any
    tolerance: Any = None
    relation: Relation = Relation.HOLDS
    detail: str = ""

    @classmethod
    def below(cls, name: str, measured: float, tolerance: float, detail: str = "") -> "CheckResult":
        value = float(measured)
        return cls(name, bool(value < tolerance), value, tolerance, Relation.BELOW, detail)

    @classmethod
    def at_least(cls, name: str, measured: float, bound: float, detail: str = "") -> "CheckResult":
        value = float(measured)
        return cls(name, bool(value >= bound), value, bound, Relation.AT_LEAST, detail)

    @classmethod
    def holds(cls, name: str, condition: bool, measured: Any = None, detail: str = "") -> "CheckResult":
        return cls(name, bool(condition), measured, None, Relation.HOLDS, detail)

    @classmethod
    def non_increasing(
        cls, name: str, values: List[float], slack: float = 0.0, detail: str = ""
    ) -> "CheckResult":
        values = [float(v) for v in values]
        ok = all(b <= a + slack for a, b in zip(values, values[1:]))
        return cls(name, ok, values, slack, Relation.NON_INCREASING, detail)

    @classmethod
    def failed(cls, name: str, error: Exception) -> "CheckResult":
        return cls(name, False, None, None, Relation.HOLDS, f"{type(error).__name__} - {error}")

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "status": Status.PASS.value if self.passed else Status.FAIL.value,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "relation": self.relation.value,
            "detail": self.detail,
        }


@dataclass
class ReportDocument:
    """
    Result of one command: config echo, checks in execution order, result data
    and the manifest of written files. status is pass iff every check passed.
    """

    command: str
    config: Dict[str, Any]
    checks: List[CheckResult] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    artifacts: List[Dict[str, str]] = field(default_factory=list)
    precision: Optional[int] = None
    total_checks: int = field(init=False)
    total_passed: int = field(init=False)
    pass_rate: str = field(init=False)
    status: Status = field(init=False)

    def __post_init__(self) -> None:
        self.refresh()

    def refresh(self) -> None:
        self.total_checks = len(self.checks)
        self.total_passed = sum(check.passed for check in self.checks)
        self.pass_rate = self._compute_ratio(self.total_passed)
        self.status = self._get_status()

    def _compute_ratio(self, value: int) -> str:
        return f"{(value / self.total_checks * 100):.2f}%" if self.total_checks else "0.00%"

    def _get_status(self) -> Status:
        return Status.PASS if self.total_passed == self.total_checks else Status.FAIL

    def add(self, *checks: CheckResult) -> None:
        self.checks.extend(checks)
        self.refresh()

    def extend(self, checks: List[CheckResult]) -> None:
        self.add(*checks)

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def as_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "status": self.status.value,
            "summary": {
                "total_checks": self.total_checks,
                "total_passed": self.total_passed,
                "pass_rate": self.pass_rate,
            },
            "precision": self.precision,
            "config": self.config,
            "checks": [check.as_dict() for check in self.checks],
            "data": self.data,
            "artifacts": self.artifacts,
        }
