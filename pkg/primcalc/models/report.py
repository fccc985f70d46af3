"""
Structured check reports shared by every verifying operation.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional


class CheckStatus(Enum):
    """Outcome of a single check."""
    PASS = "pass"
    FAIL = "fail"
    FAILED = "failed"          # verification of a computed value did not hold
    UNSUPPORTED = "unsupported"


@dataclass
class Check:
    """One named check with an optional numeric value and witness."""
    name: str
    status: CheckStatus
    value: Any = None
    tolerance: Optional[float] = None
    witness: Any = None
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        data = {
            'name': self.name,
            'value': jsonable(self.value),
            'tolerance': self.tolerance,
            'pass': self.passed,
            'status': self.status.value,
        }
        if self.witness is not None:
            data['witness'] = jsonable(self.witness)
        if self.message:
            data['message'] = self.message
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Check':
        """Create from dictionary."""
        status = data.get('status') or ('pass' if data.get('pass') else 'fail')
        return cls(
            name=data.get('name', ''),
            status=CheckStatus(status),
            value=data.get('value'),
            tolerance=data.get('tolerance'),
            witness=data.get('witness'),
            message=data.get('message', ''),
        )


@dataclass
class Report:
    """A named collection of checks."""
    name: str
    checks: List[Check] = field(default_factory=list)
    notes: Dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, ok: bool, value: Any = None, witness: Any = None,
            tolerance: Optional[float] = None, message: str = "") -> Check:
        check = Check(
            name=name,
            status=CheckStatus.PASS if ok else CheckStatus.FAIL,
            value=value,
            tolerance=tolerance,
            witness=witness,
            message=message,
        )
        self.checks.append(check)
        return check

    def extend(self, other: 'Report', prefix: str = "") -> None:
        for check in other.checks:
            if prefix:
                check = Check(f"{prefix}{check.name}", check.status, check.value,
                              check.tolerance, check.witness, check.message)
            self.checks.append(check)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def unsupported(self) -> bool:
        return any(c.status is CheckStatus.UNSUPPORTED for c in self.checks)

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            'name': self.name,
            'pass': self.passed,
            'checks': [c.to_dict() for c in self.checks],
            'notes': jsonable(self.notes),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Report':
        """Create from dictionary."""
        return cls(
            name=data.get('name', ''),
            checks=[Check.from_dict(c) for c in data.get('checks', [])],
            notes=data.get('notes', {}),
        )


def jsonable(value: Any) -> Any:
    """Best-effort conversion of check payloads to JSON-friendly values."""
    from fractions import Fraction

    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in value]
        return sorted(items, key=repr) if isinstance(value, (set, frozenset)) else items
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    return str(value)
