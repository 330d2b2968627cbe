"""
Report types: per-check entries, the run report, and its JSON forms.
"""

import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional, TextIO

from .config_loader import RunConfig

logger = logging.getLogger(__name__)

REPORT_VERSION = 1


def _json_default(value: Any) -> Any:
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Enum):
        return value.value
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


class Status(Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"


@dataclass(frozen=True)
class CheckEntry:
    """One named check with its measured value and threshold."""

    name: str
    status: Status
    measured: Any = None
    threshold: Any = None
    witness: Optional[Dict[str, Any]] = None
    note: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    @classmethod
    def at_most(cls, name: str, measured: float, threshold: float, **extra: Any) -> "CheckEntry":
        """PASS when measured <= threshold."""
        status = Status.PASS if measured <= threshold else Status.FAIL
        return cls(name, status, float(measured), threshold, **extra)

    @classmethod
    def expect(cls, name: str, measured: Any, expected: Any, **extra: Any) -> "CheckEntry":
        """PASS when measured == expected."""
        status = Status.PASS if measured == expected else Status.FAIL
        return cls(name, status, measured, expected, **extra)

    @classmethod
    def skipped(cls, name: str, reason: str) -> "CheckEntry":
        return cls(name, Status.SKIPPED, note=reason)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"name": self.name, "status": self.status.value}
        if self.measured is not None:
            data["measured"] = self.measured
        if self.threshold is not None:
            data["threshold"] = self.threshold
        if self.witness is not None:
            data["witness"] = self.witness
        if self.note is not None:
            data["note"] = self.note
        return data

    def summary_line(self) -> str:
        line = f"[{self.status.value:7}] {self.name}"
        if self.measured is not None:
            line += f": {self.measured}"
            if self.threshold is not None:
                line += f" (threshold {self.threshold})"
        if self.note:
            line += f" - {self.note}"
        return line


@dataclass
class Report:
    """The outcome of one command; overall PASS iff every entry is PASS."""

    command: str
    config: RunConfig
    entries: List[CheckEntry] = field(default_factory=list)
    generated_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )

    def add(self, entry: CheckEntry):
        logger.debug(entry.summary_line())
        self.entries.append(entry)

    def extend(self, entries: List[CheckEntry]):
        for entry in entries:
            self.add(entry)

    @property
    def overall(self) -> Status:
        if self.entries and all(e.passed for e in self.entries):
            return Status.PASS
        return Status.FAIL

    @property
    def exit_code(self) -> int:
        return 0 if self.overall is Status.PASS else 1

    def body(self) -> Dict[str, Any]:
        return {
            "report_version": REPORT_VERSION,
            "command": self.command,
            "config": self.config.to_dict(),
            "entries": [e.to_dict() for e in self.entries],
            "overall": self.overall.value,
        }

    def to_dict(self) -> Dict[str, Any]:
        data = self.body()
        data["generated_at"] = self.generated_at
        return data

    def body_json(self) -> str:
        """Deterministic JSON without the timestamp."""
        return json.dumps(self.body(), indent=2, sort_keys=True, default=_json_default)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_json_default)

    def write(self, stream: TextIO):
        stream.write(self.to_json() + "\n")

    def summary(self) -> str:
        lines = [f"{self.command}:"]
        lines.extend("  " + e.summary_line() for e in self.entries)
        passed = sum(e.passed for e in self.entries)
        lines.append(f"overall {self.overall.value} ({passed}/{len(self.entries)} checks passed)")
        return "\n".join(lines)
