"""Check records and verification reports.

A report is a flat list of :class:`CheckRecord` plus a summary derived from
it.  JSON is the single serialization; the text summary is rendered from the
same data.  Apart from ``wall_time`` fields, the serialized report is a pure
function of its records and configuration echo.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Any, Iterator

import numpy as np

SCHEMA_VERSION = 1
TIMING_KEYS = frozenset({"wall_time", "total_wall_time"})


def _jsonable(value: Any) -> Any:
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if hasattr(value, "to_dict"):
        return _jsonable(value.to_dict())
    return value


def digest(*inputs: Any) -> str:
    """Stable short hash of arbitrary (complex-aware) inputs."""
    blob = json.dumps(_jsonable(list(inputs)), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class CheckRecord:
    """One executed check.

    ``residual`` is the normalized residual ``|value| / scale``.  For an
    identity the check passes when ``residual <= tolerance``; for a negative
    control (``control=True``) it passes when the residual exceeds it.
    """

    name: str
    anchor: str
    fingerprint: str
    inputs_digest: str
    scale: float
    residual: float
    tolerance: float
    control: bool = False
    seed: int | None = None
    detail: str = ""
    wall_time: float = 0.0
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        self.scale = float(self.scale)
        self.residual = float(self.residual)
        finite = math.isfinite(self.residual)
        if self.control:
            self.passed = (not finite) or self.residual > self.tolerance
        else:
            self.passed = finite and self.residual <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        for key in ("scale", "residual"):
            if not math.isfinite(data[key]):
                data[key] = repr(data[key])
        return data


@contextmanager
def timed() -> Iterator[list[float]]:
    """Context manager yielding a one-element list that receives elapsed seconds."""
    box = [0.0]
    start = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = time.perf_counter() - start


def normalized(value: complex | float, scale: float) -> float:
    """``|value| / scale`` guarded against a vanishing scale."""
    scale = float(scale)
    if scale <= 0 or not math.isfinite(scale):
        return math.inf if abs(value) > 0 else 0.0
    return float(abs(value)) / scale


@dataclass
class VerificationReport:
    records: list[CheckRecord] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)
    tool_version: str = ""
    total_wall_time: float = 0.0

    def add(self, record: CheckRecord) -> CheckRecord:
        self.records.append(record)
        return record

    def extend(self, other: "VerificationReport") -> None:
        self.records.extend(other.records)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def max_residual(self, name: str | None = None, control: bool = False) -> float:
        values = [
            r.residual
            for r in self.records
            if r.control == control and (name is None or r.name == name)
        ]
        return max(values, default=0.0)

    def summary(self) -> dict[str, Any]:
        by_name: dict[str, dict[str, Any]] = {}
        for r in self.records:
            entry = by_name.setdefault(
                r.name, {"count": 0, "passed": 0, "failed": 0, "max_residual": 0.0}
            )
            entry["count"] += 1
            entry["passed" if r.passed else "failed"] += 1
            if math.isfinite(r.residual):
                entry["max_residual"] = max(entry["max_residual"], r.residual)
            else:
                entry["max_residual"] = repr(r.residual)
        passed = sum(r.passed for r in self.records)
        return {
            "total": len(self.records),
            "passed": passed,
            "failed": len(self.records) - passed,
            "checks": dict(sorted(by_name.items())),
        }

    def to_dict(self, include_timing: bool = True) -> dict[str, Any]:
        data = {
            "schema": SCHEMA_VERSION,
            "tool_version": self.tool_version,
            "config": _jsonable(self.config),
            "summary": self.summary(),
            "records": [r.to_dict() for r in self.records],
            "total_wall_time": self.total_wall_time,
        }
        return data if include_timing else strip_timing(data)

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=1) + "\n"

    def write(self, path: str) -> None:
        """Write the JSON report atomically (temp file then rename)."""
        directory = os.path.dirname(os.path.abspath(path)) or "."
        fd, tmp = tempfile.mkstemp(prefix=".report-", dir=directory)
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(self.to_json())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def render_text(self) -> str:
        summary = self.summary()
        lines = [
            f"{'check':<34} {'count':>6} {'failed':>6} {'max residual':>14}",
        ]
        for name, entry in summary["checks"].items():
            mr = entry["max_residual"]
            mr_text = f"{mr:14.3e}" if isinstance(mr, float) else f"{mr:>14}"
            lines.append(f"{name:<34} {entry['count']:>6} {entry['failed']:>6} {mr_text}")
        lines.append(
            f"total {summary['total']} checks, {summary['passed']} passed, "
            f"{summary['failed']} failed"
        )
        return "\n".join(lines)


def strip_timing(data: Any) -> Any:
    """Recursively drop timing fields from a report dictionary."""
    if isinstance(data, dict):
        return {k: strip_timing(v) for k, v in data.items() if k not in TIMING_KEYS}
    if isinstance(data, list):
        return [strip_timing(v) for v in data]
    return data
