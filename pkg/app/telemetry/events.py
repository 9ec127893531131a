"""Structured run records: result manifests and acceptance-check outcomes."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from app import __version__


@dataclass(slots=True)
class RunManifest:
    """Provenance of one result file set, written next to the CSV outputs."""

    name: str
    config_hash: str
    master_seed: int
    replicates: int
    runtime_sec: float
    outputs: List[str] = field(default_factory=list)
    software_version: str = __version__
    created_at: datetime = field(default_factory=lambda: datetime.now(tz=timezone.utc))
    config: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["created_at"] = self.created_at.isoformat()
        return data


@dataclass(slots=True)
class CheckRecord:
    """One acceptance criterion: what was measured against which tolerance."""

    criterion: str
    suite: str
    passed: bool
    measured: Any
    tolerance: Any
    seed: Optional[int] = None
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(slots=True)
class CheckReport:
    """Aggregated check results. Carries no timings, so reruns compare byte for byte."""

    suite: str
    master_seed: int
    records: List[CheckRecord] = field(default_factory=list)
    software_version: str = __version__

    @property
    def passed(self) -> bool:
        return all(record.passed for record in self.records)

    def failures(self) -> List[CheckRecord]:
        return [record for record in self.records if not record.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "master_seed": self.master_seed,
            "software_version": self.software_version,
            "passed": self.passed,
            "records": [record.to_dict() for record in self.records],
        }


__all__ = ["CheckRecord", "CheckReport", "RunManifest"]
