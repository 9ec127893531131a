"""Persisting lab artifacts: estimate tables (CSV), manifests and reports (JSON)."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from app.core.errors import StorageError
from app.telemetry.events import CheckReport, RunManifest


def format_value(value: Any) -> Any:
    """Floats at 17 significant digits, empty cells for missing values."""

    if value is None:
        return ""
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    if hasattr(value, "item"):
        return format_value(value.item())
    return value


class ResultStorage:
    """Write result tables and provenance under one output directory.

    ``ResultStorage`` is created per run by the CLI; the figure runner writes
    one or more CSV tables and finishes with a :class:`RunManifest`, while the
    check runner writes a :class:`CheckReport`.
    """

    def __init__(self, output_dir: Path) -> None:
        self._output_dir = output_dir
        try:
            self._output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:  # pragma: no cover
            raise StorageError(f"Cannot create output directory {output_dir}: {exc}") from exc

    @property
    def output_dir(self) -> Path:
        return self._output_dir

    def path(self, filename: str) -> Path:
        return self._output_dir / filename

    # ------------------------------------------------------------------
    # CSV tables
    # ------------------------------------------------------------------
    def write_table(self, filename: str, fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
        """Write an RFC-4180 CSV with a header row."""

        path = self.path(filename)
        try:
            with path.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.DictWriter(handle, fieldnames=list(fieldnames), lineterminator="\r\n")
                writer.writeheader()
                for row in rows:
                    writer.writerow({key: format_value(row.get(key)) for key in fieldnames})
        except OSError as exc:  # pragma: no cover
            raise StorageError(f"Failed to write {filename}: {exc}") from exc
        return path

    # ------------------------------------------------------------------
    # JSON documents
    # ------------------------------------------------------------------
    def _write_json(self, filename: str, payload: Mapping[str, Any]) -> Path:
        path = self.path(filename)
        try:
            with path.open("w", encoding="utf-8") as handle:
                json.dump(payload, handle, indent=2, sort_keys=True, ensure_ascii=False)
                handle.write("\n")
        except OSError as exc:  # pragma: no cover
            raise StorageError(f"Failed to write {filename}: {exc}") from exc
        return path

    def write_manifest(self, manifest: RunManifest) -> Path:
        return self._write_json(f"{manifest.name}.manifest.json", manifest.to_dict())

    def write_report(self, report: CheckReport) -> Path:
        return self._write_json(f"check_{report.suite}.json", report.to_dict())


__all__ = ["ResultStorage", "format_value"]
