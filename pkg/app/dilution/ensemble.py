"""Replicate ensembles of the dilution model and their CSV report."""
from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Tuple

import numpy as np

from app.core.errors import DomainError, StorageError
from app.core.types import FloatArray, IntArray
from app.schedule import RewardSchedule, reward_path, schedule_to_dict
from app.urn.engine import snapshot_times
from app.urn.ensemble import DEFAULT_BATCH_SIZE, run_batches
from app.urn.models import ABSORPTION_TOLERANCE, EnsembleSummary, sequential_total

from .expectation import expected_share_factors

LOGGER = logging.getLogger("stake_lab.dilution")


@dataclass(frozen=True, slots=True)
class DynExperiment:
    incumbents: Tuple[float, ...]
    theta: float
    schedule: RewardSchedule
    horizon: int
    tracked: Tuple[int, ...] = (0,)
    stride: int = 1

    def __post_init__(self) -> None:
        if not self.incumbents or any(not c > 0 for c in self.incumbents):
            raise DomainError("incumbent coins must be positive")
        if not self.theta >= 0:
            raise DomainError("theta must be non-negative")
        if self.horizon < 0 or self.stride < 1:
            raise DomainError("horizon must be >= 0 and stride >= 1")
        if any(not 0 <= k < len(self.incumbents) for k in self.tracked):
            raise DomainError(f"tracked indices {self.tracked} out of range")

    @property
    def supply(self) -> float:
        return sequential_total(self.incumbents)

    def initial_shares(self) -> FloatArray:
        return np.array([self.incumbents[k] / self.supply for k in self.tracked])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "incumbents": list(self.incumbents),
            "theta": self.theta,
            "schedule": schedule_to_dict(self.schedule),
            "horizon": self.horizon,
            "tracked": list(self.tracked),
            "stride": self.stride,
        }


def dyn_ensemble(
    config: DynExperiment,
    replicates: int,
    master_seed: int,
    *,
    threads: int = 1,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> EnsembleSummary:
    """Ensemble with incumbent share paths and the aggregate new-investor share."""

    started = time.perf_counter()
    path = reward_path(config.schedule, config.supply, config.horizon)
    times = snapshot_times(path.horizon, config.stride)
    batch = run_batches(
        replicates=replicates,
        master_seed=master_seed,
        initial_coins=config.incumbents,
        rewards=path.rewards,
        times=times,
        tracked=config.tracked,
        theta=config.theta,
        threads=threads,
        batch_size=batch_size,
    )
    absorbed = int((batch.terminal.max(axis=1) > 1.0 - ABSORPTION_TOLERANCE).sum())
    summary = EnsembleSummary(
        replicates=replicates,
        master_seed=master_seed,
        times=np.asarray(times, dtype=np.int64),
        tracked=config.tracked,
        initial_shares=config.initial_shares(),
        snapshots=batch.snapshots,
        terminal=batch.terminal,
        truncated=path.truncated,
        truncated_count=replicates if path.truncated else 0,
        absorbed_count=absorbed,
        pool_snapshots=batch.pool_snapshots,
        metadata={"horizon_reached": path.horizon, "supply": config.supply, "theta": config.theta},
    )
    LOGGER.info(
        "Dilution ensemble finished",
        extra={
            "replicates": replicates,
            "theta": config.theta,
            "horizon_reached": path.horizon,
            "elapsed_sec": round(time.perf_counter() - started, 3),
        },
    )
    return summary


@dataclass(frozen=True, slots=True)
class DilutionReport:
    """Mean incumbent shares against the product prediction, per snapshot."""

    times: IntArray
    mean_shares: FloatArray
    standard_errors: FloatArray
    predicted: FloatArray
    newcomer_mean: FloatArray

    def max_excess_in_se(self) -> float:
        """Largest rise of the mean share above its running minimum, in standard errors."""

        running = np.minimum.accumulate(self.mean_shares, axis=0)
        se = np.maximum(self.standard_errors, np.finfo(np.float64).tiny)
        return float(((self.mean_shares - running) / se).max())

    def max_deviation_in_se(self) -> float:
        se = np.maximum(self.standard_errors, np.finfo(np.float64).tiny)
        return float((np.abs(self.mean_shares - self.predicted) / se)[1:].max(initial=0.0))

    def to_csv(self, path: Path) -> Path:
        """Write t, mean share and predicted mean per incumbent, and the aggregate new share."""

        tracked = self.mean_shares.shape[1]
        fieldnames = ["t"]
        for k in range(tracked):
            fieldnames += [f"mean_share_{k}", f"predicted_{k}"]
        fieldnames.append("newcomer_share")
        try:
            with path.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\r\n")
                writer.writerow(fieldnames)
                for i, t in enumerate(self.times):
                    row = [int(t)]
                    for k in range(tracked):
                        row += [format(self.mean_shares[i, k], ".17g"), format(self.predicted[i, k], ".17g")]
                    row.append(format(self.newcomer_mean[i], ".17g"))
                    writer.writerow(row)
        except OSError as exc:  # pragma: no cover
            raise StorageError(f"Failed to write dilution report: {exc}") from exc
        return path


def dilution_report(summary: EnsembleSummary, config: DynExperiment) -> DilutionReport:
    if summary.pool_snapshots is None:
        raise DomainError("ensemble carries no new-investor share")
    factors = expected_share_factors(config.schedule, config.supply, config.theta, int(summary.times[-1]))
    predicted = factors[summary.times][:, np.newaxis] * summary.initial_shares[np.newaxis, :]
    return DilutionReport(
        times=summary.times,
        mean_shares=summary.mean_path(),
        standard_errors=summary.standard_error_path(),
        predicted=predicted,
        newcomer_mean=summary.pool_snapshots.mean(axis=0),
    )


__all__ = ["DilutionReport", "DynExperiment", "dilution_report", "dyn_ensemble"]
