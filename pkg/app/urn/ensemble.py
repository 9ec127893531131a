"""Replicate ensembles of the finite urn.

Replicates are split into fixed-size batches whose composition depends only on
the replicate count, batches run on a joblib thread pool, and results are
concatenated in batch order. Output is therefore identical for any number of
threads.
"""
from __future__ import annotations

import logging
import time
from typing import List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from app.core.errors import DomainError
from app.core.seeding import replicate_seeds
from app.schedule import reward_path

from .engine import BatchResult, run_batch, snapshot_times
from .models import ABSORPTION_TOLERANCE, EnsembleSummary, UrnExperiment

logger = logging.getLogger("stake_lab.urn")

DEFAULT_BATCH_SIZE = 1024


def batch_ranges(replicates: int, batch_size: int) -> List[range]:
    return [range(start, min(start + batch_size, replicates)) for start in range(0, replicates, batch_size)]


def run_batches(
    *,
    replicates: int,
    master_seed: int,
    initial_coins: Sequence[float],
    rewards: np.ndarray,
    times: Sequence[int],
    tracked: Sequence[int],
    theta: Optional[float] = None,
    threads: int = 1,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> BatchResult:
    """Run all replicates in deterministic batches and stack the results."""

    if replicates < 1:
        raise DomainError("replicates must be >= 1")
    if batch_size < 1:
        raise DomainError("batch_size must be >= 1")
    jobs = [
        delayed(run_batch)(
            replicate_seeds(master_seed, chunk.start, len(chunk)),
            initial_coins,
            rewards,
            times,
            tracked,
            theta=theta,
        )
        for chunk in batch_ranges(replicates, batch_size)
    ]
    results: List[BatchResult] = Parallel(n_jobs=max(1, threads), prefer="threads")(jobs)
    pools = [r.pool_snapshots for r in results]
    return BatchResult(
        snapshots=np.concatenate([r.snapshots for r in results], axis=0),
        terminal=np.concatenate([r.terminal for r in results], axis=0),
        pool_snapshots=np.concatenate(pools, axis=0) if theta is not None else None,
    )


def ensemble(
    config: UrnExperiment,
    replicates: int,
    master_seed: int,
    *,
    threads: int = 1,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> EnsembleSummary:
    """Run ``replicates`` independent urns of ``config``.

    Replicate ``i`` uses ``replicate_seed(master_seed, i)``. Overflow of the
    supply truncates every replicate at the same step (the supply path is
    deterministic); it is counted, not raised.
    """

    started = time.perf_counter()
    path = reward_path(config.schedule, config.supply, config.horizon)
    times = snapshot_times(path.horizon, config.stride)
    batch = run_batches(
        replicates=replicates,
        master_seed=master_seed,
        initial_coins=config.initial_coins,
        rewards=path.rewards,
        times=times,
        tracked=config.tracked,
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
        metadata={"horizon_reached": path.horizon, "supply": config.supply},
    )
    logger.info(
        "Ensemble finished",
        extra={
            "replicates": replicates,
            "horizon": config.horizon,
            "horizon_reached": path.horizon,
            "supply": config.supply,
            "absorbed": absorbed,
            "elapsed_sec": round(time.perf_counter() - started, 3),
        },
    )
    return summary


__all__ = ["DEFAULT_BATCH_SIZE", "batch_ranges", "ensemble", "run_batches"]
