"""Finite-population time-dependent Pólya urn."""
from .engine import BatchResult, is_absorbed, run_batch, select_index, simulate, snapshot_times, step
from .ensemble import DEFAULT_BATCH_SIZE, batch_ranges, ensemble, run_batches
from .models import EnsembleSummary, Trajectory, UrnExperiment, UrnState, sequential_total

__all__ = [
    "BatchResult",
    "DEFAULT_BATCH_SIZE",
    "EnsembleSummary",
    "Trajectory",
    "UrnExperiment",
    "UrnState",
    "batch_ranges",
    "ensemble",
    "is_absorbed",
    "run_batch",
    "run_batches",
    "select_index",
    "sequential_total",
    "simulate",
    "snapshot_times",
    "step",
]
