"""Blackwell-MacQueen feature model with order-of-appearance bookkeeping.

At step t the feature is a fresh draw from the base with probability
N / N_{t-1}; otherwise a past step n < t is picked with probability
R_n / (N_{t-1} - N) and its feature is repeated. Every step consumes one row
(u_select, u_fresh) of uniforms.
"""
from __future__ import annotations

import csv
import logging
import time
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, List, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy import special

from app.core.errors import DomainError, StorageError
from app.core.seeding import generator, replicate_seeds
from app.core.types import FloatArray, IntArray
from app.schedule import RewardSchedule, reward_at, reward_path
from app.urn.ensemble import batch_ranges

from .ledger import AtomLedger, BaseMeasure, DiffuseBase

LOGGER = logging.getLogger("stake_lab.population")

FEATURE_BATCH_SIZE = 32


def bm_predictive_step(
    ledger: AtomLedger,
    base: BaseMeasure,
    s: RewardSchedule,
    t: int,
    u_select: float,
    u_fresh: float,
) -> Tuple[Hashable, AtomLedger]:
    """Draw the feature of step ``t`` and return it with a copy of ``ledger`` crediting R_t to it.

    The input ledger is left untouched.
    """

    if t != ledger.t + 1:
        raise DomainError(f"ledger is at step {ledger.t}, cannot draw step {t}")
    for u in (u_select, u_fresh):
        if not 0.0 <= u < 1.0:
            raise DomainError(f"uniform draws must lie in [0, 1), got {u!r}")
    supply = ledger.supply
    reward = reward_at(s, t, supply)
    y = u_select * supply - ledger.mass
    fresh = y < 0.0 or not ledger.step_atoms
    if fresh:
        feature = base.draw(u_fresh)
    else:
        past = min(bisect_right(ledger.cumulative_rewards, y), t - 2)
        feature = ledger.features[ledger.step_atoms[past]]
    updated = ledger.copy()
    updated.record(feature, reward, fresh=fresh, diffuse=isinstance(base, DiffuseBase))
    return feature, updated


def log_snapshot_times(T: int) -> List[int]:
    """Powers of two up to ``T`` plus both endpoints."""

    if T < 1:
        return []
    times = {1, T}
    power = 2
    while power < T:
        times.add(power)
        power *= 2
    return sorted(times)


def expected_feature_count(theta: float, T: int) -> float:
    """E[K_T] = theta (psi(theta + T) - psi(theta)) under constant reward, theta = N/R."""

    if not theta > 0:
        raise DomainError("theta must be positive")
    if T < 0:
        raise DomainError("T must be non-negative")
    return float(theta * (special.digamma(theta + T) - special.digamma(theta)))


@dataclass(slots=True)
class FeatureRun:
    features: np.ndarray
    fresh: np.ndarray
    ledger: AtomLedger
    k_times: IntArray
    k_values: IntArray
    truncated: bool

    @property
    def horizon(self) -> int:
        return int(self.features.shape[0])

    def k_series(self) -> IntArray:
        steps = np.arange(1, self.horizon + 1)
        return np.searchsorted(np.asarray(self.ledger.first_seen), steps, side="right")

    def to_csv(self, path: Path) -> Path:
        """Write columns step, feature, is_fresh, K_t."""

        k_series = self.k_series()
        try:
            with path.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.DictWriter(handle, fieldnames=["step", "feature", "is_fresh", "K_t"], lineterminator="\r\n")
                writer.writeheader()
                for index in range(self.horizon):
                    feature = self.features[index]
                    writer.writerow(
                        {
                            "step": index + 1,
                            "feature": format(float(feature), ".17g") if self.features.dtype.kind == "f" else int(feature),
                            "is_fresh": int(bool(self.fresh[index])),
                            "K_t": int(k_series[index]),
                        }
                    )
        except OSError as exc:  # pragma: no cover
            raise StorageError(f"Failed to write feature sequence: {exc}") from exc
        return path


def _roots(parent: IntArray) -> IntArray:
    """Follow parent pointers to the fresh step that introduced each feature."""

    root = parent.copy()
    while True:
        nxt = root[root]
        if np.array_equal(nxt, root):
            return root
        root = nxt


def simulate_feature_model(base: BaseMeasure, s: RewardSchedule, T: int, seed: int) -> FeatureRun:
    """Simulate ``T`` steps of the feature model with its own generator.

    Row t - 1 of ``default_rng(seed).random((T, 2))`` drives step t, so
    replaying the rows through :func:`bm_predictive_step` gives the same run.
    """

    if T < 1:
        raise DomainError("T must be >= 1")
    N = base.mass
    uniforms = generator(seed).random((T, 2))
    path = reward_path(s, N, T)
    horizon = path.horizon
    uniforms = uniforms[:horizon]
    rewards = path.rewards
    cumulative = np.cumsum(rewards)
    steps = np.arange(horizon)

    y = uniforms[:, 0] * path.supplies[:horizon] - N
    fresh = y < 0.0
    fresh[:1] = True
    past = np.minimum(np.searchsorted(cumulative, y, side="right"), steps - 1)
    root = _roots(np.where(fresh, steps, past))

    draws = base.draw_many(uniforms[fresh, 1])
    if isinstance(base, DiffuseBase) and np.unique(draws).shape[0] != draws.shape[0]:
        raise DomainError("fresh draws collided; inverse CDF is not atomless")
    by_step = np.zeros(horizon, dtype=draws.dtype)
    by_step[fresh] = draws
    features = by_step[root]

    distinct, first_index, inverse = np.unique(features, return_index=True, return_inverse=True)
    order = np.argsort(first_index, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.shape[0])
    atoms = rank[inverse.reshape(-1)]
    ordered_features = distinct[order].tolist()

    ledger = AtomLedger(
        mass=float(N),
        features=ordered_features,
        first_seen=(np.sort(first_index) + 1).tolist(),
        rewards=np.bincount(atoms, weights=rewards, minlength=order.shape[0]).tolist(),
        counts=np.bincount(atoms, minlength=order.shape[0]).tolist(),
        step_atoms=atoms.tolist(),
        fresh=fresh.tolist(),
        cumulative_rewards=cumulative.tolist(),
        supply=float(path.supplies[horizon]),
        t=horizon,
        _index={feature: j for j, feature in enumerate(ordered_features)},
    )
    new_atom = np.zeros(horizon, dtype=np.int64)
    new_atom[first_index] = 1
    k_all = np.cumsum(new_atom)
    k_times = np.asarray(log_snapshot_times(horizon), dtype=np.int64)
    return FeatureRun(
        features=features,
        fresh=fresh,
        ledger=ledger,
        k_times=k_times,
        k_values=k_all[k_times - 1],
        truncated=path.truncated,
    )


# ----------------------------------------------------------------------
# Ensembles
# ----------------------------------------------------------------------
@dataclass(frozen=True, slots=True)
class FeatureEnsemble:
    """Terminal K_T and first-atom predictive weight per replicate."""

    horizon: int
    feature_counts: IntArray
    first_weights: FloatArray
    k_times: IntArray
    k_paths: IntArray

    def mean_k_over_log(self) -> float:
        return float(self.feature_counts.mean() / np.log(self.horizon))


def _feature_batch(base: BaseMeasure, s: RewardSchedule, T: int, seeds: List[int]) -> List[FeatureRun]:
    return [simulate_feature_model(base, s, T, seed) for seed in seeds]


def feature_ensemble(
    base: BaseMeasure,
    s: RewardSchedule,
    T: int,
    replicates: int,
    master_seed: int,
    *,
    threads: int = 1,
    batch_size: int = FEATURE_BATCH_SIZE,
) -> FeatureEnsemble:
    if replicates < 1:
        raise DomainError("replicates must be >= 1")
    started = time.perf_counter()
    jobs = [
        delayed(_feature_batch)(base, s, T, replicate_seeds(master_seed, chunk.start, len(chunk)))
        for chunk in batch_ranges(replicates, batch_size)
    ]
    runs = [run for batch in Parallel(n_jobs=max(1, threads), prefer="threads")(jobs) for run in batch]
    horizon = runs[0].horizon
    summary = FeatureEnsemble(
        horizon=horizon,
        feature_counts=np.array([run.ledger.K for run in runs], dtype=np.int64),
        first_weights=np.array([run.ledger.atom_weights()[0] for run in runs]),
        k_times=runs[0].k_times,
        k_paths=np.stack([run.k_values for run in runs]),
    )
    LOGGER.info(
        "Feature ensemble finished",
        extra={
            "replicates": replicates,
            "horizon": horizon,
            "mean_k": float(summary.feature_counts.mean()),
            "elapsed_sec": round(time.perf_counter() - started, 3),
        },
    )
    return summary


__all__ = [
    "FEATURE_BATCH_SIZE",
    "FeatureEnsemble",
    "FeatureRun",
    "bm_predictive_step",
    "expected_feature_count",
    "feature_ensemble",
    "log_snapshot_times",
    "simulate_feature_model",
]
