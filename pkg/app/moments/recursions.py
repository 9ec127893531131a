"""Exact moment recursions of a tracked share.

Conditioning on whether the tracked investor is selected at step t+1, with
a = N_t/N_{t+1} and b = R_{t+1}/N_{t+1},

    m_j(t+1) = a^j m_j(t) + sum_{i<j} C(j, i) a^i b^(j-i) m_{i+1}(t),

which is closed at every order. The variance factor a_t obeys
a_{t+1} = a_t + b^2 (1 - a_t) with a_0 = 0.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from app.core.errors import DomainError, StorageError, SupplyOverflow
from app.core.types import FloatArray
from app.schedule import RewardPath, RewardSchedule, reward_path

MAX_ORDER = 4


def _path(s: RewardSchedule, N: float, T: int) -> RewardPath:
    path = reward_path(s, N, T)
    if path.truncated:
        raise SupplyOverflow(f"supply overflows before t={T}", step=path.horizon + 1)
    return path


def a_sequence(s: RewardSchedule, N: float, T: int) -> FloatArray:
    """Return a_1..a_T as an array of length ``T``."""

    if T < 1:
        raise DomainError("T must be >= 1")
    path = _path(s, N, T)
    rewards = path.rewards.tolist()
    supplies = path.supplies.tolist()
    out = np.empty(T, dtype=np.float64)
    a = 0.0
    for t in range(T):
        b = rewards[t] / supplies[t + 1]
        a = a + b * b * (1.0 - a)
        out[t] = a
    return out


def constant_reward_variance(R: float, N: float, t: float, pi0: float) -> float:
    """Closed-form var(pi_t) for constant reward; ``t`` may be ``math.inf``."""

    if not (R > 0 and N > 0):
        raise DomainError("R and N must be positive")
    if not 0.0 <= pi0 <= 1.0:
        raise DomainError("pi0 must lie in [0, 1]")
    spread = pi0 * (1.0 - pi0)
    if math.isinf(t):
        return R / (N + R) * spread
    if t < 0:
        raise DomainError("t must be non-negative")
    scale = R / (R * t + N)
    bracket = R / (N + R) * t * t + N / (N + R) * t
    return scale * scale * bracket * spread


@dataclass(slots=True)
class MomentTable:
    """Moments of the tracked share for t = 0..T.

    ``raw[:, j-1]`` holds m_j; central moments are computed about m_1.
    Orders above ``max_order`` are NaN.
    """

    times: np.ndarray
    a: FloatArray
    raw: FloatArray
    mu2: FloatArray
    mu3: FloatArray
    mu4: FloatArray
    pi0: float
    max_order: int

    def row(self, t: int) -> Dict[str, float]:
        return {
            "t": int(self.times[t]),
            "a_t": float(self.a[t]),
            **{f"m{j}": float(self.raw[t, j - 1]) for j in range(1, MAX_ORDER + 1)},
            "mu2": float(self.mu2[t]),
            "mu3": float(self.mu3[t]),
            "mu4": float(self.mu4[t]),
        }

    def to_csv(self, path: Path) -> Path:
        """Write columns t, a_t, m1..m4, mu2, mu3, mu4."""

        fieldnames = ["t", "a_t", "m1", "m2", "m3", "m4", "mu2", "mu3", "mu4"]
        try:
            with path.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.DictWriter(handle, fieldnames=fieldnames, lineterminator="\r\n")
                writer.writeheader()
                for t in range(self.times.shape[0]):
                    row = self.row(t)
                    writer.writerow({k: v if k == "t" else format(v, ".17g") for k, v in row.items()})
        except OSError as exc:  # pragma: no cover
            raise StorageError(f"Failed to write moment table: {exc}") from exc
        return path


def central_from_raw(m1: float, m2: float, m3: float, m4: float) -> Tuple[float, float, float]:
    mu2 = m2 - m1 * m1
    mu3 = m3 - 3.0 * m1 * m2 + 2.0 * m1**3
    mu4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1**4
    return mu2, mu3, mu4


def raw_moment_table(s: RewardSchedule, N: float, pi0: float, T: int, max_order: int = MAX_ORDER) -> MomentTable:
    """Exact raw and central moments of pi_t for t = 0..T."""

    if not 1 <= max_order <= MAX_ORDER:
        raise DomainError(f"max_order must lie in [1, {MAX_ORDER}]")
    if not 0.0 <= pi0 <= 1.0:
        raise DomainError("pi0 must lie in [0, 1]")
    if T < 0:
        raise DomainError("T must be non-negative")
    path = _path(s, N, T) if T > 0 else reward_path(s, N, 0)
    rewards = path.rewards.tolist()
    supplies = path.supplies.tolist()
    binom = [[math.comb(j, i) for i in range(j + 1)] for j in range(max_order + 1)]

    raw = np.full((T + 1, MAX_ORDER), np.nan)
    a_col = np.zeros(T + 1)
    m: List[float] = [1.0] + [pi0**j for j in range(1, max_order + 1)]
    raw[0, :max_order] = m[1:]
    a_t = 0.0
    for t in range(T):
        a = supplies[t] / supplies[t + 1]
        b = rewards[t] / supplies[t + 1]
        a_pows = [a**i for i in range(max_order + 1)]
        b_pows = [b**i for i in range(max_order + 1)]
        nxt = [1.0]
        for j in range(1, max_order + 1):
            value = a_pows[j] * m[j]
            for i in range(j):
                value += binom[j][i] * a_pows[i] * b_pows[j - i] * m[i + 1]
            nxt.append(value)
        m = nxt
        raw[t + 1, :max_order] = m[1:]
        a_t = a_t + b * b * (1.0 - a_t)
        a_col[t + 1] = a_t

    mu2 = np.full(T + 1, np.nan)
    mu3 = np.full(T + 1, np.nan)
    mu4 = np.full(T + 1, np.nan)
    if max_order >= 2:
        mu2 = raw[:, 1] - raw[:, 0] ** 2
    if max_order >= 3:
        mu3 = raw[:, 2] - 3.0 * raw[:, 0] * raw[:, 1] + 2.0 * raw[:, 0] ** 3
    if max_order >= 4:
        mu4 = raw[:, 3] - 4.0 * raw[:, 0] * raw[:, 2] + 6.0 * raw[:, 0] ** 2 * raw[:, 1] - 3.0 * raw[:, 0] ** 4
    return MomentTable(
        times=np.arange(T + 1),
        a=a_col,
        raw=raw,
        mu2=mu2,
        mu3=mu3,
        mu4=mu4,
        pi0=pi0,
        max_order=max_order,
    )


def central_step_residuals(table: MomentTable, s: RewardSchedule, N: float) -> Tuple[FloatArray, FloatArray]:
    """Relative residuals of the third and fourth central-moment step identities.

    With D = pi - pi0 and b = R_{t+1}/N_{t+1}:

        mu3(t+1) = mu3(t) + 3b^2 E[D pi(1-pi)] + b^3 E[pi(1-pi)(1-2pi)]
        mu4(t+1) = mu4(t) + 6b^2 E[D^2 pi(1-pi)] + 4b^3 E[D pi(1-pi)(1-2pi)]
                   + b^4 E[pi(1-pi)(1-3pi+3pi^2)]

    Each residual is divided by the total magnitude of the terms entering it,
    so cancellation in the raw-to-central conversion is accounted for.
    """

    if table.max_order < MAX_ORDER:
        raise DomainError("step identities need raw moments up to order 4")
    T = table.times.shape[0] - 1
    path = _path(s, N, T)
    p = table.pi0
    third = np.zeros(T)
    fourth = np.zeros(T)
    for t in range(T):
        b = float(path.rewards[t] / path.supplies[t + 1])
        m1, m2, m3, m4 = (float(v) for v in table.raw[t])
        n1, n2, n3, n4 = (float(v) for v in table.raw[t + 1])
        d_var = m2 - m3 - p * m1 + p * m2
        var_skew = m1 - 3.0 * m2 + 2.0 * m3
        d2_var = m3 - m4 - 2.0 * p * m2 + 2.0 * p * m3 + p * p * m1 - p * p * m2
        d_var_skew = m2 - 3.0 * m3 + 2.0 * m4 - p * m1 + 3.0 * p * m2 - 2.0 * p * m3
        var_kurt = m1 - 4.0 * m2 + 6.0 * m3 - 3.0 * m4

        lhs3 = float(table.mu3[t + 1])
        rhs3 = float(table.mu3[t]) + 3.0 * b * b * d_var + b**3 * var_skew
        scale3 = (
            n3 + 3.0 * n1 * n2 + 2.0 * n1**3
            + m3 + 3.0 * m1 * m2 + 2.0 * m1**3
            + 3.0 * b * b * (m2 + m3 + p * m1 + p * m2)
            + b**3 * (m1 + 3.0 * m2 + 2.0 * m3)
        )
        third[t] = abs(lhs3 - rhs3) / scale3 if scale3 > 0 else 0.0

        lhs4 = float(table.mu4[t + 1])
        rhs4 = float(table.mu4[t]) + 6.0 * b * b * d2_var + 4.0 * b**3 * d_var_skew + b**4 * var_kurt
        scale4 = (
            n4 + 4.0 * n1 * n3 + 6.0 * n1 * n1 * n2 + 3.0 * n1**4
            + m4 + 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 + 3.0 * m1**4
            + 6.0 * b * b * (m3 + m4 + 2.0 * p * m2 + 2.0 * p * m3 + p * p * m1 + p * p * m2)
            + 4.0 * b**3 * (m2 + 3.0 * m3 + 2.0 * m4 + p * m1 + 3.0 * p * m2 + 2.0 * p * m3)
            + b**4 * (m1 + 4.0 * m2 + 6.0 * m3 + 3.0 * m4)
        )
        fourth[t] = abs(lhs4 - rhs4) / scale4 if scale4 > 0 else 0.0
    return third, fourth


def exact_ratio_variance(s: RewardSchedule, N: float, n0: float, T: int) -> float:
    """var(pi_T / pi_0) = a_T (1 - pi0) / pi0."""

    pi0 = n0 / N
    return float(a_sequence(s, N, T)[-1]) * (1.0 - pi0) / pi0


__all__ = [
    "MAX_ORDER",
    "MomentTable",
    "a_sequence",
    "central_from_raw",
    "central_step_residuals",
    "constant_reward_variance",
    "exact_ratio_variance",
    "raw_moment_table",
]
