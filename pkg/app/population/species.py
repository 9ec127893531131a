"""Species-sampling selection rules and exact pattern probabilities."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple

from app.core.errors import DomainError
from app.schedule import RewardSchedule, reward_path
from app.urn.models import sequential_total

Histogram = Tuple[int, ...]
SpeciesRule = Callable[[Histogram], Sequence[float]]

RULE_TOLERANCE = 1e-12


@dataclass(frozen=True, slots=True)
class RuleCheck:
    valid: bool
    witness: Optional[Histogram] = None
    reason: str = ""


def species_rule_check(
    rule: SpeciesRule,
    histograms: Iterable[Sequence[int]],
    *,
    tolerance: float = RULE_TOLERANCE,
) -> RuleCheck:
    """Check p_j(n) >= 0 and sum_{j <= k+1} p_j(n) = 1 on every histogram.

    Returns the first violating histogram as witness.
    """

    for raw in histograms:
        histogram = tuple(int(n) for n in raw)
        if not histogram or any(n < 1 for n in histogram):
            raise DomainError(f"histogram entries must be positive integers, got {raw!r}")
        probabilities = [float(p) for p in rule(histogram)]
        if len(probabilities) != len(histogram) + 1:
            return RuleCheck(False, histogram, f"expected {len(histogram) + 1} probabilities")
        if any(p < -tolerance for p in probabilities):
            return RuleCheck(False, histogram, "negative probability")
        if abs(math.fsum(probabilities) - 1.0) > tolerance:
            return RuleCheck(False, histogram, f"probabilities sum to {math.fsum(probabilities)!r}")
    return RuleCheck(True)


def dirichlet_rule(theta: float) -> SpeciesRule:
    """p_j = n_j / (theta + t - 1) for seen features, theta / (theta + t - 1) for a fresh one."""

    if not theta > 0:
        raise DomainError("theta must be positive")

    def rule(histogram: Histogram) -> Tuple[float, ...]:
        denominator = theta + sum(histogram)
        return tuple(n / denominator for n in histogram) + (theta / denominator,)

    return rule


def pitman_yor_rule(discount: float, theta: float) -> SpeciesRule:
    """p_j = (n_j - discount) / (theta + t - 1); the fresh feature k + 1 gets the rest."""

    if not 0.0 <= discount < 1.0:
        raise DomainError("discount must lie in [0, 1)")
    if not theta > -discount:
        raise DomainError("theta must exceed -discount")

    def rule(histogram: Histogram) -> Tuple[float, ...]:
        denominator = theta + sum(histogram)
        fresh = (theta + len(histogram) * discount) / denominator
        return tuple((n - discount) / denominator for n in histogram) + (fresh,)

    return rule


def pattern_probability(pattern: Sequence[int], initial_coins: Sequence[float], s: RewardSchedule) -> float:
    """Probability that the urn selects investors ``pattern`` in that order."""

    coins = [float(c) for c in initial_coins]
    if any(not c > 0 for c in coins):
        raise DomainError("initial coins must be positive")
    if any(not 0 <= k < len(coins) for k in pattern):
        raise DomainError(f"pattern {tuple(pattern)} refers to unknown investors")
    path = reward_path(s, sequential_total(coins), len(pattern))
    if path.truncated:
        raise DomainError("pattern is longer than the finite supply path")
    probability = 1.0
    for t, k in enumerate(pattern):
        probability *= coins[k] / float(path.supplies[t])
        coins[k] += float(path.rewards[t])
    return probability


def exchangeability_defect(initial_coins: Sequence[float], s: RewardSchedule, max_length: int) -> float:
    """Largest relative spread of pattern probabilities over permutations of a pattern."""

    if max_length < 1:
        raise DomainError("max_length must be >= 1")
    worst = 0.0
    K = len(initial_coins)
    for length in range(1, max_length + 1):
        by_counts: Dict[Tuple[int, ...], float] = {}
        for pattern in itertools.product(range(K), repeat=length):
            key = tuple(sorted(pattern))
            probability = pattern_probability(pattern, initial_coins, s)
            reference = by_counts.setdefault(key, probability)
            worst = max(worst, abs(probability - reference) / reference)
    return worst


__all__ = [
    "Histogram",
    "RULE_TOLERANCE",
    "RuleCheck",
    "SpeciesRule",
    "dirichlet_rule",
    "exchangeability_defect",
    "pattern_probability",
    "pitman_yor_rule",
    "species_rule_check",
]
