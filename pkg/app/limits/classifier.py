"""Investor classification and the matching limit law or statement.

Classes are properties of sequences, so the stake is declared as a scaling
rule n0 = c * N**beta and compared against the regime's threshold exponent.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from app.core.enums import InvestorClass, Regime, StatementKind
from app.core.errors import DomainError, UnclassifiedRegime, UnspecifiedConstant
from app.moments.bounds import concentration_bound, concentration_scaling
from app.schedule import PowerDecay, Proportional, RewardSchedule, classify_regime, first_reward

from .laws import GammaRatio, LimitLaw, TwoPointAbsorption

LOGGER = logging.getLogger("stake_lab.limits")

EXPONENT_TOLERANCE = 1e-12


@dataclass(frozen=True, slots=True)
class StakeScaling:
    """Initial coins of the tracked investor as a function of N."""

    c: float
    beta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.c) and self.c > 0):
            raise DomainError("stake coefficient must be positive")
        if not math.isfinite(self.beta):
            raise DomainError("stake exponent must be finite")

    @classmethod
    def fraction(cls, share: float) -> "StakeScaling":
        return cls(c=share, beta=1.0)

    @classmethod
    def constant(cls, coins: float) -> "StakeScaling":
        return cls(c=coins, beta=0.0)

    def value(self, N: float) -> float:
        return self.c * N**self.beta

    def describe(self) -> str:
        return f"{self.c:g}*N^{self.beta:g}"


@dataclass(frozen=True, slots=True)
class InvestorClassification:
    investor_class: InvestorClass
    threshold_exponent: float
    threshold: str
    regime: Regime
    n0: float


@dataclass(frozen=True, slots=True)
class LimitStatement:
    """Qualitative limit result with its bound when one is known."""

    kind: StatementKind
    detail: str
    bound: Optional[float] = None
    scaling: Optional[float] = None

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "detail": self.detail, "bound": self.bound, "scaling": self.scaling}


def threshold_exponent(s: RewardSchedule) -> Tuple[float, str]:
    """Exponent tau and description of the medium-investor scale n0 = Theta(N**tau)."""

    regime = classify_regime(s)
    if regime in (Regime.CONSTANT, Regime.POSITIVE_FLOOR):
        return 0.0, "n0 = Theta(1)"
    if regime is Regime.FAST_DECAY:
        return -1.0, "n0 = Theta(1/N)"
    if regime is Regime.SLOW_DECAY:
        assert isinstance(s, PowerDecay)
        return -s.alpha / (1.0 - s.alpha), "n0 = Theta(N^(-alpha/(1-alpha)))"
    if regime is Regime.SUBLINEAR:
        assert isinstance(s, Proportional)
        return s.gamma, "n0 = Theta(N^gamma)"
    if regime is Regime.GEOMETRIC:
        # p = n0/N stays non-degenerate only for linear stakes
        return 1.0, "n0 = Theta(N)"
    raise UnclassifiedRegime(f"{s!r} lies on a boundary the theory does not cover")


def _investor_class(beta: float, tau: float) -> InvestorClass:
    if abs(beta - tau) <= EXPONENT_TOLERANCE:
        return InvestorClass.MEDIUM
    return InvestorClass.LARGE if beta > tau else InvestorClass.SMALL


def _large_statement(s: RewardSchedule, regime: Regime, N: float, n0: float, eps: float) -> LimitStatement:
    detail = "ratio pi_t/pi_0 concentrates at 1"
    try:
        return LimitStatement(StatementKind.CONCENTRATES, detail, bound=concentration_bound(s, N, n0, eps))
    except UnspecifiedConstant:
        return LimitStatement(StatementKind.CONCENTRATES, detail, scaling=concentration_scaling(s, N, n0))


def _medium_outcome(s: RewardSchedule, regime: Regime, N: float, n0: float) -> Union[LimitLaw, LimitStatement]:
    if regime is Regime.CONSTANT:
        R = first_reward(s, N)
        return GammaRatio(shape=n0 / R, scale=R / n0)
    if regime is Regime.FAST_DECAY:
        detail = "var(pi_t/pi_0) stays of order one; pi_t/pi_0 does not concentrate"
    elif regime is Regime.SLOW_DECAY:
        detail = "pi_t/pi_0 stays away from 1 with probability bounded below"
    else:
        detail = "P(|pi_t/pi_0 - 1| > eps) is bounded away from zero"
    return LimitStatement(StatementKind.ANTI_CONCENTRATES, detail)


def classify_and_limit(
    s: RewardSchedule,
    N: float,
    stake: StakeScaling,
    *,
    eps: float = 0.05,
) -> Tuple[InvestorClassification, Union[LimitLaw, LimitStatement]]:
    """Classify the tracked investor and return its limit law or statement."""

    if not N > 0:
        raise DomainError("N must be positive")
    n0 = stake.value(N)
    if not 0.0 < n0 < N:
        raise DomainError(f"n0 = {n0!r} must lie in (0, N = {N!r})")
    regime = classify_regime(s)
    tau, threshold = threshold_exponent(s)
    investor_class = _investor_class(stake.beta, tau)
    classification = InvestorClassification(
        investor_class=investor_class,
        threshold_exponent=tau,
        threshold=threshold,
        regime=regime,
        n0=n0,
    )
    outcome: Union[LimitLaw, LimitStatement]
    if regime is Regime.GEOMETRIC:
        outcome = TwoPointAbsorption(p=n0 / N)
    elif investor_class is InvestorClass.LARGE:
        outcome = _large_statement(s, regime, N, n0, eps)
    elif investor_class is InvestorClass.MEDIUM:
        outcome = _medium_outcome(s, regime, N, n0)
    else:
        detail = "var(pi_t/pi_0) diverges"
        if regime is Regime.CONSTANT:
            detail += "; P(pi_t/pi_0 < eps) -> 1"
        outcome = LimitStatement(StatementKind.VARIANCE_DIVERGES, detail)
    LOGGER.debug(
        "Investor classified",
        extra={"regime": regime.value, "class": investor_class.value, "n0": n0, "N": N},
    )
    return classification, outcome


__all__ = [
    "InvestorClassification",
    "LimitStatement",
    "StakeScaling",
    "classify_and_limit",
    "threshold_exponent",
]
