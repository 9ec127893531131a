"""Regime-specific bounds on a_t and Chebyshev concentration bounds.

Explicit constants are returned only where the theory provides them; the
remaining regimes report scaling exponents in N instead of fabricated numbers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from scipy import special

from app.core.enums import Regime
from app.core.errors import DomainError, UnclassifiedRegime, UnspecifiedConstant
from app.schedule import PowerDecay, Proportional, RewardSchedule, classify_regime, first_reward, reward_floor


@dataclass(frozen=True, slots=True)
class ABounds:
    """Bounds on a_t.

    ``exponent`` is the power of N governing a_t when only the scaling is
    known; ``valid_from`` is the first t at which the bound applies.
    """

    lower: Optional[float]
    upper: Optional[float]
    regime: Regime
    exponent: Optional[float] = None
    valid_from: float = 1.0

    def contains(self, value: float, *, rtol: float = 1e-12) -> bool:
        if self.lower is not None and value < self.lower * (1.0 - rtol):
            return False
        if self.upper is not None and value > self.upper * (1.0 + rtol):
            return False
        return True


def squared_reward_sum(s: RewardSchedule) -> float:
    """sum_{t>=1} R_t^2 = c^2 zeta(2 alpha) for fast power decay."""

    if not isinstance(s, PowerDecay) or s.alpha <= 0.5:
        raise DomainError("the squared reward series converges only for power decay with alpha > 1/2")
    return s.c * s.c * float(special.zeta(2.0 * s.alpha))


def a_bounds(s: RewardSchedule, N: float, t: int) -> ABounds:
    """Bounds on a_t for the schedule's regime."""

    if t < 1:
        raise DomainError("t must be >= 1")
    if not N > 0:
        raise DomainError("N must be positive")
    regime = classify_regime(s)
    if regime in (Regime.CONSTANT, Regime.POSITIVE_FLOOR):
        r1 = first_reward(s, N)
        floor = reward_floor(s)
        lower = (N - r1) * floor * floor * t / (N * (N + r1) * (N + r1 * (1 + t)))
        return ABounds(lower=max(lower, 0.0), upper=r1 / N, regime=regime)
    if regime is Regime.FAST_DECAY:
        r1 = first_reward(s, N)
        return ABounds(lower=(r1 / (N + r1)) ** 2, upper=squared_reward_sum(s) / (N * N), regime=regime)
    if regime is Regime.SLOW_DECAY:
        assert isinstance(s, PowerDecay)
        exponent = -1.0 / (1.0 - s.alpha)
        return ABounds(
            lower=None,
            upper=None,
            regime=regime,
            exponent=exponent,
            valid_from=N ** (1.0 / (1.0 - s.alpha)),
        )
    if regime is Regime.SUBLINEAR:
        assert isinstance(s, Proportional)
        return ABounds(
            lower=None,
            upper=s.rho / (1.0 - s.gamma) * N ** (s.gamma - 1.0),
            regime=regime,
            exponent=s.gamma - 1.0,
        )
    return ABounds(lower=None, upper=None, regime=Regime.UNBOUNDED_ANALYSIS)


def _check_bound_args(N: float, n0: float, eps: float) -> None:
    if not eps > 0:
        raise DomainError("eps must be positive")
    if not (N > 0 and n0 > 0):
        raise DomainError("N and n0 must be positive")


def concentration_bound(s: RewardSchedule, N: float, n0: float, eps: float) -> float:
    """Upper bound on sup_t P(|pi_t/pi_0 - 1| > eps).

    Values above 1 are returned unchanged (vacuous bound).
    """

    _check_bound_args(N, n0, eps)
    regime = classify_regime(s)
    eps2 = eps * eps
    if regime is Regime.CONSTANT:
        return 5.0 * first_reward(s, N) / (4.0 * eps2 * n0)
    if regime is Regime.POSITIVE_FLOOR:
        return first_reward(s, N) / (eps2 * n0)
    if regime is Regime.FAST_DECAY:
        return squared_reward_sum(s) / (eps2 * N * n0)
    if regime is Regime.SLOW_DECAY:
        raise UnspecifiedConstant(
            "slow power decay: only the scaling 1/(N^(alpha/(1-alpha)) n0) is known; use concentration_scaling"
        )
    if regime is Regime.SUBLINEAR:
        assert isinstance(s, Proportional)
        return s.rho * N**s.gamma / ((1.0 - s.gamma) * n0 * eps2)
    if regime is Regime.GEOMETRIC:
        raise DomainError("shares do not concentrate under geometric rewards")
    raise UnclassifiedRegime(f"no concentration bound for {s!r}")


def concentration_scaling(s: RewardSchedule, N: float, n0: float) -> float:
    """Denominator scaling 1/(N^(alpha/(1-alpha)) n0) of the slow-decay bound."""

    if classify_regime(s) is not Regime.SLOW_DECAY:
        raise DomainError("the scaling-only bound applies to slow power decay")
    assert isinstance(s, PowerDecay)
    if not (N > 0 and n0 > 0):
        raise DomainError("N and n0 must be positive")
    return 1.0 / (N ** (s.alpha / (1.0 - s.alpha)) * n0)


__all__ = ["ABounds", "a_bounds", "concentration_bound", "concentration_scaling", "squared_reward_sum"]
