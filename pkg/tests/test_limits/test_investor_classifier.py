from __future__ import annotations

import pytest

from app.core.enums import InvestorClass, Regime, StatementKind
from app.core.errors import DomainError, UnclassifiedRegime
from app.limits import GammaRatio, LimitStatement, StakeScaling, TwoPointAbsorption, classify_and_limit, threshold_exponent
from app.schedule import Constant, FloorPower, PowerDecay, Proportional


def test_classifier_should_mark_square_root_stake_as_large_under_constant_reward() -> None:
    classification, outcome = classify_and_limit(Constant(R=1.0), 10_000.0, StakeScaling(c=1.0, beta=0.5))

    assert classification.investor_class is InvestorClass.LARGE
    assert classification.n0 == pytest.approx(100.0)
    assert isinstance(outcome, LimitStatement)
    assert outcome.kind is StatementKind.CONCENTRATES
    assert outcome.bound == pytest.approx(5.0 / (4.0 * 0.0025 * 100.0))


def test_classifier_should_give_exponential_ratio_for_unit_stake() -> None:
    classification, outcome = classify_and_limit(Constant(R=1.0), 500.0, StakeScaling.constant(1.0))

    assert classification.investor_class is InvestorClass.MEDIUM
    assert outcome == GammaRatio(shape=1.0, scale=1.0)
    assert outcome.sf(2.0) == pytest.approx(0.1353352832366127)


def test_classifier_should_give_absorption_for_geometric_rewards() -> None:
    classification, outcome = classify_and_limit(
        Proportional(rho=0.001, gamma=1.1), 1_000.0, StakeScaling.fraction(0.25)
    )

    assert classification.regime is Regime.GEOMETRIC
    assert outcome == TwoPointAbsorption(p=0.25)


def test_classifier_should_report_diverging_variance_for_small_stake() -> None:
    classification, outcome = classify_and_limit(Constant(R=1.0), 200.0, StakeScaling(c=1.0, beta=-1.1))

    assert classification.investor_class is InvestorClass.SMALL
    assert outcome.kind is StatementKind.VARIANCE_DIVERGES
    assert "eps" in outcome.detail


def test_classifier_should_use_fast_decay_threshold() -> None:
    classification, outcome = classify_and_limit(PowerDecay(c=1.0, alpha=0.6), 100.0, StakeScaling(c=1.0, beta=-1.0))

    assert classification.threshold_exponent == -1.0
    assert classification.investor_class is InvestorClass.MEDIUM
    assert outcome.kind is StatementKind.ANTI_CONCENTRATES


def test_classifier_should_report_scaling_without_constant_for_slow_decay() -> None:
    classification, outcome = classify_and_limit(PowerDecay(c=1.0, alpha=0.1), 2_000.0, StakeScaling.constant(1.0), eps=0.25)

    assert classification.investor_class is InvestorClass.LARGE
    assert outcome.bound is None
    assert outcome.scaling == pytest.approx(1.0 / 2_000.0 ** (0.1 / 0.9))


def test_classifier_should_treat_floor_schedules_like_constant_threshold() -> None:
    tau, description = threshold_exponent(FloorPower(floor=1.0, c=1.0, alpha=1.0))

    assert tau == 0.0
    assert description == "n0 = Theta(1)"


def test_classifier_should_use_gamma_threshold_for_sublinear_rewards() -> None:
    classification, _ = classify_and_limit(Proportional(rho=1.0, gamma=0.1), 150.0, StakeScaling(c=1.0, beta=0.5))

    assert classification.threshold_exponent == pytest.approx(0.1)
    assert classification.investor_class is InvestorClass.LARGE


def test_classifier_should_refuse_boundary_schedules() -> None:
    with pytest.raises(UnclassifiedRegime):
        classify_and_limit(PowerDecay(c=1.0, alpha=0.5), 100.0, StakeScaling.constant(1.0))


def test_classifier_should_reject_stake_outside_supply() -> None:
    with pytest.raises(DomainError):
        classify_and_limit(Constant(R=1.0), 10.0, StakeScaling.constant(20.0))


def test_stake_scaling_should_describe_rule() -> None:
    assert StakeScaling.fraction(0.5).describe() == "0.5*N^1"
    assert StakeScaling(c=1.0, beta=-1.1).value(100.0) == pytest.approx(100.0**-1.1)
