from __future__ import annotations

import pytest
from scipy import special

from app.core.enums import Regime
from app.core.errors import DomainError, UnspecifiedConstant
from app.moments import a_bounds, a_sequence, concentration_bound, concentration_scaling, squared_reward_sum
from app.schedule import Constant, FloorDecay, PowerDecay, Proportional


def test_a_bounds_should_use_first_reward_over_supply_for_positive_floor() -> None:
    bounds = a_bounds(FloorDecay(floor=1.0, excess=1.0, q=0.999), 100.0, 10)

    assert bounds.upper == pytest.approx(0.01999)
    assert bounds.regime is Regime.POSITIVE_FLOOR


def test_a_bounds_should_use_squared_reward_series_for_fast_decay() -> None:
    bounds = a_bounds(PowerDecay(c=1.0, alpha=0.6), 100.0, 10)

    assert bounds.upper == pytest.approx(float(special.zeta(1.2)) / 1e4, rel=1e-9)
    assert bounds.upper == pytest.approx(5.591e-4, rel=1e-3)


def test_a_bounds_should_give_sublinear_upper_bound() -> None:
    bounds = a_bounds(Proportional(rho=1.0, gamma=0.1), 100.0, 10)

    assert bounds.upper == pytest.approx(0.017610, rel=1e-4)
    assert bounds.lower is None
    assert bounds.exponent == pytest.approx(-0.9)


def test_a_bounds_should_report_only_scaling_for_slow_decay() -> None:
    bounds = a_bounds(PowerDecay(c=1.0, alpha=0.1), 100.0, 10)

    assert bounds.lower is None and bounds.upper is None
    assert bounds.exponent == pytest.approx(-1.0 / 0.9)
    assert bounds.valid_from == pytest.approx(100.0 ** (1.0 / 0.9))


def test_a_bounds_should_tag_boundary_schedules_as_unbounded_analysis() -> None:
    assert a_bounds(PowerDecay(c=1.0, alpha=0.5), 100.0, 10).regime is Regime.UNBOUNDED_ANALYSIS


@pytest.mark.parametrize(
    "schedule",
    [Constant(R=1.0), FloorDecay(floor=1.0, excess=1.0, q=0.999), PowerDecay(c=1.0, alpha=0.6)],
)
def test_a_sequence_should_stay_within_explicit_bounds(schedule) -> None:
    N = 100.0
    a = a_sequence(schedule, N, 5_000)

    for t in (1, 2, 50, 1_000, 5_000):
        assert a_bounds(schedule, N, t).contains(float(a[t - 1]))


def test_a_sequence_should_stay_below_sublinear_bound() -> None:
    schedule = Proportional(rho=1.0, gamma=0.1)
    a = a_sequence(schedule, 100.0, 5_000)

    assert a.max() <= a_bounds(schedule, 100.0, 5_000).upper


def test_concentration_bound_should_match_constant_reward_examples() -> None:
    assert concentration_bound(Constant(R=1.0), 1_000.0, 500.0, 0.05) == pytest.approx(1.0)
    assert concentration_bound(Constant(R=1.0), 10_000.0, 5_000.0, 0.05) == pytest.approx(0.1)


def test_concentration_bound_should_match_sublinear_example() -> None:
    bound = concentration_bound(Proportional(rho=1.0, gamma=0.1), 2_000.0, 1_000.0, 0.05)

    assert bound == pytest.approx(0.9509, rel=1e-4)


def test_concentration_bound_should_return_vacuous_values_unchanged() -> None:
    assert concentration_bound(Constant(R=1.0), 100.0, 10.0, 0.05) > 1.0


def test_concentration_bound_should_refuse_unspecified_constant() -> None:
    with pytest.raises(UnspecifiedConstant):
        concentration_bound(PowerDecay(c=1.0, alpha=0.1), 2_000.0, 1_000.0, 0.25)

    scaling = concentration_scaling(PowerDecay(c=1.0, alpha=0.1), 2_000.0, 1_000.0)

    assert scaling == pytest.approx(1.0 / (2_000.0 ** (0.1 / 0.9) * 1_000.0))


def test_concentration_bound_should_reject_geometric_rewards() -> None:
    with pytest.raises(DomainError):
        concentration_bound(Proportional(rho=0.001, gamma=1.1), 1_000.0, 500.0, 0.05)


def test_squared_reward_sum_should_require_fast_decay() -> None:
    assert squared_reward_sum(PowerDecay(c=2.0, alpha=1.0)) == pytest.approx(4.0 * special.zeta(2.0))
    with pytest.raises(DomainError):
        squared_reward_sum(PowerDecay(c=1.0, alpha=0.4))
