from __future__ import annotations

import pytest

from app.core.enums import Regime
from app.core.errors import DomainError, SupplyOverflow
from app.schedule import (
    Constant,
    FloorDecay,
    FloorPower,
    PowerDecay,
    Proportional,
    classify_regime,
    reward_at,
    reward_floor,
    reward_path,
    schedule_from_dict,
    schedule_to_dict,
    supply_after,
)


def test_reward_at_should_return_constant_reward() -> None:
    assert reward_at(Constant(R=1.0), 7, 100.0) == 1.0


def test_reward_at_should_evaluate_floor_decay_from_first_step() -> None:
    assert reward_at(FloorDecay(floor=1.0, excess=1.0, q=0.999), 1, 10.0) == pytest.approx(1.999)


def test_reward_at_should_scale_proportional_reward_with_supply() -> None:
    reward = reward_at(Proportional(rho=0.001, gamma=1.1), 1, 1000.0)

    assert reward == pytest.approx(1.99526, rel=1e-5)


def test_reward_at_should_reject_step_zero() -> None:
    with pytest.raises(DomainError):
        reward_at(Constant(R=1.0), 0, 10.0)


def test_schedule_should_reject_non_positive_parameters() -> None:
    with pytest.raises(DomainError):
        Constant(R=0.0)
    with pytest.raises(DomainError):
        FloorDecay(floor=1.0, excess=1.0, q=1.0)
    with pytest.raises(DomainError):
        PowerDecay(c=1.0, alpha=-0.5)


def test_supply_after_should_add_rewards_to_initial_supply() -> None:
    assert supply_after(Constant(R=1.0), 100.0, 50) == pytest.approx(150.0)
    assert supply_after(PowerDecay(c=1.0, alpha=0.6), 10.0, 2) == pytest.approx(11.659754, rel=1e-7)


def test_supply_after_should_return_initial_supply_at_time_zero() -> None:
    assert supply_after(FloorPower(floor=1.0, c=1.0, alpha=1.0), 42.0, 0) == 42.0


def test_supply_path_should_be_strictly_increasing() -> None:
    path = reward_path(PowerDecay(c=1.0, alpha=0.1), 5.0, 500)

    assert not path.truncated
    assert path.horizon == 500
    assert (path.supplies[1:] > path.supplies[:-1]).all()
    assert path.supplies[-1] == pytest.approx(path.supplies[0] + path.rewards.sum())


def test_supply_after_should_raise_overflow_for_fast_geometric_growth() -> None:
    schedule = Proportional(rho=1.0, gamma=2.0)

    with pytest.raises(SupplyOverflow) as info:
        supply_after(schedule, 2.0, 200)

    assert info.value.step is not None and info.value.step < 200


def test_reward_path_should_flag_truncation_instead_of_raising() -> None:
    path = reward_path(Proportional(rho=1.0, gamma=2.0), 2.0, 200)

    assert path.truncated
    assert path.horizon < 200
    assert path.supplies.shape[0] == path.horizon + 1


def test_reward_path_should_be_read_only() -> None:
    path = reward_path(Constant(R=1.0), 10.0, 5)

    with pytest.raises(ValueError):
        path.rewards[0] = 3.0


@pytest.mark.parametrize(
    ("schedule", "expected"),
    [
        (Constant(R=2.0), Regime.CONSTANT),
        (FloorDecay(floor=1.0, excess=1.0, q=0.999), Regime.POSITIVE_FLOOR),
        (FloorPower(floor=1.0, c=1.0, alpha=1.0), Regime.POSITIVE_FLOOR),
        (PowerDecay(c=1.0, alpha=0.6), Regime.FAST_DECAY),
        (PowerDecay(c=1.0, alpha=0.1), Regime.SLOW_DECAY),
        (PowerDecay(c=1.0, alpha=0.5), Regime.UNBOUNDED_ANALYSIS),
        (Proportional(rho=1.0, gamma=0.1), Regime.SUBLINEAR),
        (Proportional(rho=0.001, gamma=1.1), Regime.GEOMETRIC),
        (Proportional(rho=0.5, gamma=1.0), Regime.UNBOUNDED_ANALYSIS),
    ],
)
def test_classify_regime_should_map_schedule_to_regime(schedule, expected: Regime) -> None:
    assert classify_regime(schedule) is expected


def test_reward_floor_should_reject_decaying_schedule() -> None:
    assert reward_floor(FloorDecay(floor=2.0, excess=1.0, q=0.5)) == 2.0
    with pytest.raises(DomainError):
        reward_floor(PowerDecay(c=1.0, alpha=0.6))


def test_schedule_dict_should_restore_the_same_schedule() -> None:
    schedule = PowerDecay(c=1.0, alpha=0.6)

    payload = schedule_to_dict(schedule)

    assert payload == {"kind": "power_decay", "c": 1.0, "alpha": 0.6}
    assert schedule_from_dict(payload) == schedule


def test_schedule_from_dict_should_reject_unknown_kind() -> None:
    with pytest.raises(DomainError):
        schedule_from_dict({"kind": "halving", "R": 1.0})
