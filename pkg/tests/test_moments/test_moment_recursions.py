from __future__ import annotations

import math

import numpy as np
import pytest

from app.core.errors import DomainError, SupplyOverflow
from app.moments import (
    MAX_ORDER,
    a_sequence,
    central_step_residuals,
    constant_reward_variance,
    enumerate_paths,
    enumerated_raw_moments,
    exact_ratio_variance,
    raw_moment_table,
)
from app.schedule import Constant, FloorDecay, PowerDecay, Proportional


def test_a_sequence_should_match_hand_computed_values() -> None:
    a = a_sequence(Constant(R=1.0), 2.0, 2)

    assert a[0] == pytest.approx(1.0 / 9.0, rel=1e-15)
    assert a[1] == pytest.approx(1.0 / 6.0, rel=1e-15)


def test_a_sequence_should_approach_constant_reward_limit() -> None:
    a = a_sequence(Constant(R=1.0), 2.0, 100_000)

    assert a[-1] == pytest.approx(1.0 / 3.0, rel=1e-4)
    assert (np.diff(a) > 0).all()


@pytest.mark.parametrize("N", [2.0, 100.0, 10_000.0])
def test_a_sequence_should_agree_with_constant_reward_closed_form(N: float) -> None:
    T = 2_000
    a = a_sequence(Constant(R=1.0), N, T)

    for t in (1, 10, 500, T):
        expected = constant_reward_variance(1.0, N, t, 0.5) / 0.25
        assert a[t - 1] == pytest.approx(expected, rel=1e-12)


def test_a_sequence_should_reject_empty_horizon() -> None:
    with pytest.raises(DomainError):
        a_sequence(Constant(R=1.0), 2.0, 0)


def test_a_sequence_should_raise_when_supply_overflows() -> None:
    with pytest.raises(SupplyOverflow):
        a_sequence(Proportional(rho=1.0, gamma=2.0), 2.0, 100)


def test_constant_reward_variance_should_match_examples() -> None:
    assert constant_reward_variance(1.0, 2.0, 1, 0.5) == pytest.approx(1.0 / 36.0)
    assert constant_reward_variance(1.0, 2.0, math.inf, 0.5) == pytest.approx(1.0 / 12.0)


@pytest.mark.parametrize("pi0", [0.0, 1.0])
def test_constant_reward_variance_should_vanish_for_degenerate_share(pi0: float) -> None:
    assert constant_reward_variance(1.0, 10.0, 5, pi0) == 0.0
    assert constant_reward_variance(1.0, 10.0, math.inf, pi0) == 0.0


def test_raw_moment_table_should_keep_first_moment_constant() -> None:
    table = raw_moment_table(PowerDecay(c=1.0, alpha=0.6), 10.0, 0.3, 200)

    assert table.raw[:, 0] == pytest.approx(np.full(201, 0.3), rel=1e-12)


def test_raw_moment_table_should_give_second_moment_after_one_step() -> None:
    table = raw_moment_table(Constant(R=1.0), 2.0, 0.5, 1)

    assert table.raw[1, 1] == pytest.approx(5.0 / 18.0, rel=1e-15)
    assert table.mu2[1] == pytest.approx(1.0 / 36.0, rel=1e-12)
    assert table.a[1] == pytest.approx(1.0 / 9.0)


@pytest.mark.parametrize("schedule", [Constant(R=1.0), PowerDecay(c=1.0, alpha=0.6)])
def test_raw_moment_table_should_match_path_enumeration(schedule) -> None:
    T = 12
    table = raw_moment_table(schedule, 2.0, 0.5, T)

    enumerated = enumerated_raw_moments((1.0, 1.0), schedule, T)

    assert table.raw[T] == pytest.approx(enumerated, rel=1e-12)


def test_raw_moment_table_should_match_enumeration_for_uneven_urn() -> None:
    T = 10
    table = raw_moment_table(Constant(R=1.0), 8.0, 3.0 / 8.0, T)

    enumerated = enumerated_raw_moments((3.0, 5.0), Constant(R=1.0), T)

    assert table.raw[T] == pytest.approx(enumerated, rel=1e-12)


def test_raw_moment_table_should_leave_unrequested_orders_empty() -> None:
    table = raw_moment_table(Constant(R=1.0), 4.0, 0.25, 5, max_order=2)

    assert np.isnan(table.raw[:, 2:]).all()
    assert np.isnan(table.mu3).all()
    with pytest.raises(DomainError):
        central_step_residuals(table, Constant(R=1.0), 4.0)


def test_raw_moment_table_should_reject_invalid_order() -> None:
    with pytest.raises(DomainError):
        raw_moment_table(Constant(R=1.0), 4.0, 0.25, 5, max_order=MAX_ORDER + 1)


def test_central_moments_should_satisfy_step_identities() -> None:
    table = raw_moment_table(Constant(R=1.0), 8.0, 3.0 / 8.0, 1_000)

    third, fourth = central_step_residuals(table, Constant(R=1.0), 8.0)

    assert third.max() <= 1e-10
    assert fourth.max() <= 1e-10


def test_central_moments_should_satisfy_step_identities_under_decay() -> None:
    schedule = FloorDecay(floor=1.0, excess=1.0, q=0.999)
    table = raw_moment_table(schedule, 50.0, 0.1, 500)

    third, fourth = central_step_residuals(table, schedule, 50.0)

    assert max(third.max(), fourth.max()) <= 1e-10


def test_higher_central_moments_should_scale_with_supply_for_unit_stake() -> None:
    schedule = FloorDecay(floor=1.0, excess=1.0, q=0.999)
    grid = np.array([100.0, 200.0, 400.0])
    third = []
    fourth = []
    for N in grid:
        pi0 = 1.0 / N
        table = raw_moment_table(schedule, N, pi0, 40_000)
        third.append(table.mu3.max() / pi0)
        fourth.append(table.mu4.max() / pi0)

    slope3 = np.polyfit(np.log(grid), np.log(third), 1)[0]
    slope4 = np.polyfit(np.log(grid), np.log(fourth), 1)[0]

    assert slope3 == pytest.approx(-2.0, abs=0.1)
    assert slope4 == pytest.approx(-3.0, abs=0.1)


def test_exact_ratio_variance_should_scale_a_by_share_odds() -> None:
    assert exact_ratio_variance(Constant(R=1.0), 2.0, 1.0, 1) == pytest.approx(1.0 / 9.0)
    assert exact_ratio_variance(Constant(R=1.0), 4.0, 1.0, 1) == pytest.approx(3.0 * (1.0 / 5.0) ** 2)


def test_enumerate_paths_should_produce_a_probability_distribution() -> None:
    paths = enumerate_paths((1.0, 2.0, 3.0), Constant(R=1.0), 4)

    assert len(paths) == 3**4
    assert math.fsum(p for p, _ in paths) == pytest.approx(1.0, abs=1e-15)
    assert all(sum(coins) == pytest.approx(10.0) for _, coins in paths)


def test_enumerate_paths_should_refuse_oversized_trees() -> None:
    with pytest.raises(DomainError):
        enumerate_paths((1.0, 1.0), Constant(R=1.0), 21)


def test_moment_table_csv_should_list_every_step(tmp_path) -> None:
    table = raw_moment_table(Constant(R=1.0), 2.0, 0.5, 3)

    path = table.to_csv(tmp_path / "moments.csv")
    lines = path.read_bytes().split(b"\r\n")

    assert lines[0] == b"t,a_t,m1,m2,m3,m4,mu2,mu3,mu4"
    assert lines[1].startswith(b"0,0,0.5,0.25,")
    assert len([line for line in lines if line]) == 5
