from __future__ import annotations

import numpy as np
import pytest

from app.core.enums import LimitClass, SelectionKind
from app.core.errors import DomainError
from app.dilution import (
    DynExperiment,
    DynState,
    dilution_report,
    dyn_ensemble,
    dyn_simulate,
    dyn_step,
    expected_limit_ratio,
    expected_share_factors,
    limit_classification,
)
from app.population import DiffuseBase
from app.schedule import Constant, PowerDecay, supply_after
from app.urn import UrnExperiment, ensemble, simulate


def test_fresh_entry_probability_should_use_dilution_weight() -> None:
    incumbents, atoms, fresh = DynState.initial((5.0, 5.0), 1.0).selection_probabilities()

    assert fresh == pytest.approx(1.0 / 11.0)
    assert incumbents == pytest.approx((5.0 / 11.0, 5.0 / 11.0))
    assert atoms == ()


def test_dyn_step_should_admit_new_investor_then_reselect_it() -> None:
    base = DiffuseBase(mass=1.0)
    state = DynState.initial((5.0, 5.0), 1.0)

    state, first = dyn_step(state, Constant(R=1.0), base, 0.99, 0.3)

    assert first.kind is SelectionKind.FRESH
    assert first.feature == 0.3
    assert state.newcomer_coins == 1.0
    assert state.supply == 11.0

    state, second = dyn_step(state, Constant(R=1.0), base, 10.5 / 12.0, 0.7)

    assert second.kind is SelectionKind.ATOM
    assert second.feature == 0.3
    assert state.ledger.rewards == [2.0]
    assert state.incumbents == (5.0, 5.0)


def test_dyn_step_should_credit_incumbent_with_low_uniform() -> None:
    state, selection = dyn_step(DynState.initial((5.0, 5.0), 1.0), Constant(R=1.0), DiffuseBase(mass=1.0), 0.1, 0.5)

    assert selection.kind is SelectionKind.INCUMBENT
    assert selection.index == 0
    assert state.incumbents == (6.0, 5.0)
    assert state.newcomer_share() == 0.0


def test_dyn_step_should_leave_input_state_untouched() -> None:
    base = DiffuseBase(mass=1.0)
    start = DynState.initial((5.0, 5.0), 1.0)

    after_fresh, _ = dyn_step(start, Constant(R=1.0), base, 0.99, 0.3)
    after_atom, _ = dyn_step(after_fresh, Constant(R=1.0), base, 10.5 / 12.0, 0.7)

    assert start.ledger.K == 0
    assert start.newcomer_coins == 0.0
    assert after_fresh.ledger.rewards == [1.0]
    assert after_fresh.ledger.t == 1
    assert after_atom.ledger.rewards == [2.0]


def test_dyn_step_should_allow_branching_from_one_state() -> None:
    base = DiffuseBase(mass=1.0)
    start = DynState.initial((5.0, 5.0), 1.0)

    fresh, first = dyn_step(start, Constant(R=1.0), base, 0.99, 0.3)
    incumbent, second = dyn_step(start, Constant(R=1.0), base, 0.1, 0.3)

    assert first.kind is SelectionKind.FRESH
    assert second.kind is SelectionKind.INCUMBENT
    assert fresh.newcomer_coins == 1.0
    assert incumbent.newcomer_coins == 0.0
    assert incumbent.ledger.K == 0


def test_dyn_state_should_reject_negative_dilution_weight() -> None:
    with pytest.raises(DomainError):
        DynState.initial((1.0, 1.0), -1.0)


def test_dyn_simulate_without_dilution_should_reproduce_urn() -> None:
    urn = simulate((2.0, 3.0), Constant(R=1.0), 200, seed=31)

    dyn = dyn_simulate((2.0, 3.0), 0.0, Constant(R=1.0), 200, seed=31)

    assert dyn.incumbent_shares[:, 0].tolist() == list(urn.shares[0])
    assert dyn.newcomer_shares.max() == 0.0


def test_dyn_simulate_shares_should_sum_to_one_with_newcomers() -> None:
    trajectory = dyn_simulate((3.0, 2.0), 5.0, Constant(R=1.0), 500, seed=8, stride=100)

    totals = trajectory.incumbent_shares.sum(axis=1) + trajectory.newcomer_shares

    assert totals == pytest.approx(np.ones(len(trajectory.times)))
    assert trajectory.times == (0, 100, 200, 300, 400, 500)
    assert trajectory.final_state.ledger.K >= 1


def test_dyn_ensemble_without_dilution_should_match_urn_ensemble() -> None:
    urn = ensemble(UrnExperiment(initial_coins=(2.0, 3.0), schedule=Constant(R=1.0), horizon=100, stride=25), 50, 9)

    dyn = dyn_ensemble(DynExperiment(incumbents=(2.0, 3.0), theta=0.0, schedule=Constant(R=1.0), horizon=100, stride=25), 50, 9)

    assert np.array_equal(dyn.snapshots, urn.snapshots)
    assert dyn.pool_snapshots.max() == 0.0


def test_expected_share_factor_should_shrink_after_one_step() -> None:
    factors = expected_share_factors(Constant(R=1.0), 10.0, 1.0, 3)

    assert factors[0] == 1.0
    assert factors[1] == pytest.approx(10.0 * 12.0 / (11.0 * 11.0), rel=1e-14)
    assert (np.diff(factors) < 0).all()


def test_expected_limit_ratio_should_telescope_under_constant_reward() -> None:
    T = 10_000
    ratio = expected_limit_ratio(Constant(R=1.0), 10.0, 1.0, T)
    N_T = supply_after(Constant(R=1.0), 10.0, T)

    assert ratio.value == pytest.approx(10.0 / 11.0 * (N_T + 1.0) / N_T, rel=1e-12)
    assert ratio.lower_bound == pytest.approx(10.0 / 11.0, rel=1e-3)
    assert ratio.lower_bound <= 10.0 / 11.0 <= ratio.value
    assert ratio.classification is LimitClass.POSITIVE


def test_expected_limit_ratio_should_be_one_without_dilution() -> None:
    ratio = expected_limit_ratio(PowerDecay(c=1.0, alpha=0.6), 10.0, 0.0, 1_000)

    assert ratio.value == 1.0
    assert ratio.tail_sum_bound == 0.0


def test_expected_limit_ratio_should_settle_within_tail_bound_for_fast_decaying_reward() -> None:
    schedule = PowerDecay(c=1.0, alpha=2.0)

    short = expected_limit_ratio(schedule, 10.0, 1.0, 1_000)
    long = expected_limit_ratio(schedule, 10.0, 1.0, 100_000)

    assert limit_classification(schedule) is LimitClass.ZERO
    assert long.value < short.value
    assert 0.0 < short.value - long.value <= short.tail_sum_bound
    assert short.tail_sum_bound == pytest.approx(1.0 / supply_after(schedule, 10.0, 1_000), rel=1e-9)
    assert long.tail_sum_bound < short.tail_sum_bound
    assert 0.0 < short.lower_bound <= long.value
    assert long.lower_bound <= long.value
    assert limit_classification(PowerDecay(c=1.0, alpha=1.0)) is LimitClass.UNDETERMINED


def test_expected_limit_ratio_should_reject_empty_truncation() -> None:
    with pytest.raises(DomainError):
        expected_limit_ratio(Constant(R=1.0), 10.0, 1.0, 0)


def test_dilution_report_should_compare_mean_share_with_product(tmp_path) -> None:
    config = DynExperiment(incumbents=(5.0, 5.0), theta=1.0, schedule=Constant(R=1.0), horizon=400, stride=100)
    summary = dyn_ensemble(config, 2_000, 17)

    report = dilution_report(summary, config)

    assert report.predicted[0, 0] == pytest.approx(0.5)
    assert report.max_deviation_in_se() <= 4.0
    assert report.newcomer_mean[0] == 0.0
    lines = report.to_csv(tmp_path / "dilution.csv").read_bytes().split(b"\r\n")
    assert lines[0] == b"t,mean_share_0,predicted_0,newcomer_share"
    assert lines[1].startswith(b"0,0.5,0.5,0")


def test_dilution_report_should_require_newcomer_share() -> None:
    config = DynExperiment(incumbents=(1.0, 1.0), theta=1.0, schedule=Constant(R=1.0), horizon=10)
    plain = ensemble(UrnExperiment(initial_coins=(1.0, 1.0), schedule=Constant(R=1.0), horizon=10), 4, 1)

    with pytest.raises(DomainError):
        dilution_report(plain, config)
