from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

from app.core.errors import DomainError
from app.limits import (
    GEM,
    BetaMarginal,
    DirichletLaw,
    GammaRatio,
    PitmanYor,
    TwoPointAbsorption,
    dirichlet_density,
    gem_stick_breaking,
    ks_critical_value,
    ks_distance,
    law_from_dict,
    law_to_dict,
    pitman_yor_weights,
    sample_limit,
)


@pytest.mark.parametrize(
    ("x", "a", "expected"),
    [
        ((0.3, 0.7), (1.0, 1.0), 1.0),
        ((0.2, 0.3, 0.5), (1.0, 1.0, 1.0), 2.0),
        ((0.5, 0.5), (2.0, 1.0), 1.0),
    ],
)
def test_dirichlet_density_should_match_closed_form(x, a, expected: float) -> None:
    assert dirichlet_density(x, a) == pytest.approx(expected, rel=1e-12)


def test_dirichlet_density_should_reject_points_off_the_simplex() -> None:
    with pytest.raises(DomainError):
        dirichlet_density((0.5, 0.6), (1.0, 1.0))
    with pytest.raises(DomainError):
        dirichlet_density((0.0, 1.0), (1.0, 1.0))


def test_dirichlet_marginal_should_be_beta_with_remaining_mass() -> None:
    law = DirichletLaw(concentration=(2.0, 3.0, 5.0))

    assert law.marginal(0) == BetaMarginal(a=2.0, b=8.0)
    assert law.mean() == pytest.approx([0.2, 0.3, 0.5])


def test_dirichlet_sampler_coordinate_should_pass_ks_against_beta_marginal() -> None:
    law = DirichletLaw(concentration=(2.0, 3.0, 5.0))
    samples = sample_limit(law, 5_000, seed=17)

    assert samples.shape == (5_000, 3)
    assert samples.sum(axis=1) == pytest.approx(np.ones(5_000))
    assert ks_distance(samples[:, 1], law.marginal(1).cdf) < ks_critical_value(5_000, level=0.999)


def test_gamma_ratio_should_give_doubling_probability_of_medium_investor() -> None:
    law = GammaRatio(shape=1.0, scale=1.0)

    assert law.sf(2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)
    assert law.mean() == 1.0


def test_two_point_sampler_should_hit_one_with_probability_p() -> None:
    n = 100_000
    samples = sample_limit(TwoPointAbsorption(p=0.25), n, seed=3)
    se = math.sqrt(0.25 * 0.75 / n)

    assert set(np.unique(samples)) <= {0.0, 1.0}
    assert abs(samples.mean() - 0.25) <= 4.0 * se


def test_uniform_beta_sampler_should_pass_ks_against_uniform_cdf() -> None:
    samples = sample_limit(BetaMarginal(a=1.0, b=1.0), 10_000, seed=5)

    assert ks_distance(samples, stats.uniform.cdf) < ks_critical_value(10_000, level=0.999)


def test_exponential_sampler_should_have_unit_mean() -> None:
    n = 20_000
    samples = sample_limit(GammaRatio(shape=1.0, scale=1.0), n, seed=9)

    assert abs(samples.mean() - 1.0) <= 4.0 / math.sqrt(n)


def test_law_constructors_should_reject_invalid_parameters() -> None:
    with pytest.raises(DomainError):
        TwoPointAbsorption(p=1.5)
    with pytest.raises(DomainError):
        GEM(theta=0.0)
    with pytest.raises(DomainError):
        PitmanYor(discount=0.5, strength=-0.6)
    with pytest.raises(DomainError):
        DirichletLaw(concentration=(1.0,))


def test_law_descriptor_should_restore_dirichlet_law() -> None:
    law = DirichletLaw(concentration=(1.0, 2.0))

    payload = law_to_dict(law)

    assert payload == {"kind": "dirichlet", "concentration": [1.0, 2.0]}
    assert law_from_dict(payload) == law
    with pytest.raises(DomainError):
        law_from_dict({"kind": "cauchy"})


def test_gem_first_weight_should_equal_first_stick_with_beta_mean() -> None:
    n = 20_000
    breaks = gem_stick_breaking(10.0, 5, seed=11, samples=n)
    first = breaks.weights[:, 0]

    assert np.array_equal(first, breaks.sticks[:, 0])
    assert abs(first.mean() - 1.0 / 11.0) <= 4.0 * first.std(ddof=1) / math.sqrt(n)


def test_gem_residual_should_shrink_geometrically_in_mean() -> None:
    n = 20_000
    breaks = gem_stick_breaking(10.0, 4, seed=12, samples=n)
    residual = breaks.residual

    assert abs(residual.mean() - (10.0 / 11.0) ** 4) <= 4.0 * residual.std(ddof=1) / math.sqrt(n)
    assert breaks.weights.sum(axis=1) + residual == pytest.approx(np.ones(n))


def test_pitman_yor_without_discount_should_equal_gem_for_same_seed() -> None:
    gem = gem_stick_breaking(3.0, 6, seed=21, samples=50)
    py = pitman_yor_weights(0.0, 3.0, 6, seed=21, samples=50)

    assert np.array_equal(gem.weights, py.weights)


def test_pitman_yor_first_stick_should_have_beta_mean() -> None:
    n = 20_000
    breaks = pitman_yor_weights(0.5, 1.0, 3, seed=8, samples=n)
    first = breaks.sticks[:, 0]

    assert abs(first.mean() - 0.25) <= 4.0 * first.std(ddof=1) / math.sqrt(n)
    assert PitmanYor(discount=0.5, strength=1.0).mean() == pytest.approx(0.25)


def test_pitman_yor_weights_should_be_positive_with_partial_sums_below_one() -> None:
    breaks = pitman_yor_weights(0.3, 0.5, 20, seed=2, samples=100)

    assert (breaks.weights > 0).all()
    assert (np.cumsum(breaks.weights, axis=1) < 1.0).all()


def test_gem_sampler_should_return_weight_rows() -> None:
    samples = sample_limit(GEM(theta=2.0), 10, seed=1, j_max=4)

    assert samples.shape == (10, 4)


def test_ks_distance_should_be_half_for_single_median_sample() -> None:
    assert ks_distance([0.0], stats.norm.cdf) == pytest.approx(0.5)


def test_ks_distance_should_approach_one_for_far_tail_samples() -> None:
    assert ks_distance([-50.0] * 10, stats.norm.cdf) == pytest.approx(1.0)


def test_ks_distance_should_reject_empty_samples() -> None:
    with pytest.raises(DomainError):
        ks_distance([], stats.norm.cdf)


def test_ks_distance_should_stay_below_critical_value_for_matching_law() -> None:
    law = GammaRatio(shape=2.0, scale=0.5)
    samples = sample_limit(law, 10_000, seed=31)

    assert ks_distance(samples, law.cdf) < ks_critical_value(10_000, level=0.999)
    assert ks_critical_value(10_000) == pytest.approx(1.6276 / 100.0, rel=1e-3)
