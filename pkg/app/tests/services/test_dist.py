import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st
from numpy.testing import assert_allclose

from app.models.distribution import Distribution
from app.services.dist_service import (
    sorted_order,
    top_p_distribution,
    top_p_set,
    total_variation,
    truncate_vector,
)
from app.tests.conftest import FOGGY, HEAVY, LIGHT, PARTLY, SUNNY, SUNNY_COLUMN, SUNNY_TOP_09
from app.utils.exceptions import ModelValidationError, ParameterError

P_VALUES = (0.5, 0.7, 0.9, 0.99)


# -------------------------------------------------
# DISTRIBUTION
# -------------------------------------------------
def test_distribution_rejects_bad_vectors():
    with pytest.raises(ModelValidationError):
        Distribution([0.5, 0.6])
    with pytest.raises(ModelValidationError):
        Distribution([1.2, -0.2])
    with pytest.raises(ModelValidationError):
        Distribution([])


def test_distribution_is_read_only():
    dist = Distribution([0.5, 0.5])
    with pytest.raises(ValueError):
        dist.probs[0] = 1.0


def test_sorted_order_breaks_ties_by_id():
    order = sorted_order(np.array([0.2, 0.4, 0.2, 0.2]))
    assert order.tolist() == [1, 0, 2, 3]


# -------------------------------------------------
# TOP-P SET
# -------------------------------------------------
def test_top_p_set_sunny_column():
    assert set(top_p_set(Distribution(SUNNY_COLUMN), 0.9)) == {PARTLY, LIGHT, FOGGY, SUNNY}


def test_top_p_set_grows_past_the_exact_cut():
    chosen = top_p_set(Distribution(SUNNY_COLUMN), 0.91)
    assert set(chosen) == {PARTLY, LIGHT, FOGGY, SUNNY, HEAVY}


@pytest.mark.parametrize("p", P_VALUES + (1.0,))
def test_top_p_set_point_mass(p):
    assert top_p_set(Distribution([1.0, 0.0, 0.0]), p) == (0,)


@pytest.mark.parametrize("p", [0.0, -0.1, 1.1])
def test_invalid_p(p):
    with pytest.raises(ParameterError):
        top_p_set(Distribution(SUNNY_COLUMN), p)
    with pytest.raises(ParameterError):
        top_p_distribution(Distribution(SUNNY_COLUMN), p)


def test_ties_resolved_toward_lower_ids():
    assert top_p_set(Distribution([0.25] * 4), 0.5) == (0, 1)


# -------------------------------------------------
# TOP-P DISTRIBUTION
# -------------------------------------------------
def test_top_p_distribution_sunny_column():
    result = top_p_distribution(Distribution(SUNNY_COLUMN), 0.9)
    assert_allclose(result.distribution.probs, SUNNY_TOP_09, rtol=0, atol=1e-12)
    assert result.kept_indices == (0, 1, 2, 3)
    assert result.kept_mass == pytest.approx(0.9, abs=1e-12)


def test_top_p_distribution_point_mass():
    point = Distribution.point_mass(5, 2)
    result = top_p_distribution(point, 0.5)
    assert result.distribution == point
    assert result.kept_mass == 1.0


def test_uniform_800_keeps_721_events():
    # 720 steps of 1/800 accumulate to just below 0.9, so one more is needed
    result = top_p_distribution(Distribution.uniform(800), 0.9)
    assert len(result.kept_indices) == 721
    assert result.kept_indices == tuple(range(721))
    assert result.kept_mass == pytest.approx(721 / 800, abs=1e-12)
    assert_allclose(result.distribution.probs[:721], 1 / 721, rtol=1e-12)
    assert not result.distribution.probs[721:].any()


def test_never_reaching_p_keeps_the_positive_support():
    probs = np.array([0.1] * 10)
    out, kept_mass, kept = truncate_vector(probs, 1.0)
    assert len(kept) == 10
    assert out.sum() == pytest.approx(1.0, abs=1e-12)
    assert kept_mass <= 1.0


def test_truncate_keeps_zero_entries_out():
    out, _, kept = truncate_vector(np.array([0.0, 0.7, 0.3, 0.0]), 1.0)
    assert sorted(kept.tolist()) == [1, 2]
    assert out[0] == 0.0 and out[3] == 0.0


def test_second_pass_keeps_a_subset():
    first = top_p_distribution(Distribution([0.45, 0.45, 0.1]), 0.5)
    second = top_p_distribution(first.distribution, 0.5)
    assert first.kept_indices == (0, 1)
    assert second.kept_indices == (0,)
    assert set(second.kept_indices) <= set(first.kept_indices)


# -------------------------------------------------
# TOTAL VARIATION
# -------------------------------------------------
def test_total_variation_basics():
    dist = Distribution(SUNNY_COLUMN)
    assert total_variation(dist, dist) == 0.0
    assert total_variation(Distribution([1.0, 0.0]), Distribution([0.0, 1.0])) == 1.0


def test_total_variation_against_top_p():
    dist = Distribution(SUNNY_COLUMN)
    truncated = top_p_distribution(dist, 0.9).distribution
    assert total_variation(dist, truncated) == pytest.approx(0.1, abs=1e-12)


def test_total_variation_size_mismatch():
    with pytest.raises(ParameterError):
        total_variation(Distribution([1.0]), Distribution([0.5, 0.5]))


@hypothesis_settings(max_examples=100, deadline=None)
@given(n=st.integers(2, 200), seed=st.integers(0, 2**32 - 1))
def test_total_variation_is_a_metric(n, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (Distribution(rng.dirichlet(np.full(n, 0.5))) for _ in range(3))

    assert total_variation(a, b) == total_variation(b, a)
    assert 0.0 <= total_variation(a, b) <= 1.0 + 1e-12
    assert total_variation(a, c) <= total_variation(a, b) + total_variation(b, c) + 1e-12


# -------------------------------------------------
# TRUNCATION ERROR
# -------------------------------------------------
def test_truncation_error_over_10k_distributions():
    rng = np.random.default_rng(2024)
    for trial in range(10_000):
        dim = int(rng.integers(2, 1001))
        p = P_VALUES[trial % len(P_VALUES)]
        alpha = rng.choice([0.05, 0.5, 1.0])
        dist = Distribution(rng.dirichlet(np.full(dim, alpha)))

        result = top_p_distribution(dist, p)
        tv = total_variation(dist, result.distribution)

        assert tv <= 1.0 - p + 1e-9
        assert abs(tv - (1.0 - result.kept_mass)) <= 1e-9


@hypothesis_settings(max_examples=200, deadline=None)
@given(
    weights=st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=2, max_size=60),
    p=st.sampled_from(P_VALUES),
)
def test_truncation_error_property(weights, p):
    weights = np.array(weights)
    if weights.sum() <= 0.0:
        return
    dist = Distribution(weights / weights.sum())

    result = top_p_distribution(dist, p)
    tv = total_variation(dist, result.distribution)

    assert tv <= 1.0 - p + 1e-9
    assert result.kept_mass >= p or len(result.kept_indices) == len(dist.support)
    assert set(result.distribution.support) == set(result.kept_indices)
