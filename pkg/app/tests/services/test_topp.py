import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.models.distribution import Distribution
from app.models.hmm import ForwardMessage
from app.services.dist_service import tv_distance
from app.services.sparse_service import csr_from_dense, densify
from app.services.topp_service import build_top_p_hmm, sparsity, truncate_columns, truncate_message
from app.tests.conftest import SUNNY, SUNNY_TOP_09, WEATHER_TOP_07, random_hmm
from app.utils.exceptions import ParameterError


def test_weather_top_07_transitions(weather):
    topp = build_top_p_hmm(weather, 0.7)
    assert_allclose(densify(topp.transition_csr), WEATHER_TOP_07, rtol=0, atol=1e-12)
    assert topp.transition_csr.nnz == 19
    assert topp.report.transition_sparsity == pytest.approx(17 / 36)


def test_weather_top_09_sunny_column(weather):
    topp = build_top_p_hmm(weather, 0.9)
    assert_allclose(densify(topp.transition_csr)[:, SUNNY], SUNNY_TOP_09, rtol=0, atol=1e-12)


def test_p_one_keeps_everything(weather):
    topp = build_top_p_hmm(weather, 1.0)
    assert_allclose(densify(topp.transition_csr), weather.transition, rtol=0, atol=1e-12)
    assert_allclose(densify(topp.observation_csr), weather.observation, rtol=0, atol=1e-12)
    assert_allclose(topp.prior.probs, weather.prior.probs, rtol=0, atol=1e-12)
    assert topp.report.transition_sparsity == 0.0


@pytest.mark.parametrize("p", [0.0, 1.5])
def test_invalid_p(weather, p):
    with pytest.raises(ParameterError):
        build_top_p_hmm(weather, p)


def test_prior_is_truncated(weather):
    topp = build_top_p_hmm(weather, 0.4)
    # uniform prior over six states: ties go to the lowest ids
    assert topp.prior.support == (0, 1, 2)
    assert topp.report.prior_kept_mass == pytest.approx(0.5)


def test_as_hmm_is_a_valid_model(weather):
    truncated = build_top_p_hmm(weather, 0.7).as_hmm()
    assert truncated.state_labels == weather.state_labels
    assert_allclose(truncated.transition, WEATHER_TOP_07, rtol=0, atol=1e-12)


@pytest.mark.parametrize("p", [0.5, 0.7, 0.9])
def test_every_column_within_truncation_error(small_bell, p):
    topp = build_top_p_hmm(small_bell, p)
    transition = densify(topp.transition_csr)
    observation = densify(topp.observation_csr)

    for j in range(small_bell.n_states):
        assert tv_distance(small_bell.transition[:, j], transition[:, j]) <= 1 - p + 1e-9
        assert tv_distance(small_bell.observation[:, j], observation[:, j]) <= 1 - p + 1e-9

    assert topp.report.min_kept_mass >= p - 1e-12
    assert len(topp.report.per_column_kept_mass) == small_bell.n_states


def test_sparsity_never_grows_with_p():
    rng = np.random.default_rng(11)
    for _ in range(5):
        model = random_hmm(rng, 30, 5)
        values = [
            build_top_p_hmm(model, p).report.transition_sparsity
            for p in (0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0)
        ]
        assert values == sorted(values, reverse=True)


def test_truncating_twice_keeps_a_subset(weather):
    once = build_top_p_hmm(weather, 0.7)
    twice = build_top_p_hmm(once.as_hmm(), 0.7)
    first, second = densify(once.transition_csr), densify(twice.transition_csr)
    assert np.all((second > 0) <= (first > 0))


def test_truncating_bell_twice_is_stable(small_bell):
    once = build_top_p_hmm(small_bell, 0.9)
    twice = build_top_p_hmm(once.as_hmm(), 0.9)
    first, second = densify(once.transition_csr), densify(twice.transition_csr)
    assert np.array_equal(first > 0, second > 0)
    assert_allclose(first, second, rtol=0, atol=1e-12)


def test_truncate_columns_reports_kept_mass(weather):
    out, kept = truncate_columns(weather.transition, 0.9)
    assert kept[SUNNY] == pytest.approx(0.9, abs=1e-12)
    assert_allclose(out.sum(axis=0), 1.0, atol=1e-12)


def test_sparsity_of_empty_and_full():
    assert sparsity(csr_from_dense(np.zeros((2, 2)))) == 1.0
    assert sparsity(csr_from_dense(np.ones((2, 2)))) == 0.0


def test_truncate_message_keeps_time():
    msg = ForwardMessage(dist=Distribution([0.1, 0.6, 0.3]), time=4)
    out = truncate_message(msg, 0.8)
    assert out.time == 4
    assert out.dist.support == (1, 2)
    assert_allclose(out.dist.probs, [0.0, 2 / 3, 1 / 3])
