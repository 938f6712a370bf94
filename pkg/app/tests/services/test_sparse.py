import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st
from numpy.testing import assert_allclose

from app.models.csr import CsrMatrix
from app.models.distribution import Distribution
from app.models.hmm import ForwardMessage
from app.services.dist_service import tv_distance
from app.services.hmm_service import filter_step, predict_step, sample_trajectory
from app.services.sparse_service import (
    SpmvCounter,
    csr_from_dense,
    densify,
    sparse_filter_step,
    sparse_observation_distribution,
    sparse_predict_step,
    spmv,
)
from app.tests.conftest import FOGGY, SUNNY, WEATHER_TOP_07
from app.utils.exceptions import DegenerateEvidenceError, ParameterError


def random_sparse(rng: np.random.Generator, rows: int, cols: int, zeros: float) -> np.ndarray:
    m = rng.random((rows, cols))
    m[rng.random((rows, cols)) < zeros] = 0.0
    return m


# -------------------------------------------------
# CONVERSION
# -------------------------------------------------
def test_identity_layout():
    csr = csr_from_dense(np.eye(2))
    assert csr.row_starts.tolist() == [0, 1, 2]
    assert csr.entries == [(0, 1.0), (1, 1.0)]


def test_all_zero_matrix():
    csr = csr_from_dense(np.zeros((3, 4)))
    assert csr.nnz == 0
    assert csr.entries == []
    assert csr.row_starts.tolist() == [0, 0, 0, 0]


def test_truncated_weather_entry_count():
    assert csr_from_dense(WEATHER_TOP_07).nnz == 19


def test_zero_tolerance_prunes_small_entries():
    csr = csr_from_dense(np.array([[1e-12, 0.5], [0.25, 0.0]]), zero_tol=1e-9)
    assert csr.entries == [(1, 0.5), (0, 0.25)]
    with pytest.raises(ParameterError):
        csr_from_dense(np.eye(2), zero_tol=-1.0)


def test_densify_inverts_conversion():
    rng = np.random.default_rng(0)
    m = random_sparse(rng, 40, 30, 0.8)
    csr = csr_from_dense(m)
    assert np.array_equal(densify(csr), m)
    assert csr_from_dense(densify(csr)) == csr


@pytest.mark.parametrize(
    "row_starts, cols, vals",
    [
        ([0, 1, 2], [0, 1], [1.0, 0.0]),        # stored zero
        ([0, 2, 2], [1, 0], [0.5, 0.5]),        # columns out of order
        ([0, 2, 2], [1, 1], [0.5, 0.5]),        # repeated column
        ([0, 1, 3], [0, 1], [1.0, 1.0]),        # row_starts past the end
        ([0, 1, 2], [0, 2], [1.0, 1.0]),        # column out of range
    ],
)
def test_invalid_layouts_are_rejected(row_starts, cols, vals):
    with pytest.raises(ParameterError):
        CsrMatrix(n_rows=2, n_cols=2, row_starts=row_starts, cols=cols, vals=vals)


def test_columns_may_restart_on_a_new_row():
    csr = CsrMatrix(n_rows=2, n_cols=3, row_starts=[0, 2, 3], cols=[1, 2, 0], vals=[0.1, 0.2, 0.3])
    assert csr.row(0) == [(1, 0.1), (2, 0.2)]
    assert csr.row(1) == [(0, 0.3)]


# -------------------------------------------------
# SPMV
# -------------------------------------------------
def test_spmv_identity():
    assert_allclose(spmv(csr_from_dense(np.eye(2)), np.array([0.3, 0.7])), [0.3, 0.7])


def test_spmv_truncated_weather_sunny_column():
    out = spmv(csr_from_dense(WEATHER_TOP_07), np.eye(6)[SUNNY])
    assert_allclose(out, [0.4, 1 / 3, 0.0, 4 / 15, 0.0, 0.0], rtol=0, atol=1e-12)


def test_spmv_matches_dense_product():
    rng = np.random.default_rng(1)
    m = random_sparse(rng, 200, 200, 0.9)
    v = rng.dirichlet(np.ones(200))
    assert np.max(np.abs(spmv(csr_from_dense(m), v) - m @ v)) <= 1e-12


def test_spmv_dense_oracle_500_matrices():
    rng = np.random.default_rng(7)
    for _ in range(500):
        rows, cols = rng.integers(1, 501, size=2)
        m = random_sparse(rng, int(rows), int(cols), float(rng.uniform(0.0, 0.99)))
        v = rng.dirichlet(np.ones(int(cols)))
        assert np.max(np.abs(spmv(csr_from_dense(m), v) - m @ v)) <= 1e-12


@hypothesis_settings(max_examples=100, deadline=None)
@given(
    rows=st.integers(1, 40),
    cols=st.integers(1, 40),
    zeros=st.floats(0.0, 1.0),
    seed=st.integers(0, 2**32 - 1),
)
def test_counted_spmv_agrees_and_counts_entries(rows, cols, zeros, seed):
    rng = np.random.default_rng(seed)
    m = random_sparse(rng, rows, cols, zeros)
    v = rng.random(cols)
    csr = csr_from_dense(m)

    counter = SpmvCounter()
    counted = spmv(csr, v, counter)

    assert counter.multiply_adds == csr.nnz
    assert counter.calls == 1
    assert np.max(np.abs(counted - m @ v), initial=0.0) <= 1e-12
    assert np.max(np.abs(counted - spmv(csr, v)), initial=0.0) <= 1e-12


def test_spmv_dimension_mismatch():
    with pytest.raises(ParameterError):
        spmv(csr_from_dense(np.eye(3)), np.ones(2))


# -------------------------------------------------
# INFERENCE STEPS
# -------------------------------------------------
def test_sparse_predict_matches_dense(weather):
    msg = ForwardMessage.initial(weather)
    sparse = sparse_predict_step(csr_from_dense(weather.transition), msg)
    dense = predict_step(weather, msg)
    assert_allclose(sparse.dist.probs, dense.dist.probs, rtol=0, atol=1e-12)
    assert sparse.time == dense.time == 1


def test_sparse_predict_truncated_foggy():
    msg = ForwardMessage(dist=Distribution.point_mass(6, FOGGY))
    out = sparse_predict_step(csr_from_dense(WEATHER_TOP_07), msg)
    assert_allclose(out.dist.probs, [3 / 7, 2 / 7, 2 / 7, 0, 0, 0], rtol=0, atol=1e-12)


def test_sparse_predict_identity():
    msg = ForwardMessage(dist=Distribution([0.2, 0.3, 0.5]))
    out = sparse_predict_step(csr_from_dense(np.eye(3)), msg)
    assert_allclose(out.dist.probs, msg.dist.probs)


def test_sparse_observation_distribution_matches_dense(weather):
    msg = ForwardMessage(dist=Distribution.point_mass(6, SUNNY))
    dist = sparse_observation_distribution(csr_from_dense(weather.observation), msg)
    assert dist[0] == pytest.approx(0.35, abs=1e-12)


def test_sparse_filter_matches_dense_over_50_steps(weather):
    t_csr = csr_from_dense(weather.transition)
    b_csr = csr_from_dense(weather.observation)
    observations = [obs for _, obs in sample_trajectory(weather, 51, seed=4)]

    dense = sparse = ForwardMessage.initial(weather)
    for obs in observations[1:]:
        dense = filter_step(weather, dense, obs)
        sparse = sparse_filter_step(t_csr, b_csr, sparse, obs)
        assert np.max(np.abs(dense.dist.probs - sparse.dist.probs)) <= 1e-12


def test_untruncated_sparse_prediction_tracks_dense(weather):
    t_csr = csr_from_dense(weather.transition)
    dense = sparse = ForwardMessage.initial(weather)
    for _ in range(50):
        dense = predict_step(weather, dense)
        sparse = sparse_predict_step(t_csr, sparse)
    assert tv_distance(dense.dist.probs, sparse.dist.probs) <= 1e-9


def test_sparse_filter_deterministic_emission():
    eye = csr_from_dense(np.eye(3))
    msg = ForwardMessage(dist=Distribution([0.2, 0.3, 0.5]))
    assert sparse_filter_step(eye, eye, msg, 1).dist == Distribution.point_mass(3, 1)


def test_sparse_filter_zero_likelihood():
    eye = csr_from_dense(np.eye(2))
    msg = ForwardMessage(dist=Distribution.point_mass(2, 0))
    with pytest.raises(DegenerateEvidenceError):
        sparse_filter_step(eye, eye, msg, 1)


def test_sparse_filter_rejects_unknown_observation():
    eye = csr_from_dense(np.eye(2))
    with pytest.raises(ParameterError):
        sparse_filter_step(eye, eye, ForwardMessage(dist=Distribution.uniform(2)), 5)
