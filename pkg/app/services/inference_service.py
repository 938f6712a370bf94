import time
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from app.models.hmm import Hmm
from app.models.topp_hmm import TopPHmm
from app.schemas.experiment_schema import TruncationMode
from app.services.dist_service import truncate_vector
from app.services.hmm_service import filter_vector, predict_vector, sample_trajectory
from app.services.sparse_service import advance_vector, csr_from_dense, sparse_filter_vector
from app.utils.exceptions import ParameterError


@dataclass(frozen=True)
class ChainRun:
    """
    Forward messages for times 0..horizon (one row per time) and the
    cumulative wall-clock milliseconds spent in the loop after each step.
    cumulative_ms[0] is 0: the prior is not a step.
    """

    messages: np.ndarray
    cumulative_ms: np.ndarray

    @property
    def total_ms(self) -> float:
        return float(self.cumulative_ms[-1])


def observation_schedule(model: Hmm, horizon: int, period: int, seed: int) -> dict[int, int]:
    """
    Ground-truth observations drawn once from `model`, entered at every
    time t >= 1 with t % period == 0.
    """
    if period < 1:
        raise ParameterError(f"observation period must be >= 1, got {period}")

    trajectory = sample_trajectory(model, horizon + 1, seed)
    return {
        t: trajectory[t][1]
        for t in range(1, horizon + 1)
        if t % period == 0
    }


def run_dense_chain(model: Hmm, horizon: int, observations: Mapping[int, int] | None = None) -> ChainRun:
    _check_horizon(horizon)
    observations = observations or {}

    transition = model.transition
    observation = model.observation

    messages = np.empty((horizon + 1, model.n_states))
    cumulative = np.zeros(horizon + 1)
    v = model.prior.probs
    messages[0] = v

    elapsed = 0.0
    for t in range(1, horizon + 1):
        started = time.perf_counter()
        obs = observations.get(t)
        if obs is None:
            v = predict_vector(transition, v)
        else:
            v = filter_vector(transition, observation, v, obs, t)
        elapsed += time.perf_counter() - started

        messages[t] = v
        cumulative[t] = elapsed * 1000.0

    return ChainRun(messages=messages, cumulative_ms=cumulative)


def run_topp_chain(
    topp: TopPHmm,
    horizon: int,
    observations: Mapping[int, int] | None = None,
    mode: TruncationMode = TruncationMode.MODEL,
) -> ChainRun:
    """
    MODEL: sparse inference on the truncated matrices.
    MESSAGE: propagate with the base model's matrices (CSR) and take the
    top-p of the forward message after every step.
    """
    _check_horizon(horizon)
    observations = observations or {}
    mode = TruncationMode(mode)

    if mode is TruncationMode.MODEL:
        t_csr, b_csr = topp.transition_csr, topp.observation_csr
        message_p = None
    else:
        t_csr = csr_from_dense(topp.base.transition)
        b_csr = csr_from_dense(topp.base.observation)
        message_p = topp.p

    messages = np.empty((horizon + 1, topp.n_states))
    cumulative = np.zeros(horizon + 1)
    v = topp.prior.probs
    messages[0] = v

    elapsed = 0.0
    for t in range(1, horizon + 1):
        started = time.perf_counter()
        obs = observations.get(t)
        if obs is None:
            v = advance_vector(t_csr, v)
        else:
            v = sparse_filter_vector(t_csr, b_csr, v, obs, t)
        if message_p is not None:
            v, _, _ = truncate_vector(v, message_p)
        elapsed += time.perf_counter() - started

        messages[t] = v
        cumulative[t] = elapsed * 1000.0

    return ChainRun(messages=messages, cumulative_ms=cumulative)


def _check_horizon(horizon: int) -> None:
    if horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon}")
