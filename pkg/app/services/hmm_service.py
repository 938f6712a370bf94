import numpy as np

from app.models.distribution import Distribution
from app.models.hmm import ForwardMessage, Hmm
from app.utils.exceptions import DegenerateEvidenceError, ParameterError
from app.utils.validators import validate_dimension


# -------------------------------------------------
# DENSE KERNELS (raw vectors, no validation)
# -------------------------------------------------
def predict_vector(transition: np.ndarray, v: np.ndarray) -> np.ndarray:
    return transition @ v


def bayes_update(likelihood: np.ndarray, predicted: np.ndarray, obs: int, time: int | None = None) -> np.ndarray:
    """Elementwise product with the likelihood row, then normalize."""
    joint = likelihood * predicted
    evidence = joint.sum()
    if not evidence > 0.0:
        raise DegenerateEvidenceError(obs=obs, time=time)
    return joint / evidence


def filter_vector(transition: np.ndarray, observation: np.ndarray, v: np.ndarray, obs: int, time: int | None = None) -> np.ndarray:
    return bayes_update(observation[obs], transition @ v, obs, time)


# -------------------------------------------------
# OPERATIONS
# -------------------------------------------------
def predict_step(model: Hmm, msg: ForwardMessage) -> ForwardMessage:
    """One transition: P(S_t) = sum_j P(S_t | j) P(S_{t-1} = j)."""
    validate_dimension(msg.dist.size, model.n_states, "forward message")
    return ForwardMessage(
        dist=Distribution(predict_vector(model.transition, msg.dist.probs)),
        time=msg.time + 1,
    )


def observation_distribution(model: Hmm, msg: ForwardMessage) -> Distribution:
    """P(O_t) = sum_s P(O_t | s) P(s)."""
    validate_dimension(msg.dist.size, model.n_states, "forward message")
    return Distribution(model.observation @ msg.dist.probs)


def filter_step(model: Hmm, msg: ForwardMessage, obs: int) -> ForwardMessage:
    """
    Predict, weight by P(obs | s), renormalize. The normalizer is
    dropped; zero evidence raises instead of resetting the message.
    """
    validate_dimension(msg.dist.size, model.n_states, "forward message")
    _validate_obs(model, obs)
    posterior = filter_vector(
        model.transition, model.observation, msg.dist.probs, obs, msg.time + 1
    )
    return ForwardMessage(dist=Distribution(posterior), time=msg.time + 1)


def sample_trajectory(model: Hmm, steps: int, seed: int) -> list[tuple[int, int]]:
    """
    (state, observation) pairs for times 0..steps-1: S_0 from the prior,
    then transition columns; each O_t from the observation column of S_t.
    """
    if steps < 1:
        raise ParameterError(f"steps must be >= 1, got {steps}")

    rng = np.random.default_rng(seed)
    prior_cdf = np.cumsum(model.prior.probs)
    transition_cdf = np.cumsum(model.transition, axis=0)
    observation_cdf = np.cumsum(model.observation, axis=0)

    draws = rng.random((steps, 2))
    trajectory: list[tuple[int, int]] = []

    state = _draw(prior_cdf, draws[0, 0])
    for t in range(steps):
        if t > 0:
            state = _draw(transition_cdf[:, state], draws[t, 0])
        obs = _draw(observation_cdf[:, state], draws[t, 1])
        trajectory.append((state, obs))

    return trajectory


def stationary_distribution(model: Hmm, tol: float = 1e-13, max_iter: int = 100_000) -> Distribution:
    """Power iteration from the uniform distribution (Cesaro average as fallback for periodic chains)."""
    v = np.full(model.n_states, 1.0 / model.n_states)
    running = np.zeros_like(v)

    for _ in range(max_iter):
        nxt = model.transition @ v
        nxt /= nxt.sum()
        running += nxt
        if np.abs(nxt - v).sum() < tol:
            return Distribution(nxt)
        v = nxt

    average = running / max_iter
    return Distribution(average / average.sum())


# -------------------------------------------------
# HELPERS
# -------------------------------------------------
def _draw(cdf: np.ndarray, u: float) -> int:
    # side="right" never lands on a zero-probability event
    index = int(np.searchsorted(cdf, u, side="right"))
    return min(index, cdf.size - 1)


def _validate_obs(model: Hmm, obs: int) -> None:
    if not (0 <= obs < model.n_obs):
        raise ParameterError(f"observation id must be in [0, {model.n_obs}), got {obs}")
