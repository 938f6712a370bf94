from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from app.models.distribution import Distribution
from app.utils.exceptions import ModelValidationError
from app.utils.validators import validate_column_stochastic


@dataclass(frozen=True, eq=False)
class Hmm:
    """
    Hidden Markov model with column-stochastic parameters.

    transition[i, j] = P(S_t = i | S_{t-1} = j)   shape (n_states, n_states)
    observation[o, j] = P(O_t = o | S_t = j)      shape (n_obs, n_states)

    The layout matches the "Next/current" convention of a printed
    transition table: columns are the current state. Row-major
    readers must not transpose.
    """

    prior: Distribution
    transition: np.ndarray
    observation: np.ndarray
    state_labels: Optional[tuple[str, ...]] = None
    obs_labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        prior = self.prior if isinstance(self.prior, Distribution) else Distribution(self.prior)
        transition = _frozen(self.transition)
        observation = _frozen(self.observation)

        validate_column_stochastic(transition, "transition")
        validate_column_stochastic(observation, "observation")

        n_states = transition.shape[1]
        if transition.shape[0] != n_states:
            raise ModelValidationError(
                f"transition must be square, got shape {transition.shape}"
            )
        if observation.shape[1] != n_states:
            raise ModelValidationError(
                f"observation must have {n_states} columns, got {observation.shape[1]}"
            )
        if prior.size != n_states:
            raise ModelValidationError(
                f"prior must have {n_states} entries, got {prior.size}"
            )

        state_labels = _labels(self.state_labels, n_states, "state_labels")
        obs_labels = _labels(self.obs_labels, observation.shape[0], "obs_labels")

        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "transition", transition)
        object.__setattr__(self, "observation", observation)
        object.__setattr__(self, "state_labels", state_labels)
        object.__setattr__(self, "obs_labels", obs_labels)

    @property
    def n_states(self) -> int:
        return int(self.transition.shape[0])

    @property
    def n_obs(self) -> int:
        return int(self.observation.shape[0])

    def transition_column(self, state: int) -> Distribution:
        return Distribution(self.transition[:, state])

    def state_index(self, label: str) -> int:
        if self.state_labels is None:
            raise ModelValidationError("model has no state labels")
        return self.state_labels.index(label)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hmm):
            return NotImplemented
        return (
            self.prior == other.prior
            and np.array_equal(self.transition, other.transition)
            and np.array_equal(self.observation, other.observation)
            and self.state_labels == other.state_labels
            and self.obs_labels == other.obs_labels
        )

    def __repr__(self) -> str:
        return f"Hmm(n_states={self.n_states}, n_obs={self.n_obs})"


@dataclass(frozen=True)
class ForwardMessage:
    """P(S_t) at time t (given the observations entered so far)."""

    dist: Distribution
    time: int = 0

    @classmethod
    def initial(cls, model: Hmm) -> "ForwardMessage":
        return cls(dist=model.prior, time=0)


def _frozen(values) -> np.ndarray:
    """Read-only float64 array; a caller's writable array is copied, nothing else is."""
    array = np.asarray(values, dtype=np.float64)
    if array is values and array.flags.writeable:
        array = array.copy()
    array.setflags(write=False)
    return array


def _labels(labels: Optional[Sequence[str]], expected: int, name: str):
    if labels is None:
        return None
    labels = tuple(str(label) for label in labels)
    if len(labels) != expected:
        raise ModelValidationError(
            f"{name} has {len(labels)} entries, expected {expected}"
        )
    return labels
