import logging
from collections import Counter
from pathlib import Path

import numpy as np

from app.models.distribution import Distribution
from app.models.hmm import Hmm
from app.schemas.generator_schema import BellSpec, CorpusSpec
from app.utils.exceptions import CorpusError, ParameterError

logger = logging.getLogger(__name__)

WEATHER_STATES = (
    "partly cloudy",
    "light rain",
    "foggy",
    "sunny",
    "heavy rain",
    "thunderstorm",
)
WEATHER_OBSERVATIONS = ("raincoat", "no raincoat")

# next state (rows) given current state (columns)
WEATHER_TRANSITION = (
    (0.3, 0.2, 0.3, 0.3, 0.1, 0.1),
    (0.2, 0.2, 0.2, 0.25, 0.2, 0.2),
    (0.1, 0.1, 0.2, 0.15, 0.1, 0.1),
    (0.2, 0.1, 0.1, 0.2, 0.1, 0.1),
    (0.1, 0.2, 0.1, 0.06, 0.2, 0.3),
    (0.1, 0.2, 0.1, 0.04, 0.3, 0.2),
)

# P(raincoat | state). Rainy states always; the 0.35 for partly cloudy
# and foggy is a fixture choice, only the sunny value is pinned down.
WEATHER_RAINCOAT = (0.35, 1.0, 0.35, 0.35, 1.0, 1.0)


# -------------------------------------------------
# BELL HMM
# -------------------------------------------------
def bell_weights(spec: BellSpec) -> tuple[float, float]:
    """
    (heavy entry, light entry). The heavy entry starts at
    heavy_mass / heavy_count and is raised ulp by ulp until its running
    sum reaches heavy_mass, so a top-heavy_mass cut keeps exactly the
    heavy group.
    """
    heavy = spec.heavy_mass / spec.heavy_count
    while np.cumsum(np.full(spec.heavy_count, heavy))[-1] < spec.heavy_mass:
        heavy = float(np.nextafter(heavy, np.inf))

    heavy_total = float(np.cumsum(np.full(spec.heavy_count, heavy))[-1])
    light = (1.0 - heavy_total) / (spec.n_states - spec.heavy_count)
    return heavy, light


def _bell_matrix(spec: BellSpec, heavy: float, light: float, rng: np.random.Generator) -> np.ndarray:
    matrix = np.full((spec.n_states, spec.n_states), light)
    for j in range(spec.n_states):
        chosen = rng.choice(spec.n_states, size=spec.heavy_count, replace=False)
        matrix[chosen, j] = heavy
    return matrix


def make_bell_hmm(spec: BellSpec) -> Hmm:
    """
    Heavy groups are drawn per column, first for the transition matrix
    and then for the observation matrix, from one seeded generator.
    One observation per state; the prior is uniform.
    """
    heavy, light = bell_weights(spec)
    rng = np.random.default_rng(spec.seed)

    transition = _bell_matrix(spec, heavy, light, rng)
    observation = _bell_matrix(spec, heavy, light, rng)

    logger.debug("bell model: %d states, heavy=%r light=%r", spec.n_states, heavy, light)

    return Hmm(
        prior=Distribution.uniform(spec.n_states),
        transition=transition,
        observation=observation,
    )


# -------------------------------------------------
# UNIFORM HMM
# -------------------------------------------------
def make_uniform_hmm(n: int) -> Hmm:
    if n < 2:
        raise ParameterError(f"uniform model needs at least 2 states, got {n}")

    matrix = np.full((n, n), 1.0 / n)
    return Hmm(
        prior=Distribution.uniform(n),
        transition=matrix,
        observation=matrix,
    )


# -------------------------------------------------
# WEATHER FIXTURE
# -------------------------------------------------
def make_weather_hmm() -> Hmm:
    raincoat = np.array(WEATHER_RAINCOAT)
    return Hmm(
        prior=Distribution.uniform(len(WEATHER_STATES)),
        transition=np.array(WEATHER_TRANSITION),
        observation=np.vstack([raincoat, 1.0 - raincoat]),
        state_labels=WEATHER_STATES,
        obs_labels=WEATHER_OBSERVATIONS,
    )


# -------------------------------------------------
# LM HMM
# -------------------------------------------------
def tokenize(spec: CorpusSpec) -> list[str]:
    if spec.text is not None:
        text = spec.text
    else:
        try:
            text = Path(spec.path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise CorpusError(f"cannot read corpus {spec.path}: {exc}") from exc

    if spec.lowercase:
        text = text.lower()

    tokens = text.split()
    if spec.min_count > 1:
        counts = Counter(tokens)
        tokens = [
            token if counts[token] >= spec.min_count else spec.unknown_token
            for token in tokens
        ]
    return tokens


def hmm_from_corpus(spec: CorpusSpec) -> Hmm:
    """
    Bigram model: one state per vocabulary token (first-appearance
    order), add-one smoothed successor frequencies as transition
    columns, unigram frequencies as prior, identity emissions.
    """
    tokens = tokenize(spec)
    if not tokens:
        raise CorpusError("corpus is empty")

    vocabulary = list(dict.fromkeys(tokens))
    size = len(vocabulary)
    if size < 2:
        raise CorpusError(f"corpus vocabulary has {size} token, need at least 2")

    index = {token: i for i, token in enumerate(vocabulary)}
    ids = np.fromiter((index[token] for token in tokens), dtype=np.int64, count=len(tokens))

    # counts[next, current], smoothed and normalized in place
    transition = np.zeros((size, size))
    np.add.at(transition, (ids[1:], ids[:-1]), 1.0)
    transition += 1.0
    transition /= transition.sum(axis=0)
    transition.setflags(write=False)

    observation = np.eye(size)
    observation.setflags(write=False)

    prior = np.bincount(ids, minlength=size) / ids.size

    logger.info("corpus: %d tokens, vocabulary %d", ids.size, size)

    return Hmm(
        prior=Distribution(prior),
        transition=transition,
        observation=observation,
        state_labels=tuple(vocabulary),
        obs_labels=tuple(vocabulary),
    )
