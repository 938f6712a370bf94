import numpy as np
import pytest

from app.models.distribution import Distribution
from app.models.hmm import Hmm
from app.schemas.generator_schema import BellSpec
from app.services.generator_service import make_bell_hmm, make_uniform_hmm, make_weather_hmm

# state order of the weather fixture
PARTLY, LIGHT, FOGGY, SUNNY, HEAVY, THUNDER = range(6)

SUNNY_COLUMN = (0.3, 0.25, 0.15, 0.2, 0.06, 0.04)

# top-0.9 of the sunny column
SUNNY_TOP_09 = (1 / 3, 5 / 18, 1 / 6, 2 / 9, 0.0, 0.0)

# top-0.7 weather transition, next state (rows) given current (columns)
WEATHER_TOP_07 = np.array([
    [3 / 7, 1 / 4, 3 / 7, 2 / 5, 0.0, 0.0],
    [2 / 7, 1 / 4, 2 / 7, 1 / 3, 2 / 7, 2 / 7],
    [0.0, 0.0, 2 / 7, 0.0, 0.0, 0.0],
    [2 / 7, 0.0, 0.0, 4 / 15, 0.0, 0.0],
    [0.0, 1 / 4, 0.0, 0.0, 2 / 7, 3 / 7],
    [0.0, 1 / 4, 0.0, 0.0, 3 / 7, 2 / 7],
])


@pytest.fixture
def weather():
    return make_weather_hmm()


@pytest.fixture
def identity_hmm():
    n = 4
    return Hmm(
        prior=Distribution.uniform(n),
        transition=np.eye(n),
        observation=np.eye(n),
    )


@pytest.fixture
def small_bell():
    return make_bell_hmm(BellSpec(n_states=60, heavy_count=5, heavy_mass=0.9, seed=3))


@pytest.fixture(scope="session")
def bell800():
    return make_bell_hmm(BellSpec())


@pytest.fixture(scope="session")
def uniform800():
    return make_uniform_hmm(800)


def random_hmm(rng: np.random.Generator, n: int, n_obs: int) -> Hmm:
    return Hmm(
        prior=Distribution(rng.dirichlet(np.ones(n))),
        transition=rng.dirichlet(np.ones(n), size=n).T,
        observation=rng.dirichlet(np.ones(n_obs), size=n).T,
    )
