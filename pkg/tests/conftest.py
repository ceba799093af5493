import os

# Must happen before numba is imported anywhere: the determinism tests
# exercise 4 workers, which needs a thread pool of at least that size.
os.environ.setdefault("NUMBA_NUM_THREADS", "8")

import numpy as np
import pytest

import holospots as hs
from holospots.kernels import warm_up


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once so tests measure runtime, not JIT."""
    warm_up()


@pytest.fixture(scope="session")
def pupil8():
    return hs.build_pupil(8, illumination="uniform", seed=1)


@pytest.fixture(scope="session")
def pupil16g():
    return hs.build_pupil(16, illumination="gaussian", waist=6e-5, seed=2)


@pytest.fixture(scope="session")
def pupil64():
    return hs.build_pupil(64, illumination="uniform", seed=0)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_spots(rng, n, xy=6e-5, z=2e-4):
    return hs.SpotSet(x=rng.uniform(-xy, xy, n), y=rng.uniform(-xy, xy, n),
                      z=rng.uniform(-z, z, n), amplitude=rng.uniform(0.3, 2.0, n))
