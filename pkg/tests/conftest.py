import numpy as np
import pytest

from sqfock import FockSpace


@pytest.fixture(scope="session")
def space40() -> FockSpace:
    return FockSpace(40)


@pytest.fixture(scope="session")
def space20() -> FockSpace:
    return FockSpace(20)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / rho.trace()
