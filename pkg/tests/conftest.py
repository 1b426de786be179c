import numpy as np
import pytest

from landau_bloch import build_lattice, cosine_potential, make_flux


@pytest.fixture(scope="session")
def square():
    return build_lattice((1.0, 0.0), (0.0, 1.0))


@pytest.fixture(scope="session")
def oblique():
    return build_lattice((1.3, 0.2), (0.4, 0.9))


@pytest.fixture(scope="session")
def flux1(square):
    return make_flux(square, 1, 1)


@pytest.fixture(scope="session")
def flux3(square):
    return make_flux(square, 3, 1)


@pytest.fixture(scope="session")
def flux_oblique(oblique):
    return make_flux(oblique, 3, 2)


@pytest.fixture(scope="session")
def cosV(square):
    return cosine_potential(square)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
