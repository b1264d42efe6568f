import numpy as np
import pytest

from zetalab.hyperbolic_core import octagon_presentation
from zetalab.representation import (
    critical_exponent_estimate,
    scalar_representation,
    trivial_representation,
    validate,
)
from zetalab.surface_group import enumerate_classes


@pytest.fixture(scope="session")
def pres():
    return octagon_presentation(2)


@pytest.fixture(scope="session")
def spec62(pres):
    return enumerate_classes(pres, 6.2)


@pytest.fixture(scope="session")
def spec8(pres):
    return enumerate_classes(pres, 8.0)


@pytest.fixture(scope="session")
def spec12(pres):
    return enumerate_classes(pres, 12.0)


def make_scalar_rep(pres, spectrum, value=1.3):
    rep = scalar_representation(pres, [value, 1.0, 1.0, 1.0])
    critical_exponent_estimate(rep, spectrum)
    return rep


def make_dim2_rep(pres, spectrum):
    """Non-unitary dimension-2 perturbation (central, so the relation holds)."""
    eye = np.eye(2)
    images = [1.1 * eye, 0.95 * eye, (1.0 + 0.1j) * eye, eye]
    rep = validate(pres, images, 2)
    critical_exponent_estimate(rep, spectrum)
    return rep


@pytest.fixture(scope="session")
def trivial_rep(pres):
    return trivial_representation(pres)


@pytest.fixture(scope="session")
def scalar_rep12(pres, spec12):
    return make_scalar_rep(pres, spec12)


@pytest.fixture(scope="session")
def dim2_rep12(pres, spec12):
    return make_dim2_rep(pres, spec12)
