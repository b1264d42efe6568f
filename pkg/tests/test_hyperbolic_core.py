import math

import numpy as np
import pytest

from zetalab.errors import NotHyperbolic, UnsupportedGenus
from zetalab.hyperbolic_core import (
    MoebiusMatrix,
    axis_endpoints,
    compose,
    gauss_bonnet_volume,
    octagon_presentation,
    translation_length,
)

SYSTOLE = 2.0 * math.acosh(1.0 + math.sqrt(2.0))


def test_relator_residual(pres):
    assert pres.relator_residual <= 1e-10


def test_generator_traces(pres):
    for code in range(8):
        m = pres.letter_matrix(code)
        a, b, c, d = m.entries()
        assert abs(abs(a + d) - 2.0 * (1.0 + math.sqrt(2.0))) <= 1e-10


def test_generator_translation_lengths(pres):
    for code in range(8):
        assert translation_length(pres.letter_matrix(code)) == pytest.approx(
            SYSTOLE, abs=1e-12
        )


def test_letter_inverses_compose_to_identity(pres):
    for code in range(4):
        m = compose(pres.letter_matrix(code), pres.letter_matrix(code + 4))
        a, b, c, d = m.entries()
        assert max(abs(a - 1), abs(b), abs(c), abs(d - 1)) < 1e-12


def test_translation_length_rejects_elliptic():
    rot = MoebiusMatrix(math.cos(0.3), -math.sin(0.3),
                        math.sin(0.3), math.cos(0.3))
    with pytest.raises(NotHyperbolic):
        translation_length(rot)


def test_axis_endpoints_fixed_by_moebius(pres):
    m = pres.letter_matrix(0)
    a, b, c, d = m.entries()
    for x in axis_endpoints(m):
        if math.isinf(x):
            assert c == pytest.approx(0.0, abs=1e-12)
        else:
            assert (a * x + b) / (c * x + d) == pytest.approx(x, abs=1e-10)


def test_gauss_bonnet_volume():
    assert gauss_bonnet_volume(2) == pytest.approx(4.0 * math.pi, rel=1e-15)
    assert gauss_bonnet_volume(3) == pytest.approx(8.0 * math.pi, rel=1e-15)


def test_unsupported_genus():
    with pytest.raises(UnsupportedGenus):
        octagon_presentation(1)


def test_compose_matches_numpy(pres):
    m = pres.letter_matrix(1)
    n = pres.letter_matrix(2)
    lhs = np.array(compose(m, n).entries()).reshape(2, 2)
    rhs = np.array(m.entries()).reshape(2, 2) @ np.array(n.entries()).reshape(2, 2)
    assert np.allclose(lhs, rhs, atol=1e-14)
