import numpy as np
import pytest

from zetalab.errors import EmptySpectrum, OutsideHalfPlane
from zetalab.zeta_series import (
    convergence_abscissa,
    envelope_constant,
    log_derivative_L,
    log_ruelle,
    log_selberg,
    ruelle_selberg_residual,
)


def test_abscissa_trivial(trivial_rep):
    assert convergence_abscissa(trivial_rep) == pytest.approx(1.1)


def test_outside_half_plane(spec62, trivial_rep):
    with pytest.raises(OutsideHalfPlane):
        log_selberg(0.2, spec62, trivial_rep)


def test_empty_spectrum(pres, trivial_rep):
    from zetalab.surface_group import enumerate_classes

    empty = enumerate_classes(pres, 0.5)
    assert len(empty) == 0
    with pytest.raises(EmptySpectrum):
        log_selberg(4.0, empty, trivial_rep)


def test_envelope_constant_positive(spec62):
    assert envelope_constant(spec62) > 0.0


def test_dominant_term_at_large_s(spec62, trivial_rep):
    # far to the right the series is dominated by its first term
    s = 12.0
    zv = log_ruelle(s, spec62, trivial_rep)
    l0 = spec62.lengths[0]
    first = -24.0 * np.exp(-s * l0)  # 24 systole classes
    assert zv.value == pytest.approx(first, rel=1e-6)


def test_ruelle_selberg_residual_within_tails(spec12, trivial_rep,
                                              scalar_rep12, dim2_rep12):
    rng = np.random.default_rng(7)
    for rep in (trivial_rep, scalar_rep12, dim2_rep12):
        a = convergence_abscissa(rep)
        for _ in range(5):
            s = a + 1.5 + 1j * rng.uniform(-2, 2)
            resid = ruelle_selberg_residual(s, spec12, rep)
            combined = (
                log_ruelle(s, spec12, rep).tail_bound
                + log_selberg(s, spec12, rep).tail_bound
                + log_selberg(s + 1.0, spec12, rep).tail_bound
            )
            assert resid <= combined


def test_log_derivative_matches_central_difference(spec12, trivial_rep):
    h = 1e-5
    for s in (2.6, 3.0, 3.5):
        fd = (log_selberg(s + h, spec12, trivial_rep).value
              - log_selberg(s - h, spec12, trivial_rep).value) / (2 * h)
        lv = log_derivative_L(s, spec12, trivial_rep)
        assert abs(fd - lv.value) <= 1e-6 + 2 * lv.tail_bound


def test_tail_bound_monotone_in_s(spec62, trivial_rep):
    tails = [log_selberg(s, spec62, trivial_rep).tail_bound
             for s in (2.7, 3.0, 4.0, 6.0)]
    assert all(t2 <= t1 for t1, t2 in zip(tails, tails[1:]))


def test_values_deterministic(spec62, trivial_rep):
    a = log_selberg(3.3 + 0.4j, spec62, trivial_rep)
    b = log_selberg(3.3 + 0.4j, spec62, trivial_rep)
    assert a.value == b.value and a.tail_bound == b.tail_bound
