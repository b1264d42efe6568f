import cmath
import math

import pytest

from zetalab.errors import BadEps, EndpointAtPole
from zetalab.functional_eq import (
    A_of,
    asy_ratio,
    eta,
    fe_integral,
    ruelle_fe_rhs,
    singularity_catalog,
    zero_order_prediction,
)
from zetalab.trace_formula import SpectralTable


def test_fe_integral_no_pole_side_independent():
    a = fe_integral(0.0, 0.3 + 0.2j, detour_side=1)
    b = fe_integral(0.0, 0.3 + 0.2j, detour_side=-1)
    assert abs(a.value - b.value) < 1e-10


def test_fe_integral_side_difference_per_pole():
    # one enclosed pole (at 1/2) shifts the integral by exactly -i
    # between the two detour sides: 2*pi*i times the residue -1/(2*pi)
    a = fe_integral(0.0, 1.2, detour_side=1)
    b = fe_integral(0.0, 1.2, detour_side=-1)
    assert abs((a.value - b.value) - (-1j)) < 1e-9 or \
        abs((a.value - b.value) - 1j) < 1e-9


def test_eta_side_independence_off_axis():
    s = 3.0 + 1.0j
    a = eta(s, 1, 2, detour_side=1)
    b = eta(s, 1, 2, detour_side=-1)
    assert abs(a - b) <= 1e-8


def test_eta_reflection_identity():
    for s in (3.0 + 1.0j, 2.2 + 0.7j):
        prod = eta(s, 1, 2) * eta(1.0 - s, 1, 2)
        assert abs(prod - 1.0) <= 1e-9


def test_eta_endpoint_pole_raises():
    # s = 2 puts the contour endpoint at the pole 3/2
    with pytest.raises(EndpointAtPole):
        eta(2.0, 1, 2)


def test_rufe_endpoint_pole_at_zero():
    # s = 0 puts both endpoints at the poles -1/2 and 1/2
    with pytest.raises(EndpointAtPole):
        ruelle_fe_rhs(0.0, 1, 2)


def test_rufe_finite_off_axis():
    value = ruelle_fe_rhs(1.0 + 1.0j, 1, 2)
    assert cmath.isfinite(value)


def test_asy_ratio_improves():
    r2 = asy_ratio(1e-2)
    r3 = asy_ratio(1e-3)
    r4 = asy_ratio(1e-4)
    assert abs(r2 - 1.0) <= 0.15
    assert abs(r3 - 1.0) <= 0.03
    assert abs(r4 - 1.0) <= 0.01
    assert abs(r4 - 1.0) < abs(r3 - 1.0) < abs(r2 - 1.0)


def test_bad_eps():
    with pytest.raises(BadEps):
        asy_ratio(0.5)
    with pytest.raises(BadEps):
        asy_ratio(-1e-3)


def test_a_of_real_axis():
    assert math.isfinite(A_of(-1e-3))


def test_zero_order_prediction():
    for dim, genus in ((1, 2), (3, 2), (1, 3)):
        order, factor = zero_order_prediction(dim, genus)
        assert order == dim * (2 * genus - 2)
        assert factor == pytest.approx((2.0 * math.pi) ** order)


def test_catalog_ladder_orders():
    catalog = singularity_catalog(None, 1, 2, 3)
    ladder = {loc.real: order for loc, order, src in catalog.entries
              if src in ("trivial_ladder", "merged") and loc.imag == 0.0}
    for k in range(4):
        assert ladder[-float(k)] >= 2 * (1 + 2 * k)


def test_catalog_merged_at_zero_eigenvalue():
    table = SpectralTable([(0.5j, 1)])  # lambda = 0, mu = i/2
    catalog = singularity_catalog(table, 1, 2, 1)
    by_loc = {loc: (order, src) for loc, order, src in catalog.entries}
    assert (1.0 + 0.0j) in by_loc          # spectral entry at s = 1
    assert (0.0 + 0.0j) in by_loc          # merged spectral + ladder at 0
    order0, src0 = by_loc[0.0 + 0.0j]
    assert src0 == "merged" and order0 == 1 + 2
