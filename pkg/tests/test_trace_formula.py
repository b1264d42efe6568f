import math

import numpy as np
import pytest

from zetalab.errors import BadT, CutoffInsufficient
from zetalab.trace_formula import (
    SpectralTable,
    geometric_heat_trace,
    hyperbolic_term,
    plancherel_integral,
    spectral_side,
    tanh_partial_fraction_check,
)

# low Laplace eigenvalues of the genus-2 surface with maximal symmetry,
# lambda = 1/4 + mu^2, entered as (re mu, im mu, multiplicity); used only
# as ingested spectral data, never derived here
BOLZA_MU = [
    (0.0, 0.5, 1),          # lambda = 0
    (math.sqrt(3.838887258 - 0.25), 0.0, 3),
    (math.sqrt(5.353601341 - 0.25), 0.0, 4),
    (math.sqrt(8.249554815 - 0.25), 0.0, 2),
    (math.sqrt(14.72621679 - 0.25), 0.0, 4),
    (math.sqrt(15.04891613 - 0.25), 0.0, 3),
    (math.sqrt(18.65881925 - 0.25), 0.0, 3),
    (math.sqrt(20.13594603 - 0.25), 0.0, 4),
    (math.sqrt(21.46973539 - 0.25), 0.0, 4),
    (math.sqrt(26.08455916 - 0.25), 0.0, 2),
    (math.sqrt(28.07960520 - 0.25), 0.0, 3),
    (math.sqrt(30.83341387 - 0.25), 0.0, 6),
]


def make_table():
    return SpectralTable(tuple(
        (complex(re, im), mult) for re, im, mult in BOLZA_MU
    ))


def test_bad_t():
    with pytest.raises(BadT):
        plancherel_integral(0.0)


def test_small_t_heat_law(spec12, trivial_rep):
    # 4*pi*t * trace / (dim * Vol) -> 1 as t -> 0
    for t in (0.05, 0.02, 0.01):
        tv = geometric_heat_trace(t, spec12, trivial_rep, shifted=False)
        scaled = 4.0 * math.pi * t * tv.value / (4.0 * math.pi)
        assert abs(scaled - 1.0) <= max(2.0 * t, 1e-3)


def test_plancherel_error_small():
    value, err = plancherel_integral(1.0)
    assert value > 0 and err < 1e-10


def test_tanh_partial_fraction():
    for lam in (0.5, 1.0, 2.0, 5.0, 10.0):
        assert tanh_partial_fraction_check(lam, 100000) <= 1e-6


def test_cutoff_insufficient_names_required(spec62, trivial_rep):
    with pytest.raises(CutoffInsufficient) as exc_info:
        hyperbolic_term(3.0, spec62, trivial_rep, shifted=True)
    assert exc_info.value.required_cutoff is not None
    assert exc_info.value.required_cutoff > 6.2


def test_shift_relation(spec12, trivial_rep):
    t = 1.0
    shifted = hyperbolic_term(t, spec12, trivial_rep, shifted=True)
    unshifted = hyperbolic_term(t, spec12, trivial_rep, shifted=False)
    assert shifted.value == pytest.approx(
        math.exp(t / 4.0) * unshifted.value, rel=1e-12
    )


def test_geometric_vs_spectral_side(spec12, trivial_rep):
    # the ingested eigenvalue table is truncated, so agreement is loose
    table = make_table()
    t = 1.0
    geo = geometric_heat_trace(t, spec12, trivial_rep, shifted=False)
    spec_val = spectral_side(table, t)
    assert abs(geo.value - spec_val) < 5e-4


def test_spectral_table_from_file(tmp_path):
    path = tmp_path / "mu.csv"
    path.write_text("# re_mu,im_mu,multiplicity\n0.0,0.5,1\n1.5,0.0,3\n")
    table = SpectralTable.from_file(str(path))
    assert len(table.entries) == 2
    assert table.entries[0] == (0.5j, 1)


def test_trace_value_deterministic(spec12, trivial_rep):
    a = geometric_heat_trace(1.5, spec12, trivial_rep, shifted=True)
    b = geometric_heat_trace(1.5, spec12, trivial_rep, shifted=True)
    assert a.value == b.value and a.tail_bound == b.tail_bound
