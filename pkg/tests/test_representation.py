import numpy as np
import pytest

from zetalab.errors import RelationViolated, Singular
from zetalab.representation import (
    critical_exponent_estimate,
    evaluate,
    load_representation,
    save_representation,
    scalar_representation,
    trace_of,
    trivial_representation,
    validate,
)
from zetalab.surface_group import Word

from conftest import make_dim2_rep, make_scalar_rep


def test_trivial_representation(pres):
    rep = trivial_representation(pres)
    assert rep.dim == 1 and rep.is_scalar
    assert rep.relation_residual == 0.0
    assert trace_of(rep, Word((0, 1, 2))) == 1.0


def test_scalar_representation_evaluate(pres):
    rep = scalar_representation(pres, [1.3, 1.0, 1.0, 1.0])
    assert evaluate(rep, Word((0,)))[0, 0] == pytest.approx(1.3)
    # inverse letter gives the reciprocal
    assert evaluate(rep, Word((4,)))[0, 0] == pytest.approx(1 / 1.3)
    assert evaluate(rep, Word((0, 4)))[0, 0] == pytest.approx(1.0)


def test_validate_rejects_singular(pres):
    images = [np.zeros((1, 1))] + [np.eye(1)] * 3
    with pytest.raises(Singular):
        validate(pres, images, 1)


def test_validate_rejects_relation_violation(pres):
    # generic non-commuting images do not satisfy the surface relation
    rng = np.random.default_rng(3)
    images = [rng.normal(size=(2, 2)) + np.eye(2) for _ in range(4)]
    with pytest.raises(RelationViolated):
        validate(pres, images, 2)


def test_trace_invariant_under_rotation(pres, spec62):
    rep = make_dim2_rep(pres, spec62)
    w = spec62.word_at(30).letters
    base = trace_of(rep, Word(w))
    for r in range(1, len(w)):
        assert trace_of(rep, Word(w[r:] + w[:r])) == pytest.approx(base)


def test_critical_exponent_trivial(pres, spec62):
    rep = trivial_representation(pres)
    assert critical_exponent_estimate(rep, spec62) == 0.0
    assert rep.c_hat == 0.0


def test_critical_exponent_scalar_positive(pres, spec62):
    rep = make_scalar_rep(pres, spec62)
    assert 0.0 < rep.c_hat < 0.5


def test_critical_exponent_monotone_in_cutoff(pres, spec62, spec8):
    r1 = make_scalar_rep(pres, spec62)
    r2 = make_scalar_rep(pres, spec8)
    assert r2.c_hat >= r1.c_hat - 1e-15


def test_save_load_bit_exact(tmp_path, pres, spec62):
    rep = make_dim2_rep(pres, spec62)
    path = tmp_path / "rep.json"
    save_representation(str(path), pres, rep)
    loaded = load_representation(str(path), pres)
    assert loaded.dim == rep.dim
    for a, b in zip(loaded.generator_images, rep.generator_images):
        assert np.array_equal(a, b)
