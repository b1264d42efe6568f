"""Finite-dimensional flat representations of the surface group.

A representation is given by one invertible complex matrix per generator;
it must satisfy the surface relation (product of commutators = identity).
Words in the group evaluate to matrix products; the critical exponent
estimate measures the exponential growth rate of ``log ||chi(gamma)||``
relative to geodesic length, which controls every convergence abscissa
downstream.
"""

import json

import numpy as np

from .errors import EmptySpectrum, RelationViolated, Singular
from .surface_group import N_LETTERS, Word

#: slack added to the empirical critical exponent in all truncation bounds
DELTA_C = 0.1

_RESIDUAL_TOL = 1e-8
_DET_TOL = 1e-12


class FlatRepresentation:
    """Validated representation: generator images plus derived data.

    Attributes
    ----------
    dim : int
        Dimension of the representation space.
    generator_images : tuple of (dim, dim) complex ndarrays
        Images of the generators ``a1, b1, ..., a_g, b_g`` (read-only).
    inverse_images : tuple of (dim, dim) complex ndarrays
        Precomputed inverses, in the same order.
    relation_residual : float
        Max-entry distance of the evaluated relator from the identity.
    c_hat : float
        Empirical critical exponent; 0.0 until estimated against a
        spectrum via :func:`critical_exponent_estimate`.
    """

    __slots__ = ("dim", "generator_images", "inverse_images",
                 "relation_residual", "c_hat")

    def __init__(self, dim, generator_images, relation_residual):
        self.dim = dim
        images = tuple(np.asarray(m, dtype=complex) for m in generator_images)
        for m in images:
            m.setflags(write=False)
        self.generator_images = images
        inverses = tuple(np.linalg.inv(m) for m in images)
        for m in inverses:
            m.setflags(write=False)
        self.inverse_images = inverses
        self.relation_residual = relation_residual
        self.c_hat = 0.0

    @property
    def is_scalar(self):
        return self.dim == 1

    def letter_image(self, letter):
        """Matrix for one letter code (codes >= half encode inverses)."""
        half = N_LETTERS // 2
        if letter < half:
            return self.generator_images[letter]
        return self.inverse_images[letter - half]


def _relator_product(images, inverses):
    dim = images[0].shape[0]
    prod = np.eye(dim, dtype=complex)
    for i in range(0, len(images), 2):
        a, b = images[i], images[i + 1]
        ai, bi = inverses[i], inverses[i + 1]
        prod = prod @ a @ b @ ai @ bi
    return prod


def validate(pres, images, dim):
    """Build a :class:`FlatRepresentation`, checking the surface relation.

    Raises ``Singular`` for non-invertible images and ``RelationViolated``
    when the commutator relator misses the identity by more than 1e-8.
    """
    images = [np.asarray(m, dtype=complex).reshape(dim, dim) for m in images]
    if len(images) != 2 * pres.genus:
        raise RelationViolated(
            f"expected {2 * pres.genus} generator images, got {len(images)}"
        )
    for k, m in enumerate(images):
        if abs(np.linalg.det(m)) < _DET_TOL:
            raise Singular(f"generator image {k} is singular")
    inverses = [np.linalg.inv(m) for m in images]
    residual = float(
        np.max(np.abs(_relator_product(images, inverses) - np.eye(dim)))
    )
    if residual > _RESIDUAL_TOL:
        raise RelationViolated(
            f"surface relation violated: residual {residual:.3e} > 1e-08"
        )
    return FlatRepresentation(dim, images, residual)


def evaluate(rep, word):
    """chi(w): left-to-right product of generator images and inverses."""
    if rep.is_scalar:
        z = 1.0 + 0.0j
        for letter in word.letters:
            z *= rep.letter_image(letter)[0, 0]
        return np.array([[z]], dtype=complex)
    prod = np.eye(rep.dim, dtype=complex)
    for letter in word.letters:
        prod = prod @ rep.letter_image(letter)
    return prod


def trace_of(rep, word):
    """tr chi(w); equals ``dim`` on the empty word."""
    return complex(np.trace(evaluate(rep, word)))


def _spectral_norm(mat):
    return float(np.linalg.norm(mat, 2))


def critical_exponent_estimate(rep, spectrum):
    """Empirical critical exponent over an enumerated spectrum.

    Returns ``max over records of max(0, log ||chi(gamma)|| / l(gamma))``
    in the spectral (largest singular value) norm, and stores it on the
    representation as ``c_hat``.  Monotone non-decreasing in the cutoff.
    """
    n = len(spectrum.lengths)
    if n == 0:
        raise EmptySpectrum("cannot estimate a critical exponent from "
                            "an empty spectrum")
    if rep.is_scalar:
        # log|chi(w)| is linear in the letter counts; only the moduli of
        # the generator scalars matter
        half = N_LETTERS // 2
        logmod = np.array(
            [np.log(abs(rep.generator_images[g][0, 0])) for g in range(half)]
        )
        best = 0.0
        for i in range(n):
            letters = spectrum.words_flat[
                spectrum.offsets[i] : spectrum.offsets[i + 1]
            ]
            s = 0.0
            for letter in letters:
                s += logmod[letter] if letter < half else -logmod[letter - half]
            best = max(best, s / spectrum.lengths[i])
        rep.c_hat = best
        return best
    best = 0.0
    for i in range(n):
        norm = _spectral_norm(evaluate(rep, spectrum.word_at(i)))
        if norm > 1.0:
            best = max(best, np.log(norm) / spectrum.lengths[i])
    rep.c_hat = best
    return best


def trivial_representation(pres, dim=1):
    """All-identity images in the given dimension."""
    eye = np.eye(dim, dtype=complex)
    return validate(pres, [eye.copy() for _ in range(2 * pres.genus)], dim)


def scalar_representation(pres, values):
    """One nonzero complex scalar per generator (dim 1)."""
    mats = [np.array([[complex(z)]]) for z in values]
    return validate(pres, mats, 1)


def _complex_pair(z):
    return [format(float(z.real), ".17g"), format(float(z.imag), ".17g")]


def save_representation(path, pres, rep):
    """Write a representation config as JSON with 17-digit complex pairs."""
    payload = {
        "genus": pres.genus,
        "dim": rep.dim,
        "generators": [
            [_complex_pair(z) for z in m.ravel()] for m in rep.generator_images
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_representation(path, pres):
    """Read a config written by :func:`save_representation` and validate."""
    with open(path) as fh:
        payload = json.load(fh)
    if payload["genus"] != pres.genus:
        raise RelationViolated(
            f"config is for genus {payload['genus']}, "
            f"presentation has genus {pres.genus}"
        )
    dim = int(payload["dim"])
    images = []
    for flat in payload["generators"]:
        entries = [complex(float(re), float(im)) for re, im in flat]
        images.append(np.array(entries, dtype=complex).reshape(dim, dim))
    return validate(pres, images, dim)
