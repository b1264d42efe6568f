"""Exact-formula linear algebra for PSL(2, R).

Matrices are kept sign-normalized so that each value represents an element
of PSL(2, R) rather than SL(2, R): the first nonzero entry in the order
(a, b, c) is strictly positive.  Translation lengths, axis data, the
genus-2 octagon surface model and the Gauss-Bonnet volume live here.
"""

import math
from functools import lru_cache

import mpmath

from .errors import BadGenus, NotHyperbolic, UnsupportedGenus

UNIMODULAR_TOL = 1e-12
RELATOR_TOL = 1e-10
HYPERBOLIC_TOL = 1e-12

#: letter codes for the genus-2 generating set: 0..3 are a1, b1, a2, b2 and
#: 4..7 their inverses (letter k and letter k^4 are mutually inverse).
GENUS2_LETTERS = ("a1", "b1", "a2", "b2", "A1", "B1", "A2", "B2")

#: the surface relator [a1,b1][a2,b2] spelled in letter codes.
GENUS2_RELATOR = (0, 1, 4, 5, 2, 3, 6, 7)


class MoebiusMatrix:
    """A sign-normalized real unimodular 2x2 matrix (element of PSL(2, R))."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        a, b, c, d = float(a), float(b), float(c), float(d)
        det = a * d - b * c
        if abs(det - 1.0) > UNIMODULAR_TOL:
            # Rescale mild drift from long products; reject anything larger.
            if det <= 0.0 or abs(det - 1.0) > 1e-6:
                raise ValueError(f"matrix is not unimodular: det = {det!r}")
            r = math.sqrt(det)
            a, b, c, d = a / r, b / r, c / r, d / r
        for entry in (a, b, c):
            if entry != 0.0:
                if entry < 0.0:
                    a, b, c, d = -a, -b, -c, -d
                break
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    def inverse(self):
        return MoebiusMatrix(self.d, -self.b, -self.c, self.a)

    @property
    def trace(self):
        """Trace of the sign-normalized representative."""
        return self.a + self.d

    @property
    def abs_trace(self):
        return abs(self.a + self.d)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __eq__(self, other):
        if not isinstance(other, MoebiusMatrix):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self):
        return hash(self.entries())

    def __repr__(self):
        return f"MoebiusMatrix({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"

    def max_entry_distance(self, other):
        return max(
            abs(x - y) for x, y in zip(self.entries(), other.entries())
        )


def compose(m, n):
    """Product of two PSL(2, R) elements, re-sign-normalized."""
    return MoebiusMatrix(
        m.a * n.a + m.b * n.c,
        m.a * n.b + m.b * n.d,
        m.c * n.a + m.d * n.c,
        m.c * n.b + m.d * n.d,
    )


def translation_length(m):
    """Translation length 2*arccosh(|tr|/2) of a hyperbolic element."""
    t = m.abs_trace
    if t <= 2.0 + HYPERBOLIC_TOL:
        raise NotHyperbolic(f"|trace| = {t!r} is not > 2")
    return 2.0 * math.acosh(t / 2.0)


def axis_endpoints(m):
    """Boundary fixed points of a hyperbolic element, attracting first.

    The fixed points solve c x^2 + (d - a) x - b = 0; the attracting one
    is the fixed point p with |c p + d| > 1 (derivative of the Moebius map
    at p is (c p + d)^(-2)).
    """
    t = m.abs_trace
    if t <= 2.0 + HYPERBOLIC_TOL:
        raise NotHyperbolic(f"|trace| = {t!r} is not > 2")
    a, b, c, d = m.entries()
    if c == 0.0:
        finite = b / (d - a)  # d != a since |a + d| > 2 and a*d = 1
        if abs(a) > abs(d):
            return (math.inf, finite)
        return (finite, math.inf)
    disc = math.sqrt((a + d) * (a + d) - 4.0)
    x_plus = (a - d + disc) / (2.0 * c)
    x_minus = (a - d - disc) / (2.0 * c)
    if abs(c * x_plus + d) > abs(c * x_minus + d):
        return (x_plus, x_minus)
    return (x_minus, x_plus)


class SurfacePresentation:
    """Generators a_1, b_1, ..., a_g, b_g of a genus-g Fuchsian group.

    The single defining relator is the product of commutators
    [a_1, b_1]...[a_g, b_g]; ``relator_residual`` is its maximum-entry
    distance from plus or minus the identity.
    """

    __slots__ = ("genus", "generators", "relator_residual", "_letters")

    def __init__(self, genus, generators):
        if len(generators) != 2 * genus:
            raise ValueError("need exactly 2*genus generators")
        self.genus = genus
        self.generators = tuple(generators)
        prod = MoebiusMatrix.identity()
        for i in range(genus):
            x, y = generators[2 * i], generators[2 * i + 1]
            prod = compose(prod, x)
            prod = compose(prod, y)
            prod = compose(prod, x.inverse())
            prod = compose(prod, y.inverse())
        ident = MoebiusMatrix.identity()
        self.relator_residual = prod.max_entry_distance(ident)
        if self.relator_residual > RELATOR_TOL:
            raise ValueError(
                f"relator residual {self.relator_residual!r} exceeds {RELATOR_TOL}"
            )
        for g in generators:
            if g.abs_trace <= 2.0:
                raise ValueError("all generators must be hyperbolic")
        letters = list(self.generators)
        letters += [g.inverse() for g in self.generators]
        self._letters = tuple(letters)

    def letter_matrix(self, code):
        """Matrix of letter ``code`` (0..2g-1 generators, +2g inverses)."""
        return self._letters[code]

    @property
    def n_letters(self):
        return 4 * self.genus

    def letter_inverse(self, code):
        return (code + 2 * self.genus) % (4 * self.genus)


@lru_cache(maxsize=None)
def _octagon_generators():
    """Float64 generator entries for the genus-2 octagon group.

    The group is the symmetry lattice of the regular hyperbolic octagon
    centered at i, generated by the four opposite-side translations
    g_k = R(k pi/4) T R(-k pi/4), where T = diag(e^{l/2}, e^{-l/2}) with
    cosh(l/2) = 1 + sqrt(2) and R(phi) rotates the plane about i.  These
    satisfy g_0 g_1^{-1} g_2 g_3^{-1} g_0^{-1} g_1 g_2^{-1} g_3 = 1.  The
    commutator-relator generating quadruple

        a1 = g_0,  b1 = g_3 g_2^{-1} g_1,  a2 = g_3 g_2^{-1},  b2 = g_1 g_2^{-1}

    consists of elements of minimal translation length (|trace| =
    2(1 + sqrt(2))) and satisfies [a1, b1][a2, b2] = 1.  Entries are
    evaluated at 50 decimal digits and rounded once to float64.
    """
    with mpmath.workdps(50):
        half = mpmath.sqrt(2) + 1 + mpmath.sqrt(2 + 2 * mpmath.sqrt(2))
        t = mpmath.matrix([[half, 0], [0, 1 / half]])

        def rot(k):
            phi = k * mpmath.pi / 8
            return mpmath.matrix(
                [[mpmath.cos(phi), mpmath.sin(phi)],
                 [-mpmath.sin(phi), mpmath.cos(phi)]]
            )

        def inv(m):
            det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            return mpmath.matrix(
                [[m[1, 1] / det, -m[0, 1] / det],
                 [-m[1, 0] / det, m[0, 0] / det]]
            )

        g = [rot(k) * t * inv(rot(k)) for k in range(4)]
        a1 = g[0]
        a2 = g[3] * inv(g[2])
        b1 = a2 * g[1]
        b2 = g[1] * inv(g[2])
        out = []
        for m in (a1, b1, a2, b2):
            out.append(tuple(float(m[i, j]) for i in range(2) for j in range(2)))
        return tuple(out)


@lru_cache(maxsize=None)
def octagon_presentation(genus):
    """Genus-2 surface group from the regular hyperbolic octagon."""
    if genus != 2:
        raise UnsupportedGenus(f"only genus 2 is supported, got {genus}")
    gens = [MoebiusMatrix(*e) for e in _octagon_generators()]
    return SurfacePresentation(2, gens)


def gauss_bonnet_volume(genus):
    """Hyperbolic area 2*pi*(2g - 2) of a genus-g surface."""
    if not isinstance(genus, int) or genus < 2:
        raise BadGenus(f"genus must be an integer >= 2, got {genus!r}")
    return 2.0 * math.pi * (2 * genus - 2)
