"""Functional-equation factors and singularity bookkeeping.

Everything here is built from contour integrals of ``r tan(pi r)``,
whose poles sit at the half-integers.  Straight segments that would
cross a pole are replaced by fixed semicircular detours whose side is
recorded in the output; the exponentiated quantities are checked to be
detour-side independent because each residue contributes a multiple of
``2 pi i`` after scaling by ``dim * Vol``.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp, quad as mp_quad
from scipy.integrate import quad

from .errors import BadEps, EndpointAtPole
from .hyperbolic_core import gauss_bonnet_volume

#: radius of the semicircular detours around half-integer poles
DETOUR_RADIUS = 1e-2
#: minimal allowed distance of a contour endpoint from a pole
ENDPOINT_CLEARANCE = 1e-3


@dataclass(frozen=True)
class PathDescriptor:
    endpoints: tuple
    detour_radius: float
    detour_side: int


@dataclass(frozen=True)
class FEIntegral:
    """Contour integral of r tan(pi r) with its path record."""

    value: complex
    path_descriptor: PathDescriptor
    quadrature_error: float


@dataclass(frozen=True)
class SingularityCatalog:
    """Predicted zeta singularities: (location, order, source) entries."""

    entries: tuple


def _nearest_half_integer_distance(z):
    z = complex(z)
    return abs(complex(z.real - (round(z.real - 0.5) + 0.5), z.imag))


def _integrand(r):
    return r * cmath.tan(math.pi * r)


def _segment_integral(z0, z1, epsabs=1e-12):
    """Integral of r tan(pi r) over a straight pole-free segment."""
    delta = z1 - z0
    if delta == 0:
        return 0.0 + 0.0j, 0.0

    def f_re(u):
        return (_integrand(z0 + u * delta) * delta).real

    def f_im(u):
        return (_integrand(z0 + u * delta) * delta).imag

    vr, er = quad(f_re, 0.0, 1.0, epsabs=epsabs, epsrel=1e-11, limit=400)
    vi, ei = quad(f_im, 0.0, 1.0, epsabs=epsabs, epsrel=1e-11, limit=400)
    return complex(vr, vi), er + ei


def _semicircle_integral(pole, r_in, r_out, side, radius):
    """Detour from r_in to r_out on a half circle of the given side."""
    th0 = cmath.phase(r_in - pole)
    th1 = cmath.phase(r_out - pole)
    # walk the half turn on the requested side (+1 = upper half plane)
    if side > 0:
        while th1 <= th0:
            th1 += 2.0 * math.pi
        if th1 - th0 > math.pi + 1e-9:
            th1 -= 2.0 * math.pi
    else:
        while th1 >= th0:
            th1 -= 2.0 * math.pi
        if th0 - th1 > math.pi + 1e-9:
            th1 += 2.0 * math.pi

    def f_re(th):
        z = pole + radius * cmath.exp(1j * th)
        dz = 1j * radius * cmath.exp(1j * th)
        return (_integrand(z) * dz).real

    def f_im(th):
        z = pole + radius * cmath.exp(1j * th)
        dz = 1j * radius * cmath.exp(1j * th)
        return (_integrand(z) * dz).imag

    vr, er = quad(f_re, th0, th1, epsabs=1e-12, epsrel=1e-11, limit=200)
    vi, ei = quad(f_im, th0, th1, epsabs=1e-12, epsrel=1e-11, limit=200)
    return complex(vr, vi), er + ei


def _poles_on_segment(z0, z1, radius):
    """Half-integer poles the straight segment passes within `radius` of."""
    z0, z1 = complex(z0), complex(z1)
    delta = z1 - z0
    length = abs(delta)
    if length == 0:
        return []
    lo = min(z0.real, z1.real) - 1.0
    hi = max(z0.real, z1.real) + 1.0
    poles = []
    p = math.floor(lo - 0.5) + 0.5
    while p <= hi:
        u = ((p - z0) * delta.conjugate()).real / (length * length)
        if 0.0 <= u <= 1.0 and abs(z0 + u * delta - p) < radius:
            poles.append((u, p))
        p += 1.0
    poles.sort()
    return poles


def fe_integral(z0, z1, detour_side=1):
    """Integral of r tan(pi r) from z0 to z1 with recorded pole detours.

    The path is the straight segment, with each half-integer pole it
    meets replaced by a semicircle of radius ``DETOUR_RADIUS`` on
    ``detour_side`` (+1 = above the real axis, -1 = below).
    """
    z0, z1 = complex(z0), complex(z1)
    if detour_side not in (1, -1):
        raise ValueError("detour_side must be +1 or -1")
    for z in (z0, z1):
        if _nearest_half_integer_distance(z) < ENDPOINT_CLEARANCE:
            raise EndpointAtPole(
                f"endpoint {z} is within {ENDPOINT_CLEARANCE:g} of a pole "
                "of tan(pi r)"
            )
    descriptor = PathDescriptor((z0, z1), DETOUR_RADIUS, detour_side)
    if z0 == z1:
        return FEIntegral(0.0 + 0.0j, descriptor, 0.0)
    poles = _poles_on_segment(z0, z1, DETOUR_RADIUS)
    total = 0.0 + 0.0j
    err = 0.0
    delta = z1 - z0
    cursor = z0
    for u, p in poles:
        foot = z0 + u * delta
        unit = delta / abs(delta)
        back = math.sqrt(max(DETOUR_RADIUS**2 - abs(foot - p) ** 2, 0.0))
        r_in = foot - back * unit
        r_out = foot + back * unit
        # move the entry/exit points onto the detour circle
        r_in = p + DETOUR_RADIUS * (r_in - p) / abs(r_in - p)
        r_out = p + DETOUR_RADIUS * (r_out - p) / abs(r_out - p)
        v, e = _segment_integral(cursor, r_in)
        total += v
        err += e
        v, e = _semicircle_integral(p, r_in, r_out, detour_side, DETOUR_RADIUS)
        total += v
        err += e
        cursor = r_out
    v, e = _segment_integral(cursor, z1)
    total += v
    err += e
    return FEIntegral(total, descriptor, err)


def eta(s, dim, genus, detour_side=1):
    """Functional-equation factor: Z(s)/Z(1-s) as an explicit exponential.

    ``exp[dim * Vol * integral_0^{s - 1/2} r tan(pi r) dr]``; the value
    is detour-side independent to 1e-8 because each pole residue
    exponentiates to unity for integer ``dim (2g - 2)``.
    """
    vol = gauss_bonnet_volume(genus)
    integral = fe_integral(0.0, complex(s) - 0.5, detour_side)
    return cmath.exp(dim * vol * integral.value)


def ruelle_fe_rhs(s, dim, genus, detour_side=1):
    """Predicted value of R(s) R(-s).

    ``exp[-dim * Vol * integral_{s - 1/2}^{s + 1/2} r tan(pi r) dr]``.
    """
    vol = gauss_bonnet_volume(genus)
    integral = fe_integral(complex(s) - 0.5, complex(s) + 0.5, detour_side)
    return cmath.exp(-dim * vol * integral.value)


def A_of(s):
    """A(s) = -2 pi * integral_0^{s + 1/2} r tan(pi r) dr on the real axis.

    Only defined here for real ``s + 1/2`` in (-1/2, 1/2): the segment
    stays strictly between the poles at -1/2 and 1/2.  Near the right
    endpoint the integrand has an integrable logarithmic blow-up, which
    is handled by splitting the range and integrating the tail in the
    substituted variable u = 1/2 - r with high-precision quadrature.
    """
    s = float(s)
    end = s + 0.5
    if not -0.5 < end < 0.5:
        raise BadEps(f"A(s) is evaluated only for s + 1/2 in (-1/2, 1/2), "
                     f"got {end}")
    if end == 0.0:
        return 0.0
    # the integrand is even, so the signed integral reduces to [0, |end|]
    sign = 1.0 if end > 0 else -1.0
    x = abs(end)
    gap = 0.5 - x
    split = max(0.5 - 10.0 * gap, 0.0)
    if split >= x:
        split = x
    val, _ = quad(lambda r: r * math.tan(math.pi * r), 0.0, split,
                  epsabs=1e-13, epsrel=1e-12, limit=400)
    if split < x:
        # u = 1/2 - r turns the near-pole stretch into
        # (1/2 - u) cot(pi u), which tanh-sinh quadrature resolves
        mp.dps = 30
        tail = mp_quad(
            lambda u: (mp.mpf("0.5") - u) / mp.tan(mp.pi * u),
            [mp.mpf(gap), mp.mpf("0.5") - mp.mpf(split)],
        )
        val += float(tail)
    return -2.0 * math.pi * sign * val


def asy_ratio(eps):
    """exp(A(-eps)) / (2 pi eps); approaches 1 as eps decreases to 0."""
    if not 0.0 < eps <= 0.2:
        raise BadEps(f"eps must lie in (0, 0.2], got {eps}")
    return math.exp(A_of(-eps)) / (2.0 * math.pi * eps)


def zero_order_prediction(dim, genus):
    """Order and leading-coefficient magnitude of the Ruelle zero at s = 0.

    The sign of the leading coefficient is structurally undetermined and
    deliberately not reported.
    """
    if genus < 2 or dim < 1:
        raise ValueError("need genus >= 2 and dim >= 1")
    order = dim * (2 * genus - 2)
    return order, (2.0 * math.pi) ** order


def singularity_catalog(table, dim, genus, k_max):
    """Predicted singularity set: spectral points plus the trivial ladder.

    Spectral entries sit at ``1/2 +- i mu`` with order = multiplicity;
    ladder entries at ``-k`` with order ``dim (2g - 2)(1 + 2k)``;
    coinciding locations merge by summing orders.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    merged = {}

    def add(location, order, source):
        location = complex(round(location.real, 12), round(location.imag, 12))
        if location in merged:
            prev_order, prev_source = merged[location]
            merged[location] = (prev_order + order, "merged")
        else:
            merged[location] = (order, source)

    if table is not None:
        for mu, mult in table.entries:
            mu = complex(mu)
            add(0.5 + 1j * mu, mult, "spectral")
            if mu != 0:
                add(0.5 - 1j * mu, mult, "spectral")
    for k in range(k_max + 1):
        add(complex(-k, 0.0), dim * (2 * genus - 2) * (1 + 2 * k),
            "trivial_ladder")
    entries = tuple(
        sorted(
            ((loc, order, source) for loc, (order, source) in merged.items()),
            key=lambda e: (-e[0].real, e[0].imag),
        )
    )
    return SingularityCatalog(entries)
