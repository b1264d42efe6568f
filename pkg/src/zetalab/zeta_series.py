"""Twisted Selberg/Ruelle zeta series over an enumerated length spectrum.

All three quantities are absolutely convergent sums over conjugacy
classes for Re(s) above the abscissa ``c_hat + DELTA_C + 1``:

    log Z(s)  = - sum (1/n) tr chi(gamma) e^{-s l} / (1 - e^{-l})
    log R(s)  = - sum (1/n) tr chi(gamma) e^{-s l}
    L(s)      = + sum (l/n) tr chi(gamma) e^{-(s-1/2) l} / (2 sinh(l/2))
              = d/ds log Z(s)

Each value carries a certified truncation tail derived from the audited
counting envelope N(u) <= C_hat e^u, where C_hat is twice the maximum of
N(u)e^{-u} over the final window [L-2, L] of the enumerated range (the
product N(u)e^{-u} is checked to be decreasing there, so the window
maximum bounds the extrapolation beyond the cutoff).
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptySpectrum, OutsideHalfPlane
from .representation import DELTA_C, evaluate

#: width of the near-cutoff window used for the counting envelope
ENVELOPE_WINDOW = 0.5
#: safety factor applied to the audited envelope constant
ENVELOPE_SAFETY = 2.0


@dataclass(frozen=True)
class ZetaValue:
    """A truncated log-zeta value with its certified truncation error."""

    value: complex
    tail_bound: float
    cutoff_used: float
    s: complex


def convergence_abscissa(rep):
    """Right edge of the certified convergence half-plane."""
    return rep.c_hat + DELTA_C + 1.0


def _require(s, spec, rep):
    if len(spec) == 0:
        raise EmptySpectrum("length spectrum has no classes")
    abscissa = convergence_abscissa(rep)
    if complex(s).real <= abscissa:
        raise OutsideHalfPlane(
            f"Re(s) = {complex(s).real:.6g} is not above the certified "
            f"abscissa {abscissa:.6g}"
        )


def envelope_constant(spec):
    """Audited growth constant C_hat with N(u) <= C_hat e^u beyond the cutoff.

    Uses the final window of the enumerated range: N(u)e^{-u} decreases
    with u (checked), so its maximum there, doubled for safety, bounds
    the extrapolated envelope.
    """
    lengths = spec.lengths
    counts = np.arange(1, len(lengths) + 1, dtype=np.float64)
    ratio = counts * np.exp(-lengths)
    window = lengths >= spec.cutoff - ENVELOPE_WINDOW
    if not window.any():
        window = np.ones(len(lengths), dtype=bool)
    return ENVELOPE_SAFETY * float(ratio[window].max())


def class_traces(spec, rep):
    """tr chi(gamma) for every class, as a complex array.

    Fast paths: trivial representations need no per-word work, scalar
    ones reduce to letter-count sums of logs.
    """
    n = len(spec)
    if all(
        np.array_equal(m, np.eye(rep.dim)) for m in rep.generator_images
    ):
        return np.full(n, complex(rep.dim))
    if rep.is_scalar:
        logs = np.zeros(8, dtype=complex)
        for g in range(4):
            z = complex(rep.generator_images[g][0, 0])
            logs[g] = cmath.log(z)
            logs[g + 4] = -logs[g]
        per_letter = logs[spec.words_flat.astype(np.int64)]
        sums = np.add.reduceat(per_letter, spec.offsets[:-1])
        sums[spec.offsets[:-1] == spec.offsets[1:]] = 0.0
        return np.exp(sums)
    return np.array(
        [np.trace(evaluate(rep, spec.word_at(i))) for i in range(n)],
        dtype=complex,
    )


def _fsum_complex(terms):
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _tail(spec, rep, re_s, with_denominator, extra_slack=0.0):
    """Integral tail bound for sum_{l > L} dim e^{(c-Re s) l} [/(1-e^{-l})].

    Stieltjes integration by parts against N(u) <= C_hat e^u gives

        sum_{l > L} e^{-a l} <= e^{(1-a)L} (C_hat a/(a-1) - N(L) e^{-L})

    for a > 1; the subtracted boundary term uses the exact enumerated
    count at the cutoff.  ``extra_slack`` absorbs a polynomial factor l
    by trading decay rate (u <= e^{d u}/(e d) for any d > 0).
    """
    c_bar = rep.c_hat + DELTA_C
    a = re_s - c_bar - extra_slack
    if a <= 1.0:
        return math.inf
    c_hat = envelope_constant(spec)
    boundary = len(spec) * math.exp(-spec.cutoff)
    tail = (
        rep.dim
        * math.exp((1.0 - a) * spec.cutoff)
        * (c_hat * a / (a - 1.0) - boundary)
    )
    if extra_slack > 0.0:
        tail /= math.e * extra_slack
    if with_denominator:
        tail /= 1.0 - math.exp(-float(spec.lengths[0]))
    return tail


def log_selberg(s, spec, rep):
    """Truncated log Z(s; chi) with certified tail."""
    _require(s, spec, rep)
    s = complex(s)
    l = spec.lengths
    weights = np.exp(-s * l) / ((1.0 - np.exp(-l)) * spec.n_gammas)
    value = -_fsum_complex(class_traces(spec, rep) * weights)
    return ZetaValue(value, _tail(spec, rep, s.real, True), spec.cutoff, s)


def log_ruelle(s, spec, rep):
    """Truncated log R(s; chi) with certified tail."""
    _require(s, spec, rep)
    s = complex(s)
    weights = np.exp(-s * spec.lengths) / spec.n_gammas
    value = -_fsum_complex(class_traces(spec, rep) * weights)
    return ZetaValue(value, _tail(spec, rep, s.real, False), spec.cutoff, s)


def log_derivative_L(s, spec, rep):
    """Truncated L(s; chi) = (d/ds) log Z(s; chi) with certified tail."""
    _require(s, spec, rep)
    s = complex(s)
    l = spec.lengths
    weights = (
        l * np.exp(-(s - 0.5) * l) / (2.0 * np.sinh(l / 2.0) * spec.n_gammas)
    )
    value = _fsum_complex(class_traces(spec, rep) * weights)
    c_bar = rep.c_hat + DELTA_C
    slack = min(0.1, 0.5 * (s.real - c_bar - 1.0))
    return ZetaValue(
        value, _tail(spec, rep, s.real, True, extra_slack=slack),
        spec.cutoff, s,
    )


def ruelle_selberg_residual(s, spec, rep):
    """|log R(s) - log Z(s) + log Z(s+1)|; bounded by the three tails."""
    r = log_ruelle(s, spec, rep)
    z0 = log_selberg(s, spec, rep)
    z1 = log_selberg(s + 1.0, spec, rep)
    return abs(r.value - z0.value + z1.value)
