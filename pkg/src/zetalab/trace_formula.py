"""Geometric side of the twisted heat trace formula.

The trace of the (possibly shifted) twisted heat operator splits into an
identity contribution — the Plancherel integral weighted by
``dim * Vol / (4 pi^2)`` — and a hyperbolic contribution summed over the
length spectrum:

    (4 pi t)^{-1/2} / 2 * sum  l tr chi(gamma) e^{-l^2/4t}
                               / (n_Gamma(gamma) sinh(l/2))

with an overall ``e^{-t/4}`` on the hyperbolic Gaussian for the
unshifted Laplace trace.  The hyperbolic sum refuses to return a value
whose certified tail is not negligible; it raises ``CutoffInsufficient``
with the minimal adequate cutoff instead.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc

from .errors import BadT, CutoffInsufficient
from .hyperbolic_core import gauss_bonnet_volume
from .representation import DELTA_C
from .zeta_series import class_traces, envelope_constant, _fsum_complex

#: default relative tolerance for the hyperbolic-tail admissibility guard
DEFAULT_TAIL_RTOL = 1e-6


@dataclass(frozen=True)
class TraceValue:
    """Heat-trace contribution with stamped error estimates."""

    value: complex
    quadrature_error: float
    tail_bound: float
    t: float
    shifted: bool


class SpectralTable:
    """Ingested eigenvalue data: (mu, multiplicity) with lambda = 1/4 + mu^2."""

    def __init__(self, entries):
        cleaned = []
        for mu, mult in entries:
            mult = int(mult)
            if mult < 1:
                raise ValueError("multiplicities must be >= 1")
            cleaned.append((complex(mu), mult))
        cleaned.sort(
            key=lambda e: ((0.25 + e[0] ** 2).real, (0.25 + e[0] ** 2).imag)
        )
        self.entries = cleaned

    @classmethod
    def from_file(cls, path):
        """Parse `re_mu,im_mu,multiplicity` lines; `#` starts a comment."""
        entries = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                re_mu, im_mu, mult = line.split(",")
                entries.append((complex(float(re_mu), float(im_mu)), int(mult)))
        return cls(entries)


def plancherel_integral(t):
    """(value, err) of the full-line Plancherel heat integral.

    Integrates ``e^{-t(lambda^2 + 1/4)} pi lambda tanh(pi lambda)`` over
    the real line: twice the [0, Lambda(t)] integral of the even
    integrand, with Lambda(t) = sqrt(35/t) making the Gaussian tail
    negligible; err combines quadrature error and the tail envelope.
    """
    if t <= 0:
        raise BadT(f"t must be positive, got {t}")
    cut = math.sqrt(35.0 / t)

    def integrand(lam):
        return math.exp(-t * (lam * lam + 0.25)) * math.pi * lam * math.tanh(
            math.pi * lam
        )

    val, err = quad(integrand, 0.0, cut, epsabs=1e-13, epsrel=1e-12, limit=200)
    # tanh <= 1 envelope: 2 * int_cut^inf e^{-t(l^2+1/4)} pi l dl
    tail = math.pi * math.exp(-t * 0.25) * math.exp(-t * cut * cut) / t
    return 2.0 * val, 2.0 * err + tail


def _hyperbolic_tail(t, cutoff, c_hat_env, dim, c_bar, l_min):
    """Envelope for the hyperbolic sum beyond the cutoff.

    Terms are bounded by ``dim e^{(c_bar + 1/2) u - u^2/4t}`` (times the
    fixed prefactors); integrating against the counting envelope
    ``dN <= c_hat_env e^u du`` and completing the square gives an
    erfc-type bound.
    """
    b = c_bar + 0.5
    m = 2.0 * b * t
    # int_L^inf u e^{b u - u^2/4t} du = e^{b^2 t} *
    #     [2t e^{-(L-m)^2/4t} + m sqrt(pi t) erfc((L-m)/(2 sqrt t))]
    x = (cutoff - m) / (2.0 * math.sqrt(t))
    integral = math.exp(b * b * t) * (
        2.0 * t * math.exp(-((cutoff - m) ** 2) / (4.0 * t))
        + m * math.sqrt(math.pi * t) * erfc(x)
    )
    prefactor = 1.0 / (2.0 * math.sqrt(4.0 * math.pi * t))
    return (
        prefactor
        * dim
        * c_hat_env
        * integral
        / (1.0 - math.exp(-l_min))
    )


def _required_cutoff(t, c_hat_env, dim, c_bar, l_min, target):
    for cut in np.arange(4.0, 80.01, 0.25):
        if _hyperbolic_tail(t, cut, c_hat_env, dim, c_bar, l_min) <= target:
            return float(cut)
    return math.inf


def hyperbolic_term(t, spec, rep, shifted, tail_rtol=DEFAULT_TAIL_RTOL):
    """Hyperbolic contribution to the heat trace at time t.

    Raises ``CutoffInsufficient`` (naming the minimal adequate cutoff)
    when the certified tail exceeds ``tail_rtol`` times the computed
    scale, so an under-resolved spectrum can never silently pass for a
    converged value.
    """
    if t <= 0:
        raise BadT(f"t must be positive, got {t}")
    l = spec.lengths
    prefactor = 1.0 / (2.0 * math.sqrt(4.0 * math.pi * t))
    weights = (
        prefactor * l * np.exp(-(l * l) / (4.0 * t))
        / (spec.n_gammas * np.sinh(l / 2.0))
    )
    value = _fsum_complex(class_traces(spec, rep) * weights)
    c_bar = rep.c_hat + DELTA_C
    env = envelope_constant(spec)
    l_min = float(l[0]) if len(spec) else 1.0
    tail = _hyperbolic_tail(t, spec.cutoff, env, rep.dim, c_bar, l_min)
    scale = max(abs(value), prefactor * math.exp(-l_min * l_min / (4.0 * t)))
    if tail > tail_rtol * scale:
        needed = _required_cutoff(t, env, rep.dim, c_bar, l_min,
                                  tail_rtol * scale)
        raise CutoffInsufficient(
            f"cutoff {spec.cutoff:g} leaves a hyperbolic tail {tail:.3e} "
            f"> {tail_rtol:g} x scale at t = {t:g}; need cutoff >= "
            f"{needed:g}",
            required_cutoff=needed,
        )
    if not shifted:
        value *= math.exp(-t / 4.0)
        tail *= math.exp(-t / 4.0)
    return TraceValue(value, 0.0, tail, float(t), bool(shifted))


def geometric_heat_trace(t, spec, rep, shifted, tail_rtol=DEFAULT_TAIL_RTOL):
    """Identity term plus hyperbolic term of the heat trace formula."""
    ident, ident_err = plancherel_integral(t)
    vol = gauss_bonnet_volume(2)
    ident_value = rep.dim * vol / (4.0 * math.pi**2) * ident
    ident_err *= rep.dim * vol / (4.0 * math.pi**2)
    if shifted:
        ident_value *= math.exp(t / 4.0)
        ident_err *= math.exp(t / 4.0)
    hyp = hyperbolic_term(t, spec, rep, shifted, tail_rtol=tail_rtol)
    return TraceValue(
        ident_value + hyp.value,
        ident_err + hyp.quadrature_error,
        hyp.tail_bound,
        float(t),
        bool(shifted),
    )


def spectral_side(table, t):
    """sum m(mu) e^{-t lambda(mu)} with lambda = 1/4 + mu^2."""
    if t <= 0:
        raise BadT(f"t must be positive, got {t}")
    total = 0.0 + 0.0j
    for mu, mult in table.entries:
        total += mult * np.exp(-t * (0.25 + mu * mu))
    return complex(total)


def tanh_partial_fraction_check(lam, n_terms):
    """Residual of the partial-fraction expansion of pi lambda tanh(pi lambda).

    Compares against the symmetric partial sum over odd |n| <= n_terms of
    ``lambda^2 / ((n/2)^2 + lambda^2)`` plus the integral tail estimate
    ``2 lambda (pi/2 - arctan(n_terms / (2 lambda)))``.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    lam = float(lam)
    if lam == 0.0:
        return 0.0
    n = np.arange(1.0, n_terms + 1.0, 2.0)
    partial = 2.0 * math.fsum(lam * lam / ((n / 2.0) ** 2 + lam * lam))
    tail = 2.0 * lam * (math.pi / 2.0 - math.atan(n_terms / (2.0 * lam)))
    lhs = math.pi * lam * math.tanh(math.pi * lam)
    return abs(lhs - partial - tail)
