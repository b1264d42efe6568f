"""Exception types shared across the package."""


class ZetaLabError(Exception):
    """Base class for all package-specific errors."""


class NotHyperbolic(ZetaLabError):
    """Matrix has |trace| <= 2 and carries no translation length."""


class UnsupportedGenus(ZetaLabError):
    """Only the genus-2 octagon model is implemented."""


class BadGenus(ZetaLabError):
    """Genus below 2 admits no hyperbolic structure."""


class WordTooLong(ZetaLabError):
    """Word exceeds the supported 64-letter cap."""


class CutoffTooLarge(ZetaLabError):
    """Requested spectrum cutoff exceeds the word-length cap or node budget."""


class BeyondCutoff(ZetaLabError):
    """Counting query beyond the enumerated cutoff."""


class RelationViolated(ZetaLabError):
    """Generator images do not satisfy the surface relation."""


class Singular(ZetaLabError):
    """A generator image is numerically non-invertible."""


class EmptySpectrum(ZetaLabError):
    """Operation requires at least one conjugacy class."""


class OutsideHalfPlane(ZetaLabError):
    """Re(s) is at or below the convergence abscissa."""


class BadT(ZetaLabError):
    """Heat-trace time parameter must be positive."""


class CutoffInsufficient(ZetaLabError):
    """Spectrum cutoff too small for the requested heat-trace time."""

    def __init__(self, message, required_cutoff=None):
        super().__init__(message)
        self.required_cutoff = required_cutoff


class EndpointAtPole(ZetaLabError):
    """Contour endpoint too close to a pole of tan(pi r)."""


class BadEps(ZetaLabError):
    """Asymptotic-ratio epsilon outside (0, 0.2]."""
