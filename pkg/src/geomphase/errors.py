"""Exception types shared across the package."""


class GeomPhaseError(Exception):
    """Base class for domain errors raised by this package."""


class ChartSingularityError(GeomPhaseError):
    """A point sits on (or too close to) a coordinate-chart singularity."""


class BandingError(GeomPhaseError):
    """Eigenvalue spacing does not allow an unambiguous band grouping."""


class DegenerateBandError(GeomPhaseError):
    """An operation restricted to nondegenerate bands met a degenerate one."""


class ResolutionError(GeomPhaseError):
    """A loop stayed under-resolved after the refinement cap."""


class QuadratureError(GeomPhaseError):
    """A quadrature error estimate exceeded the requested tolerance."""


class ContourError(GeomPhaseError):
    """A planar contour violates the preconditions of the requested integral."""


class SingularMatrixError(GeomPhaseError):
    """A matrix required to be invertible is numerically singular."""


class ConfigError(GeomPhaseError):
    """Experiment configuration failed validation; carries every finding."""

    def __init__(self, errors):
        self.errors = [str(e) for e in errors]
        super().__init__("; ".join(self.errors))


class TubeCrossingWarning(UserWarning):
    """A contour segment enters the flux tube: quantization no longer exact."""
