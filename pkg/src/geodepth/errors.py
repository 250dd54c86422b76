"""Exception taxonomy.

Validation errors subclass ValueError so callers that only know numpy
conventions still catch them; everything descends from GeodepthError so the
CLI can map failures onto its exit-code contract in one place.
"""


class GeodepthError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(GeodepthError, ValueError):
    """A point, dataset, or parameter failed validation."""


class WrongDimension(ValidationError):
    pass


class NotUnitNorm(ValidationError):
    """Sphere coordinates further than 1e-6 from unit norm."""


class NotSymmetric(ValidationError):
    pass


class NotPositiveDefinite(ValidationError):
    pass


class ManifoldMismatch(ValidationError):
    """Operands carry different manifold specs."""


class CutLocus(GeodepthError):
    """The geodesic between two points is not unique (antipodes, half-period
    torus coordinates). Raised rather than guessing a midpoint; consumers
    decide policy."""


class DegenerateSample(GeodepthError):
    """Every sample pair was skipped; no depth denominator remains."""


class NoConvergence(GeodepthError):
    """Jacobi sweeps did not push the off-diagonal mass below threshold."""


class SamplerFailure(GeodepthError):
    pass


class RejectionStall(SamplerFailure):
    """Rejection sampler acceptance rate collapsed (< 1e-4 over 1e5 proposals)."""


class ZeroMAD(GeodepthError):
    """Every projection direction had zero median absolute deviation."""


class NoValidPole(GeodepthError):
    """No candidate hemisphere pole kept the query on its closed side."""


class CoincidentPoints(GeodepthError):
    """An operation requiring x != y received coincident points."""


class UnknownPreset(GeodepthError, KeyError):
    pass
