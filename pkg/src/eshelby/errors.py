"""Exception hierarchy shared across the library."""


class EshelbyError(Exception):
    """Base class for all library errors."""


class DomainError(EshelbyError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class UnsupportedArgumentError(EshelbyError, ValueError):
    """Argument family outside the restricted set this kernel implements."""


class AccuracyError(EshelbyError, RuntimeError):
    """Requested tolerance could not be achieved.

    Attributes
    ----------
    achieved : float
        The error estimate actually reached.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class MeshTopologyError(EshelbyError, ValueError):
    """Mesh is not a watertight oriented surface."""


class GeometryError(EshelbyError, ValueError):
    """Invalid geometric input (non-planar face, degenerate dimensions...)."""


class IntervalError(EshelbyError, ValueError):
    """Invalid time window (t_prev >= t_f, or t outside the admissible range)."""


class ConditioningError(EshelbyError, RuntimeError):
    """Linear system too ill-conditioned to trust."""


class ResolutionError(EshelbyError, RuntimeError):
    """Grid resolution insufficient (aliasing detected)."""


class UnsupportedBCError(EshelbyError, ValueError):
    """Boundary-condition specification not supported."""
