"""Exception types shared across the package."""


class LoopspaceError(Exception):
    """Base class for domain errors raised by this package."""


class DegenerateInput(LoopspaceError):
    """An input vector or parameter lies outside the operation's domain."""


class AntipodalPair(LoopspaceError):
    """Geodesic interpolation between antipodal points is not unique."""


class DegenerateCircle(LoopspaceError):
    """The requested circle collapses because its defining points coincide."""


class BaseMismatch(LoopspaceError):
    """A loop and its push-off arcs do not share a base point."""


class GridMismatch(LoopspaceError):
    """Sampled objects live on incompatible grids or ambient dimensions."""


class InvalidLoopData(LoopspaceError):
    """Serialized loop or path data failed validation.

    The message names the offending field (or the parse position for
    malformed files) so callers can point at the bad input directly.
    """


class RegimeError(LoopspaceError):
    """Problem shape has no zero guarantee and best-effort mode is off."""


class NoConvergence(LoopspaceError):
    """The solver could not certify a coincidence.

    Carries the best candidate found so far in ``certificate`` so callers
    can inspect or report it.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class InsufficientBasis(UserWarning):
    """Reduced linear system is too small to be forced to have a kernel."""
