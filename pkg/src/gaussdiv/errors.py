"""Exception types shared across the library."""


class SingularMapError(Exception):
    """A process matrix X_t is singular, or det X_t changes sign on the grid.

    Carries the offending time in ``t`` when known.
    """

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class QuadratureError(Exception):
    """Adaptive quadrature failed to reach the requested tolerance."""
