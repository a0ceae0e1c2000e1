"""Exception hierarchy shared by the numerical modules and the CLI."""


class TripodError(Exception):
    """Base class for numerical failures raised by tripod_eit."""


class DegenerateSteadyState(TripodError):
    """The Liouvillian null space has dimension > 1."""


class SolveFailure(TripodError):
    """The steady-state linear solve failed or left a large residual."""


class DivisionNearZero(TripodError):
    """A denominator of a closed-form response vanished."""


class NonlinearRegime(TripodError):
    """The probed field is too strong for a linear-response ratio."""


class GridTooCoarse(TripodError):
    """Too few spectrum samples inside a window."""


class ZeroCoupling(TripodError):
    """The dressed frame is undefined without a coupling field."""


class QuadratureNotConverged(TripodError):
    """Doubling the velocity quadrature changed the result too much."""


class NoWindowFound(TripodError):
    """No transparency dip between two absorption maxima."""


class NoBracket(TripodError):
    """The velocity mismatch has no interior minimum on the search interval."""


class ConfigError(ValueError):
    """Malformed or out-of-range run configuration."""
