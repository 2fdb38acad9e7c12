"""Exception hierarchy shared across the package."""


class GibbsPKError(Exception):
    """Base class for every error raised by gibbspk."""


class ParameterError(GibbsPKError, ValueError):
    """A model or routine received parameters outside its admissible range."""


class BoundsError(ParameterError):
    """A size argument exceeds a configured ceiling."""


class NumericalError(GibbsPKError, ArithmeticError):
    """A numerical self-check (normalization, recursion, calibration) failed."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance.

    ``estimate`` and ``error`` carry the best value and error estimate that
    were reached before giving up.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(f"{message} (estimate={estimate!r}, error estimate={error!r})")
        self.estimate = estimate
        self.error = error


class TableError(GibbsPKError):
    """A V-weight table is too small, malformed, or inconsistent."""


class ModelError(GibbsPKError):
    """A model lacks a capability required by the caller."""
