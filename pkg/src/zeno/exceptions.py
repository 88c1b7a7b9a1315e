"""Exception hierarchy for the zeno package."""


class ZenoError(Exception):
    """Base class for all errors raised by this package."""


class InvalidModelError(ZenoError, ValueError):
    """A detector, system, drive or schedule violates its invariants."""


class LookupFailure(ZenoError, KeyError):
    """A level, auxiliary state or drive element does not exist."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class IntegrationAccuracyError(ZenoError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance.

    Attributes
    ----------
    estimate : complex
        The value the integrator produced anyway.
    error : float
        The integrator's own error estimate.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class PerturbationValidityError(ZenoError, ArithmeticError):
    """Second-order result left the regime where it is meaningful."""


class OracleIntegrationError(ZenoError, ArithmeticError):
    """The exact propagator failed to preserve the norm."""
