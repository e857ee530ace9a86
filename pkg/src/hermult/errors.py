"""Exception types shared across the package."""


class HermultError(Exception):
    """Base class for all package errors."""


class DomainError(HermultError, ValueError):
    """An argument is outside the mathematical domain of the routine."""


class CapabilityError(HermultError):
    """The request is valid but exceeds a configured resource limit."""


class ConvergenceError(HermultError):
    """An iterative computation failed to converge.

    Carries the last two successive estimates so callers can inspect
    how far apart the final refinements were.
    """

    def __init__(self, message, last_two=None):
        super().__init__(message)
        self.last_two = last_two


class UnsupportedRegimeError(HermultError):
    """Exponent combination lies outside the supported theorem hypotheses."""

    def __init__(self, message, hypothesis=""):
        super().__init__(message)
        self.hypothesis = hypothesis


class InconclusiveError(HermultError):
    """Not enough certified information to produce a verdict."""


class TraceCheckRefused(HermultError):
    """The spectral trace comparison was refused because the summability
    criterion did not certify finiteness at the requested order.

    Carries the failing verdict and the full criterion report.
    """

    def __init__(self, message, verdict="", report=None):
        super().__init__(message)
        self.verdict = verdict
        self.report = report
