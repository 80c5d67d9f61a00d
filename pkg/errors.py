from typing import Optional


class PricingError(Exception):
    """
    Base class for every error raised by the pricing library.

    Attributes:
        detail (str): Human readable description of what went wrong.
        exit_code (int): Process exit code the CLI uses when the error escapes a command.
    """

    exit_code: int = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class DomainError(PricingError, ValueError):
    """An argument lies outside the domain on which an identity is asserted."""

    exit_code = 2


class PoleError(DomainError):
    """The Laplace exponent was evaluated at its pole lambda = -c."""


class RootSolveError(PricingError):
    """Roots of psi(lambda) = u failed the residual check after polishing."""


class RepeatedRootError(RootSolveError):
    """Two roots of psi(lambda) = u are too close for the partial-fraction form."""


class WindowViolation(PricingError):
    """The switching cost lies outside the window guaranteeing a unique boundary."""


class NoBracket(PricingError):
    """The boundary function does not change sign on [0, b]."""


class QuadratureError(PricingError):
    """The jump integral of the generator did not converge."""


class ConfigError(PricingError):
    """The run configuration or a --set override is invalid."""

    exit_code = 2
