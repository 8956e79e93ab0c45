"""Exception types shared across the package."""


class FreemaxError(Exception):
    """Base class for package errors."""


class UnsupportedLawError(FreemaxError, NotImplementedError):
    """The requested operation has no implementation for this law."""


class NumericalError(FreemaxError, ArithmeticError):
    """A numerical scheme failed to converge or produced an invalid value."""


class ContractError(FreemaxError, ValueError):
    """An input violates an operation's preconditions."""
