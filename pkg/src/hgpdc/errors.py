"""Exception hierarchy shared by all modules.

Each class maps onto one CLI exit code (see :mod:`hgpdc.cli`).
"""


class HgpdcError(Exception):
    """Base class for every error raised by the package."""


class DomainError(HgpdcError, ValueError):
    """An input lies outside the domain where a quantity is defined."""


class ConfigError(HgpdcError, ValueError):
    """A configuration file is missing, malformed, or inconsistent."""


class ContractError(HgpdcError, ValueError):
    """An input violates a precondition of the receiving operation."""


class GeometryError(HgpdcError):
    """The requested interaction geometry cannot be realized."""


class NoSolutionError(HgpdcError):
    """A search finished without finding the requested root or crossing."""


class NumericalError(HgpdcError, ArithmeticError):
    """A numerical routine failed to converge or produced non-finite values."""
