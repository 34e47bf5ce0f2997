"""Exception hierarchy shared by every layer of the package."""


class MesonDistError(Exception):
    """Base class for all package errors."""


class ConfigurationError(MesonDistError, ValueError):
    """Bad input from the caller: unknown scenario, missing or out-of-range parameter."""


class DimensionError(ConfigurationError):
    """Operand shapes do not agree."""


class NumericalError(MesonDistError, ArithmeticError):
    """A computation produced or met something numerically unacceptable."""


class ConvergenceError(NumericalError):
    """An iterative routine hit its iteration cap."""


class UnphysicalStateError(NumericalError, ValueError):
    """A matrix violates Hermiticity, unit trace or positivity beyond tolerance."""
