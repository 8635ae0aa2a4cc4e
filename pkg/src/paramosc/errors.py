"""Exception types shared across the package."""


class ParamOscError(Exception):
    """Base class for all package errors."""


class DomainError(ParamOscError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class SeriesError(ParamOscError, ArithmeticError):
    """A series failed to converge within the term cap."""


class InvariantViolation(ParamOscError, ArithmeticError):
    """A quantity that must stay positive or constant did not."""


class NodeError(ParamOscError, ValueError):
    """A seed polynomial or Wronskian has real zeros."""


class GridError(ParamOscError, ValueError):
    """The spatial grid does not resolve or contain the requested state."""


class ContractError(ParamOscError, ValueError):
    """Operator and field were built for different times or grids."""


class WindowError(ParamOscError, RuntimeError):
    """Probability leaked to the edges of a propagation window."""


class ConfigError(ParamOscError, ValueError):
    """A run configuration failed validation."""
