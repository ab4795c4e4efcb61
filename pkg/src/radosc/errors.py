"""Exception hierarchy shared by all radosc modules."""


class RadoscError(Exception):
    """Base class for every error raised by the package."""


class InvalidParameterError(RadoscError, ValueError):
    """A parameter lies outside its documented domain."""


class NonConvergenceError(RadoscError, ArithmeticError):
    """A series failed to meet its termination criterion."""


class GridError(RadoscError, ValueError):
    """Grid construction failed, or two grid functions live on different grids."""


class DomainError(RadoscError, ValueError):
    """A function was evaluated outside its domain (for instance r <= 0)."""


class ForbiddenLadderError(RadoscError, ValueError):
    """A ladder step would leave the lattice (negative angular momentum)."""


class BetaPoleError(RadoscError, ArithmeticError):
    """The hypergeometric denominator of the complex superpotential is near zero."""


class ConfigError(RadoscError, ValueError):
    """A run configuration could not be parsed or failed validation."""
