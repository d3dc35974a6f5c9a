"""Exception hierarchy shared by every module of the package."""


class FwdSmileError(Exception):
    """Base class for all package errors."""


class DomainError(FwdSmileError, ValueError):
    """An input lies outside the domain where the quantity is defined."""


class GateError(DomainError):
    """An expansion order was requested that the parameter regime does not support."""


class DegenerateInputError(DomainError):
    """A formula hits a removable or genuine pole at the given input."""


class BranchError(FwdSmileError, ArithmeticError):
    """The complex logarithm could not be tracked continuously."""


class SolverError(FwdSmileError, RuntimeError):
    """A root finder failed to bracket or converge."""


class QuadratureError(FwdSmileError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class ConfigError(FwdSmileError, ValueError):
    """Invalid run configuration."""
