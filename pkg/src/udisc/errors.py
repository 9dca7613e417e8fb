"""Exception types raised across the package."""


class UdiscError(Exception):
    """Base class for all package errors."""


class DegenerateSystem(UdiscError):
    pass


class FrequencyOverflow(UdiscError):
    pass


class SingularGram(UdiscError):
    pass


class ZeroFunction(UdiscError):
    pass


class CombinatorialOverflow(UdiscError):
    pass


class Stage1Failed(UdiscError):
    pass


class BudgetExhausted(UdiscError):
    pass


class GridOverflow(UdiscError):
    pass


class NonterminatingSum(UdiscError):
    pass


class NetDeficient(UdiscError):
    pass


class QuadratureFailure(UdiscError):
    pass


class ConvergenceFailure(UdiscError):
    pass


class ConfigError(UdiscError):
    pass
