"""Exception hierarchy shared by all econstat modules."""


class EconStatError(ValueError):
    """Base class for every error raised by econstat."""


# maxent
class DegenerateConstraint(EconStatError):
    pass


class InfeasibleConstraint(EconStatError):
    pass


class TooLarge(EconStatError):
    pass


class NoFeasibleOccupancy(EconStatError):
    pass


class ZeroTemperature(EconStatError):
    pass


# simulation
class InvalidConfig(EconStatError):
    pass


class TooFewSnapshots(EconStatError):
    pass


# market
class NonPositivePrices(EconStatError):
    pass


class NoConvergence(EconStatError):
    pass


class InfeasibleSpec(EconStatError):
    pass


# analytics
class TooFewValues(EconStatError):
    pass


class DegenerateTail(EconStatError):
    pass


class EmptySample(EconStatError):
    pass


class AllZeroValues(EconStatError):
    pass


class DomainError(EconStatError):
    pass


# config / io
class ConfigError(EconStatError):
    """Config problem tied to a key and, when known, a line of the config text."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class UnknownKey(ConfigError):
    pass


class ConfigTypeError(ConfigError, TypeError):
    pass


class MissingRequired(ConfigError):
    pass


class MissingColumn(EconStatError):
    pass


class MalformedRow(EconStatError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class EmptyData(EconStatError):
    pass
