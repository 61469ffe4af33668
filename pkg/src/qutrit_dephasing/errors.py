"""Exception hierarchy shared by the library and the CLI."""


class QutritError(Exception):
    """Base class for all package errors."""


class NormalizationError(QutritError, ValueError):
    pass


class DimensionError(QutritError, ValueError):
    pass


class ContractError(QutritError, ValueError):
    """A numerical precondition (Hermiticity, positivity, trace) was violated."""


class DomainError(QutritError, ValueError):
    """A scalar parameter (gamma, time, count) is outside its allowed range."""


class ChannelIntegrityError(QutritError, ValueError):
    """A Kraus set fails the completeness relation."""


class ClassificationError(QutritError, ValueError):
    """A closed-form formula was asked to evaluate a state outside its class."""


class ConfigError(QutritError, ValueError):
    """Malformed or invalid scenario configuration."""
