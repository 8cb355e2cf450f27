"""Exception types shared across the package."""


class IpslError(Exception):
    """Base class for all package errors."""


class ConfigurationError(IpslError):
    """Invalid configuration value; the message names the offending field."""


class ContractViolationError(IpslError):
    """An operation was called outside its documented preconditions."""


class CodecError(IpslError):
    """Genome encode/decode size mismatch."""


class EstimationError(IpslError):
    """A statistical estimate is unavailable for the given data."""


class UndefinedResultError(IpslError):
    """A statistic is undefined for the given input (degenerate data)."""


class StructureError(IpslError):
    """A graph or tier structure violates a structural requirement."""
