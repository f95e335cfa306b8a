class BeamLearnError(Exception):
    """Base class for library errors."""


class InputDomainError(BeamLearnError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class ContractViolation(BeamLearnError, ValueError):
    """A caller broke an operation's precondition (bad reward, length mismatch, ...)."""


class ConfigError(BeamLearnError, ValueError):
    """Malformed or inconsistent scenario configuration."""
