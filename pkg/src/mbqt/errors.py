"""Exception types shared across the package."""


class MbqtError(Exception):
    """Base class for all package errors."""


class ConfigError(MbqtError):
    """Invalid configuration, spec, or argument (CLI exit code 2)."""


class NumericalContractError(MbqtError):
    """A numerical precondition or postcondition was violated (CLI exit code 3)."""


class CapExceededError(MbqtError):
    """Requested instance is larger than the configured dense/size cap."""


class SingularAngleError(ConfigError):
    """Angle hits a cot/tan pole where the requested operator is undefined."""
