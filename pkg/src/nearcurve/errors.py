"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An operation's stated precondition does not hold for the given inputs."""


class ConfigError(ValueError):
    """Malformed, missing, or unknown experiment configuration."""


class CheckFailure(Exception):
    """An experiment-level consistency check failed (CLI exit code 3)."""
