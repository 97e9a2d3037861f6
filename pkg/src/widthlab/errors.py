"""Exception types shared across the package."""


class DomainMismatchError(ValueError):
    """Two functions (or a function and a norm) live on different grids."""


class ConfigError(ValueError):
    """An experiment configuration is malformed."""


class InvariantViolation(RuntimeError):
    """A numerical guarantee that must hold by construction was observed to fail."""


class UnsupportedError(NotImplementedError):
    """The requested variant of an operation is not implemented."""
