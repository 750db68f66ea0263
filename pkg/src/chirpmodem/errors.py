"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (bad dimensions, unknown keys, ...)."""


class CapacityError(RuntimeError):
    """A requested exhaustive enumeration exceeds the hard search-space guard."""
