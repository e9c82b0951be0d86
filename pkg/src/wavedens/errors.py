"""Error types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid user-supplied configuration (bad family name, grid, schedule...)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge or produced a degenerate result."""
