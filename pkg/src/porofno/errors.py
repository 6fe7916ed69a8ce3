"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
DataError -> 3, DivergenceError -> 4.
"""


class PorofnoError(Exception):
    """Base class for all package errors."""


class ConfigError(PorofnoError):
    """Invalid configuration or incompatible option combination."""


class GridSizeError(ConfigError):
    """Grid too small for the requested number of Fourier modes."""


class DataError(PorofnoError):
    """Malformed file, missing labels, or otherwise unusable data."""


class DivergenceError(PorofnoError):
    """A numerical computation produced non-finite values."""
