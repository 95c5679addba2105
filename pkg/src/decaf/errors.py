"""Exception types shared across the package.

The CLI maps these onto stable exit codes: ConfigError -> 2,
DataFormatError -> 3, NumericsError -> 4.
"""


class ShapeError(ValueError):
    """Tensor/array dimensions are inconsistent; message names the offending axis."""


class ConfigError(ValueError):
    """Invalid configuration (bad key, bad value, incompatible settings)."""


class DataFormatError(ValueError):
    """Corrupt or mistyped data file (bad magic, truncated payload, ...)."""


class NumericsError(RuntimeError):
    """Non-finite values or a numerically failed solve."""


class GraphError(RuntimeError):
    """Autodiff graph misuse (non-scalar backward, reusing a spent graph)."""
