"""Exception hierarchy.

The CLI maps these to distinct exit codes: ConfigError -> 2, DataError -> 3,
NumericError -> 4.
"""


class NlikitError(Exception):
    """Base class for all nlikit errors."""


class ConfigError(NlikitError):
    """Invalid configuration: bad kernel expression, track violation, bad option."""


class DataError(NlikitError):
    """Invalid data: corpus problems, id misalignment, shape mismatch, bad files."""


class NumericError(NlikitError):
    """Numeric failure: value-range contract violation, singular solve, PSD failure."""
