"""Exception and warning types shared across the package."""


class ConfigError(ValueError):
    """Invalid test, attack or experiment configuration."""


class DataError(ValueError):
    """Malformed or degenerate input data (shapes, sizes, parse failures)."""


class PowerlessTestWarning(UserWarning):
    """The adjusted level is so small that the test can never reject."""


class PermutationCountWarning(UserWarning):
    """The permutation count is below the sufficient count for the power guarantees."""
