class SeparationToolkitError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidArgumentError(SeparationToolkitError, ValueError):
    pass


class DimensionMismatchError(SeparationToolkitError, ValueError):
    pass


class ConfigError(SeparationToolkitError, ValueError):
    """Experiment configuration is missing, malformed or inconsistent."""


class ChannelGenerationError(SeparationToolkitError, RuntimeError):
    """Rejection sampling could not meet the condition-number bound."""


class DegenerateDataError(SeparationToolkitError, RuntimeError):
    """Received data cannot be whitened (too few samples or rank deficient)."""


class DegenerateSeparationError(SeparationToolkitError, RuntimeError):
    """A separator output carries no energy from any source."""
