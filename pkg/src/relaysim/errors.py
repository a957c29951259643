"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible or unsupported dimensions."""


class DegenerateInputError(ValueError):
    """An input is singular / zero where a direction is required."""


class UnsupportedConfigError(ValueError):
    """A scheme cannot run under the requested network configuration."""


class BufferViolationError(RuntimeError):
    """A buffer update left the admissible range [0, B_max]."""


class ConfigError(ValueError):
    """An experiment description file is malformed."""
