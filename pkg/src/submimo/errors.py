"""Error types shared across the toolkit, tagged with a machine-readable category."""


class RadarError(Exception):
    """Base class; `category` is what the CLI reports on a nonzero exit."""

    category = "error"


class ConfigError(RadarError):
    """Inconsistent or malformed configuration (band arithmetic, bad mode, ...)."""

    category = "config"


class ValidationError(RadarError):
    """Inputs violate an operation's preconditions (ambiguous range, bad index, ...)."""

    category = "validation"


class NumericalError(RadarError):
    """A numerical step cannot proceed (rank-deficient refit, undefined SNR, ...)."""

    category = "numerical"
