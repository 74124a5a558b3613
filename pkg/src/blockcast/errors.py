"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration value or document is invalid.

    The message always names the offending field so callers (and the CLI)
    can report something actionable.
    """


class SchemaError(ValueError):
    """A file on disk does not match the expected schema."""


class PredictionError(RuntimeError):
    """A predictor cannot produce an estimate for this input.

    Raised for data-dependent conditions (no target in view, receding
    object, degenerate fit), as opposed to caller mistakes.
    """
