"""Exception types shared across the pipeline."""


class PipelineError(Exception):
    """Base class for errors raised by this package."""


class SchemaError(PipelineError):
    """Malformed or inconsistent on-disk data (maps to exit code 2)."""


class NumericError(PipelineError):
    """Numeric failure such as a degenerate distribution (maps to exit code 3)."""
