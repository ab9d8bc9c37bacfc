"""Exception types shared across the package."""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class GridParseError(PipelineError):
    """Malformed ASCII grid file. Carries the offending 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ZoneValidationError(PipelineError):
    """A GeoJSON feature failed validation. Names the offending feature."""


class QualityDecodeError(PipelineError):
    """Quality integer contains a reserved or undefined bit-field value."""

    def __init__(self, message, qf):
        super().__init__(f"{message} (raw value {qf})")
        self.qf = qf


class ConfigError(PipelineError):
    """Invalid or incomplete run configuration."""


class StatsError(PipelineError):
    """Statistic undefined for the given sample (too few points or zero variance)."""


class ReportError(PipelineError):
    """Report assembly failed: missing or inconsistent inputs."""
