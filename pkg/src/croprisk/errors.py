"""Exception types shared across the package."""


class CropRiskError(Exception):
    """Base class for all croprisk errors."""


class DomainError(CropRiskError, ValueError):
    """An input value is outside the mathematical domain of an operation."""


class IngestError(CropRiskError, ValueError):
    """A CSV input failed validation.

    ``problems`` holds human-readable diagnostics; row-level entries carry
    1-based row numbers (header = row 1).
    """

    def __init__(self, message: str, problems: list[str] | None = None):
        self.problems = problems or []
        detail = message
        if self.problems:
            detail = message + "\n  " + "\n  ".join(self.problems)
        super().__init__(detail)


class MissingDataError(CropRiskError, ValueError):
    """A required data cell is absent and no fill policy allows it."""


class SchemaError(CropRiskError, ValueError):
    """A serialized artifact or feature vector does not match the expected schema."""


class SplitError(CropRiskError, ValueError):
    """A dataset split cannot be formed as requested."""


class TrainingDivergenceError(CropRiskError, RuntimeError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, message: str = ""):
        self.epoch = epoch
        super().__init__(message or f"training diverged (non-finite loss) at epoch {epoch}")


class ConfigError(CropRiskError, ValueError):
    """A job or scenario configuration is invalid."""


class ComparisonError(CropRiskError, ValueError):
    """Two scenario runs cannot be compared."""
