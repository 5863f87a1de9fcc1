"""Exception types shared across the package."""


class MixoptError(Exception):
    """Base class for all mixopt errors."""


class InputShapeError(MixoptError, ValueError):
    """Array arguments have inconsistent or unexpected dimensions."""


class ValidationError(MixoptError, ValueError):
    """A value violates a domain invariant (negative mass, non-finite input, ...)."""


class NumericalError(MixoptError):
    """A matrix factorization failed even after jitter escalation."""

    def __init__(self, message: str, final_jitter: float | None = None):
        super().__init__(message)
        self.final_jitter = final_jitter


class FittingError(MixoptError):
    """Hyperparameter optimization produced no finite optimum."""


class InsufficientDataError(MixoptError, ValueError):
    """Not enough observations for the requested operation."""


class ConstraintError(MixoptError):
    """Constraint set is infeasible; carries a certificate of the violated bound."""

    def __init__(self, message: str, certificate: dict | None = None):
        super().__init__(message)
        self.certificate = certificate or {}


class ConfigError(MixoptError):
    """Invalid or incomplete configuration (e.g. missing GWP coefficient)."""


class SchemaError(MixoptError, ValueError):
    """An input file does not match the documented schema."""


class IntegrityError(MixoptError):
    """A persisted artifact is missing or fails its digest check."""

    def __init__(self, message: str, digest: str | None = None):
        super().__init__(message)
        self.digest = digest


class MigrationError(MixoptError):
    """Persisted campaign was written by an incompatible store version."""


class DatasetUnavailableError(MixoptError):
    """A referenced external dataset is not present in this environment."""
