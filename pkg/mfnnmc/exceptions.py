"""Custom exceptions for mfnnmc.

This module provides exception classes used throughout the package.
"""


class MfnnmcError(Exception):
    """Base exception for all mfnnmc errors."""

    def __init__(self, message: str, details: dict | None = None):
        """Initialize exception with message and optional details.

        Args:
            message: Human-readable error message
            details: Optional dictionary with additional error context
        """
        super().__init__(message)
        self.message = message
        self.details = details


class InputError(MfnnmcError):
    """Exception raised when an argument is outside an operation's domain."""

    pass


class ConfigurationError(MfnnmcError):
    """Exception raised when a design, training or campaign config is invalid.

    Attributes:
        errors: Field-level diagnostics, one dict per offending field
    """

    errors: list[dict]

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message, details)
        self.errors = details.get("errors", []) if details else []


class SolverError(MfnnmcError):
    """Exception raised when a forward solve fails.

    Attributes:
        y: Parameter point at which the solver failed
    """

    def __init__(self, message: str, y, details: dict | None = None):
        merged = {"y": y}
        if details:
            merged.update(details)
        super().__init__(message, merged)
        self.y = y


class TrainingDivergenceError(MfnnmcError):
    """Exception raised when training produces a non-finite loss.

    Attributes:
        epoch: Epoch in which the loss became non-finite
        loss: The offending loss value
    """

    epoch: int
    loss: float

    def __init__(self, message: str, epoch: int, loss: float):
        super().__init__(message, details={"epoch": epoch, "loss": loss})
        self.epoch = epoch
        self.loss = loss


class LadderExhaustedError(MfnnmcError):
    """Exception raised when no step size on the admissible ladder meets the bias budget."""

    pass


class ArtifactNotFound(MfnnmcError):
    """Exception raised when campaign artifacts required by an operation are absent.

    Attributes:
        missing: Paths (or run labels) that could not be found
    """

    missing: list[str]

    def __init__(self, message: str, missing: list[str]):
        super().__init__(message, details={"missing": missing})
        self.missing = missing


class StageError(MfnnmcError):
    """Exception raised when a campaign stage fails.

    Wraps the underlying exception and tags it with the stage name so the
    CLI can report where a campaign aborted.

    Attributes:
        stage: Name of the failing stage (e.g. "design", "train_nn1")
        cause: The original exception
    """

    stage: str
    cause: Exception

    def __init__(self, stage: str, cause: Exception):
        details = {"stage": stage, "error": str(cause)}
        if isinstance(cause, MfnnmcError) and cause.details:
            details["cause_details"] = cause.details
        super().__init__(f"stage '{stage}' failed: {cause}", details)
        self.stage = stage
        self.cause = cause
