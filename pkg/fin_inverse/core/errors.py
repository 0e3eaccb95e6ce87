from __future__ import annotations
from dataclasses import dataclass
from typing import Any


class FinInverseError(Exception):
    """Base class for every error raised by fin_inverse."""


class MeshError(FinInverseError, ValueError):
    pass


class FieldError(FinInverseError, ValueError):
    pass


class SolverError(FinInverseError, RuntimeError):
    pass


class ChainError(FinInverseError, RuntimeError):
    """A Metropolis step failed; carries the iteration and a hash of the candidate."""

    def __init__(self, message: str, iteration: int, candidate_hash: str) -> None:
        super().__init__(f"{message} (iteration={iteration}, candidate={candidate_hash})")
        self.iteration = iteration
        self.candidate_hash = candidate_hash


class CheckpointError(FinInverseError, OSError):
    pass


class CheckpointVersionError(CheckpointError):
    pass


class CheckpointCorruptError(CheckpointError):
    pass


@dataclass
class ValidationErrorInfo:
    """Detailed information about a config validation error."""
    message: str
    path: str
    validator: str
    value: Any = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "message": self.message,
            "path": self.path,
            "validator": self.validator,
            "value": str(self.value) if self.value is not None else None,
        }


class ConfigValidationError(FinInverseError, ValueError):
    def __init__(self, errors: list[ValidationErrorInfo]) -> None:
        self.errors = errors
        super().__init__("; ".join(e.message for e in errors) or "invalid configuration")
