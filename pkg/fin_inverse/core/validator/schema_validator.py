from __future__ import annotations
from typing import Any

from jsonschema import Draft202012Validator, ValidationError

from ...infra.schemas.schema_manager import get_schema
from ..errors import ValidationErrorInfo


def _message(error: ValidationError, key: str) -> str:
    """Name the key and the violated bound where the schema has one."""
    bound = error.validator_value
    if error.validator == "minimum":
        return f"{key} must be >= {bound}, got {error.instance!r}"
    if error.validator == "exclusiveMinimum":
        return f"{key} must be > {bound}, got {error.instance!r}"
    if error.validator == "maximum":
        return f"{key} must be <= {bound}, got {error.instance!r}"
    if error.validator == "enum":
        return f"{key} must be one of {bound}, got {error.instance!r}"
    if error.validator == "type":
        return f"{key} must be of type {bound}, got {error.instance!r}"
    if error.validator == "additionalProperties":
        return f"unknown configuration key: {error.message}"
    return f"{key}: {error.message}"


def validate_config(
    config: dict[str, Any], schema: dict[str, Any] | None = None
) -> list[ValidationErrorInfo]:
    """Validate a flat run configuration against the run-config schema.

    Returns list of detailed errors (path, message, validator).
    """
    if schema is None:
        schema = get_schema()

    validator = Draft202012Validator(schema)
    errors: list[ValidationErrorInfo] = []

    for error in sorted(validator.iter_errors(config), key=lambda e: list(e.path)):
        path = ".".join(str(x) for x in error.path) if error.path else "root"
        errors.append(
            ValidationErrorInfo(
                message=_message(error, path),
                path=path,
                validator=str(error.validator),
                value=error.instance,
            )
        )

    return errors


def validate_config_simple(config: dict[str, Any]) -> list[str]:
    """Simplified version: returns only error messages."""
    return [e.message for e in validate_config(config)]
