from .schema_validator import validate_config, validate_config_simple

__all__ = ["validate_config", "validate_config_simple"]
