from __future__ import annotations
import json
from functools import lru_cache
from pathlib import Path
from typing import Any

_SCHEMA_PATH = Path(__file__).parent / "run_config_schema.json"


@lru_cache(maxsize=1)
def _load() -> dict[str, Any]:
    with _SCHEMA_PATH.open("r", encoding="utf-8") as fp:
        return json.load(fp)


def get_schema() -> dict[str, Any]:
    """Return the run-config JSON schema (a fresh copy)."""
    return json.loads(json.dumps(_load()))


def get_defaults() -> dict[str, Any]:
    return {key: spec.get("default") for key, spec in _load()["properties"].items()}


def get_properties() -> dict[str, dict[str, Any]]:
    return get_schema()["properties"]
