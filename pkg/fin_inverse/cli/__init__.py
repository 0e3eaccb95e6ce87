from .config import RunConfig, config_from_mapping, parse_config
from .runner import RunManifest, generate, resume_experiment, run_experiment, sweep

__all__ = [
    "RunConfig",
    "RunManifest",
    "config_from_mapping",
    "generate",
    "parse_config",
    "resume_experiment",
    "run_experiment",
    "sweep",
]
