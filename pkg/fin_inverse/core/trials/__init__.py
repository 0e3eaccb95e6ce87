from .problems import (
    ErrorStats,
    GaussianWell,
    TrialKind,
    TrialSpec,
    gaussian_well,
    reconstruction_error,
    synthesize_data,
    tilted_plane,
)

__all__ = [
    "ErrorStats",
    "GaussianWell",
    "TrialKind",
    "TrialSpec",
    "gaussian_well",
    "reconstruction_error",
    "synthesize_data",
    "tilted_plane",
]
