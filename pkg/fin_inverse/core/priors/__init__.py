from .functionals import (
    PriorEvaluation,
    PriorWeights,
    SlopeTerms,
    acceptance_probability,
    data_misfit,
    log_acceptance,
    slope_terms,
    smoothness_term,
)

__all__ = [
    "PriorEvaluation",
    "PriorWeights",
    "SlopeTerms",
    "acceptance_probability",
    "data_misfit",
    "log_acceptance",
    "slope_terms",
    "smoothness_term",
]
