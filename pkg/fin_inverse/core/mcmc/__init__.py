from .checkpoint import checkpoint_load, checkpoint_save
from .engine import (
    TRACE_COLUMNS,
    ChainResult,
    ChainState,
    McmcConfig,
    evaluate_candidate,
    mh_step,
    run_chain,
    run_chains,
)

__all__ = [
    "TRACE_COLUMNS",
    "ChainResult",
    "ChainState",
    "McmcConfig",
    "checkpoint_load",
    "checkpoint_save",
    "evaluate_candidate",
    "mh_step",
    "run_chain",
    "run_chains",
]
