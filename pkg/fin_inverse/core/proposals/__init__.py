from .kernels import (
    ProposalConfig,
    ProposalKind,
    ProposalMove,
    apply_move,
    draw_move,
    propose,
    propose_gridwise,
    propose_pointwise,
    propose_uniform,
)
from .rng import RngStream, derive_seed

__all__ = [
    "ProposalConfig",
    "ProposalKind",
    "ProposalMove",
    "RngStream",
    "apply_move",
    "derive_seed",
    "draw_move",
    "propose",
    "propose_gridwise",
    "propose_pointwise",
    "propose_uniform",
]
