"""
Symmetric proposal kernels: shift K by one omega ~ U(-bound, bound)

- uniform:   every node
- pointwise: one node chosen uniformly
- gridwise:  the four corners of one mesh cell chosen uniformly

The reverse of a move is the same site with -omega, drawn with the same
probability, so no Hastings correction is needed.
"""

from __future__ import annotations
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import FieldError
from ..grid.fields import DEFAULT_KAPPA_MIN, ConductivityField
from ..grid.mesh import MeshSpec
from .rng import RngStream


class ProposalKind(Enum):
    UNIFORM = "uniform"
    POINTWISE = "pointwise"
    GRIDWISE = "gridwise"


@dataclass(frozen=True)
class ProposalConfig:
    omega_bound: float = 0.005
    kernel: ProposalKind = ProposalKind.UNIFORM
    kappa_min: float = DEFAULT_KAPPA_MIN

    def __post_init__(self) -> None:
        if not self.omega_bound >= 0:
            raise FieldError(f"omega_bound must be >= 0, got {self.omega_bound}")
        if not self.kappa_min > 0:
            raise FieldError(f"kappa_min must be > 0, got {self.kappa_min}")
        if not isinstance(self.kernel, ProposalKind):
            object.__setattr__(self, "kernel", ProposalKind(self.kernel))


@dataclass(frozen=True)
class ProposalMove:
    kind: ProposalKind
    omega: float
    # 1-based node (pointwise) or lower-left corner of the cell (gridwise)
    site: tuple[int, int] | None = None

    def reverse(self) -> ProposalMove:
        return ProposalMove(self.kind, -self.omega, self.site)

    def selection_probability(self, mesh: MeshSpec) -> float:
        """Probability of choosing this move's site."""
        if self.kind is ProposalKind.POINTWISE:
            return 1.0 / mesh.size
        if self.kind is ProposalKind.GRIDWISE:
            return 1.0 / ((mesh.m - 1) * (mesh.n - 1))
        return 1.0

    def touched(self, mesh: MeshSpec) -> np.ndarray:
        """(n, m) mask of the nodes the move changes."""
        mask = np.zeros(mesh.shape, dtype=bool)
        if self.kind is ProposalKind.UNIFORM:
            mask[:] = True
        elif self.kind is ProposalKind.POINTWISE:
            i, j = self.site  # type: ignore[misc]
            mask[j - 1, i - 1] = True
        else:
            i, j = self.site  # type: ignore[misc]
            mask[j - 1 : j + 1, i - 1 : i + 1] = True
        return mask


def draw_move(mesh: MeshSpec, cfg: ProposalConfig, rng: RngStream) -> ProposalMove:
    """Draw a site (if any), then omega."""
    bound = cfg.omega_bound
    if cfg.kernel is ProposalKind.UNIFORM:
        return ProposalMove(cfg.kernel, rng.uniform(-bound, bound))
    if cfg.kernel is ProposalKind.POINTWISE:
        k = rng.integers(mesh.size)
        site = (k % mesh.m + 1, k // mesh.m + 1)
    else:
        cells_x = mesh.m - 1
        c = rng.integers(cells_x * (mesh.n - 1))
        site = (c % cells_x + 1, c // cells_x + 1)
    return ProposalMove(cfg.kernel, rng.uniform(-bound, bound), site)


def apply_move(K: ConductivityField, move: ProposalMove) -> ConductivityField:
    values = K.values.copy()
    if move.kind is ProposalKind.UNIFORM:
        values += move.omega
    elif move.kind is ProposalKind.POINTWISE:
        i, j = move.site  # type: ignore[misc]
        values[j - 1, i - 1] += move.omega
    else:
        i, j = move.site  # type: ignore[misc]
        values[j - 1 : j + 1, i - 1 : i + 1] += move.omega
    return ConductivityField(K.mesh, values)


def propose(
    K: ConductivityField, cfg: ProposalConfig, rng: RngStream
) -> tuple[ProposalMove, ConductivityField]:
    move = draw_move(K.mesh, cfg, rng)
    return move, apply_move(K, move)


def _with_kind(cfg: ProposalConfig, kind: ProposalKind) -> ProposalConfig:
    return ProposalConfig(cfg.omega_bound, kind, cfg.kappa_min)


def propose_uniform(K: ConductivityField, cfg: ProposalConfig, rng: RngStream) -> ConductivityField:
    return propose(K, _with_kind(cfg, ProposalKind.UNIFORM), rng)[1]


def propose_pointwise(K: ConductivityField, cfg: ProposalConfig, rng: RngStream) -> ConductivityField:
    return propose(K, _with_kind(cfg, ProposalKind.POINTWISE), rng)[1]


def propose_gridwise(K: ConductivityField, cfg: ProposalConfig, rng: RngStream) -> ConductivityField:
    return propose(K, _with_kind(cfg, ProposalKind.GRIDWISE), rng)[1]
