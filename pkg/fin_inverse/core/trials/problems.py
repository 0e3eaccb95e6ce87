from __future__ import annotations
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import FieldError
from ..grid.fields import BoundaryTrace, ConductivityField, constant_field
from ..grid.mesh import MeshSpec
from ..proposals.rng import RngStream
from ..solver.forward import PhysicalParams, boundary_of_solution


class TrialKind(Enum):
    CONSTANT = "constant"
    TILTED_PLANE = "tilted_plane"
    GAUSSIAN_WELL = "gaussian_well"


@dataclass(frozen=True)
class GaussianWell:
    amplitude: float = 2.0
    suppression: float = 50.0
    center: tuple[float, float] = (2.0, 2.0)
    width: float = 0.2


@dataclass(frozen=True)
class TrialSpec:
    kind: TrialKind
    mesh: MeshSpec
    value: float = 1.68
    divisor: float = 20.0
    well: GaussianWell = GaussianWell()
    noise_std: float = 0.0

    def __post_init__(self) -> None:
        if not self.noise_std >= 0:
            raise FieldError(f"noise_std must be >= 0, got {self.noise_std}")
        if not isinstance(self.kind, TrialKind):
            object.__setattr__(self, "kind", TrialKind(self.kind))

    def field(self) -> ConductivityField:
        if self.kind is TrialKind.CONSTANT:
            return constant_field(self.mesh, self.value)
        if self.kind is TrialKind.TILTED_PLANE:
            return tilted_plane(self.mesh, self.divisor)
        return gaussian_well(self.mesh, self.well)


def tilted_plane(mesh: MeshSpec, divisor: float) -> ConductivityField:
    """K(i, j) = (i + j) / divisor + 1 with 1-based indices."""
    if not divisor > 0:
        raise FieldError(f"divisor must be > 0, got {divisor}")
    i = np.arange(1, mesh.m + 1)
    j = np.arange(1, mesh.n + 1)
    return ConductivityField(mesh, (i[None, :] + j[:, None]) / divisor + 1.0)


def gaussian_well(mesh: MeshSpec, well: GaussianWell = GaussianWell()) -> ConductivityField:
    """K = A / (1 + s * exp(-((x - cx)^2 + (y - cy)^2) / width)), evaluated per node."""
    cx, cy = well.center
    r2 = (mesh.xs[None, :] - cx) ** 2 + (mesh.ys[:, None] - cy) ** 2
    return ConductivityField(mesh, well.amplitude / (1.0 + well.suppression * np.exp(-r2 / well.width)))


def synthesize_data(
    k_correct: ConductivityField,
    mesh: MeshSpec,
    phys: PhysicalParams,
    noise_std: float = 0.0,
    rng: RngStream | None = None,
) -> BoundaryTrace:
    """Boundary trace of the forward solution plus optional Gaussian noise."""
    if not noise_std >= 0:
        raise FieldError(f"noise_std must be >= 0, got {noise_std}")
    clean = boundary_of_solution(k_correct, mesh, phys)
    if noise_std == 0:
        return clean
    if rng is None:
        raise FieldError("noisy data needs a random stream")
    return BoundaryTrace(clean.values + rng.normal(noise_std, len(clean)))


@dataclass(frozen=True)
class ErrorStats:
    mean_abs: float
    rms: float
    max_abs: float

    def to_dict(self) -> dict[str, float]:
        return {"mean_abs": self.mean_abs, "rms": self.rms, "max_abs": self.max_abs}


def reconstruction_error(k_hat: ConductivityField, k_correct: ConductivityField) -> ErrorStats:
    if k_hat.mesh != k_correct.mesh:
        raise FieldError("reconstruction and reference live on different meshes")
    err = np.abs(k_hat.values - k_correct.values)
    return ErrorStats(
        mean_abs=float(err.mean()),
        rms=float(np.sqrt(np.mean(err * err))),
        max_abs=float(err.max()),
    )
