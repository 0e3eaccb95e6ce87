from __future__ import annotations
import hashlib
from dataclasses import dataclass

import numpy as np

from ..errors import FieldError
from .mesh import MeshSpec

DEFAULT_KAPPA_MIN = 1e-6


def _frozen(values: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.shape != shape:
        raise FieldError(f"expected shape {shape}, got {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class GridField:
    """Node-valued field on a mesh, stored as a read-only (n, m) array."""
    mesh: MeshSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen(self.values, self.mesh.shape))

    def at(self, i: int, j: int) -> float:
        """Value at 1-based node (i, j)."""
        return float(self.values[j - 1, i - 1])

    def min(self) -> float:
        return float(self.values.min())

    def digest(self) -> str:
        return hashlib.sha256(self.values.tobytes()).hexdigest()[:16]

    def same_values(self, other: GridField) -> bool:
        return self.mesh == other.mesh and np.array_equal(self.values, other.values)


class ConductivityField(GridField):
    """Conductivity K(i, j). Candidates may dip below the floor; see `check_floor`."""

    def check_floor(self, kappa_min: float = DEFAULT_KAPPA_MIN) -> None:
        if not np.isfinite(self.values).all():
            raise FieldError("conductivity contains non-finite entries")
        if self.min() <= kappa_min:
            raise FieldError(f"conductivity must exceed kappa_min={kappa_min}, min is {self.min()}")

    def shifted(self, offset: float) -> ConductivityField:
        return ConductivityField(self.mesh, self.values + offset)


class TemperatureField(GridField):
    def __post_init__(self) -> None:
        super().__post_init__()
        if not np.isfinite(self.values).all():
            raise FieldError("temperature field contains non-finite entries")


@dataclass(frozen=True, eq=False)
class BoundaryTrace:
    """Boundary temperatures in the mesh's canonical counterclockwise order."""
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64, copy=True).ravel()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


def constant_field(mesh: MeshSpec, c: float, kappa_min: float = DEFAULT_KAPPA_MIN) -> ConductivityField:
    if not np.isfinite(c) or c <= kappa_min:
        raise FieldError(f"constant conductivity must exceed kappa_min={kappa_min}, got {c}")
    return ConductivityField(mesh, np.full(mesh.shape, float(c)))


def extract_boundary(u: GridField) -> BoundaryTrace:
    mesh = u.mesh
    return BoundaryTrace(u.values[mesh.boundary_rows, mesh.boundary_cols])
