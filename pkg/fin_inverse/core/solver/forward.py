"""
Finite-difference solver for the steady fin equation

    u_xx + u_yy = 2H / (K delta) * u

with convective Robin edges K du/dn = -H u (+ g) and a prescribed inward flux
K du/dn = q on the CPU contact segment (bottom part of the left edge).

Rows are written as -u_xx - u_yy + (2H / (K delta)) u = s so that the matrix is
an M-matrix: positive diagonal, non-positive off-diagonals, strict diagonal
dominance from the reaction term. Edge rows eliminate a ghost node with the
central-difference form of the boundary condition.
"""

from __future__ import annotations
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.linalg.lapack import dgbsv

from ..errors import FieldError, SolverError
from ..grid.fields import (
    DEFAULT_KAPPA_MIN,
    BoundaryTrace,
    ConductivityField,
    TemperatureField,
)
from ..grid.mesh import MeshSpec
from ...infra.logging.logger import get_logger

_logger = get_logger("fin_inverse.solver")


@dataclass(frozen=True)
class PhysicalParams:
    h: float = 0.005
    delta: float = 0.1
    q: float = 100.0
    contact_fraction: float = 0.5

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise FieldError(f"convection coefficient H must be > 0, got {self.h}")
        if not self.delta > 0:
            raise FieldError(f"fin thickness delta must be > 0, got {self.delta}")
        if not self.q >= 0:
            raise FieldError(f"contact flux q must be >= 0, got {self.q}")
        if not 0 < self.contact_fraction <= 1:
            raise FieldError(f"contact_fraction must be in (0, 1], got {self.contact_fraction}")

    def with_flux(self, q: float) -> PhysicalParams:
        return PhysicalParams(self.h, self.delta, q, self.contact_fraction)

    def contact_mask(self, mesh: MeshSpec) -> np.ndarray:
        """(n, m) boolean mask of left-edge nodes with y <= contact_fraction * Ly."""
        mask = np.zeros(mesh.shape, dtype=bool)
        limit = self.contact_fraction * mesh.ly * (1 + 1e-12)
        mask[:, 0] = mesh.ys <= limit
        return mask


@dataclass(frozen=True)
class LinearSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    bandwidth: int

    @property
    def dimension(self) -> int:
        return self.rhs.size


class _Stencil:
    """Per-node coefficients of the discretization, split by their K dependence.

    diag = diag_static + diag_coef / K
    rhs  = source + (contact_coef + g * robin_coef) / K
    """

    def __init__(
        self,
        mesh: MeshSpec,
        phys: PhysicalParams,
        source: np.ndarray | None = None,
        boundary_data: np.ndarray | None = None,
    ) -> None:
        m, n = mesh.m, mesh.n
        ax, ay = 1.0 / mesh.dx**2, 1.0 / mesh.dy**2
        contact = phys.contact_mask(mesh)

        diag = np.full(mesh.shape, 2 * ax + 2 * ay)
        xp = np.full(mesh.shape, -ax)
        xm = np.full(mesh.shape, -ax)
        yp = np.full(mesh.shape, -ay)
        ym = np.full(mesh.shape, -ay)
        xp[:, 0], xm[:, 0] = -2 * ax, 0.0
        xm[:, -1], xp[:, -1] = -2 * ax, 0.0
        yp[0, :], ym[0, :] = -2 * ay, 0.0
        ym[-1, :], yp[-1, :] = -2 * ay, 0.0

        # Weight of boundary data g (and of H for the Robin diagonal) per node.
        robin = np.zeros(mesh.shape)
        robin[:, 0] += np.where(contact[:, 0], 0.0, 2.0 / mesh.dx)
        robin[:, -1] += 2.0 / mesh.dx
        robin[0, :] += 2.0 / mesh.dy
        robin[-1, :] += 2.0 / mesh.dy

        contact_coef = np.zeros(mesh.shape)
        contact_coef[contact] = 2.0 * phys.q / mesh.dx

        self.mesh = mesh
        self.diag_static = diag.ravel()
        self.xp, self.xm = xp.ravel(), xm.ravel()
        self.yp, self.ym = yp.ravel(), ym.ravel()
        self.diag_coef = (2.0 * phys.h / phys.delta + phys.h * robin).ravel()
        k_rhs = contact_coef
        if boundary_data is not None:
            k_rhs = k_rhs + np.asarray(boundary_data, dtype=float).reshape(mesh.shape) * robin
        self.rhs_coef = k_rhs.ravel()
        self.source = (
            np.zeros(mesh.size)
            if source is None
            else np.asarray(source, dtype=float).reshape(mesh.shape).ravel().copy()
        )

    @cached_property
    def band_template(self) -> np.ndarray:
        """K-independent part in LAPACK gbsv storage, kl = ku = m."""
        m, size = self.mesh.m, self.mesh.size
        ab = np.zeros((3 * m + 1, size), order="F")
        ab[2 * m, :] = self.diag_static
        ab[2 * m - 1, 1:] = self.xp[:-1]
        ab[2 * m + 1, :-1] = self.xm[1:]
        ab[m, m:] = self.yp[:-m]
        ab[3 * m, :-m] = self.ym[m:]
        return ab


def _check_conductivity(K: ConductivityField, mesh: MeshSpec, kappa_min: float) -> None:
    if K.mesh != mesh:
        raise FieldError(f"conductivity mesh {K.mesh} does not match solver mesh {mesh}")
    K.check_floor(kappa_min)


def assemble_system(
    K: ConductivityField,
    mesh: MeshSpec,
    phys: PhysicalParams,
    source: np.ndarray | None = None,
    boundary_data: np.ndarray | None = None,
    kappa_min: float = DEFAULT_KAPPA_MIN,
) -> LinearSystem:
    """Assemble the sparse system A u = b for conductivity K.

    Args:
        source: optional (n, m) volume source added to every row.
        boundary_data: optional (n, m) values g in K du/dn = -H u + g on convective edges.
    """
    _check_conductivity(K, mesh, kappa_min)
    st = _Stencil(mesh, phys, source, boundary_data)
    inv_k = 1.0 / K.values.ravel()
    m = mesh.m
    matrix = sp.diags(
        [st.diag_static + st.diag_coef * inv_k, st.xp[:-1], st.xm[1:], st.yp[:-m], st.ym[m:]],
        [0, 1, -1, m, -m],
        format="csr",
    )
    rhs = st.source + st.rhs_coef * inv_k
    return LinearSystem(matrix=matrix, rhs=rhs, bandwidth=m)


class ForwardSolver:
    """Banded direct solver with preallocated workspace; one instance per chain."""

    def __init__(
        self,
        mesh: MeshSpec,
        phys: PhysicalParams,
        source: np.ndarray | None = None,
        boundary_data: np.ndarray | None = None,
        kappa_min: float = DEFAULT_KAPPA_MIN,
    ) -> None:
        self.mesh = mesh
        self.phys = phys
        self.kappa_min = kappa_min
        self._stencil = _Stencil(mesh, phys, source, boundary_data)
        self._ab = np.empty_like(self._stencil.band_template, order="F")
        self._rhs = np.empty(mesh.size)
        self._inv_k = np.empty(mesh.size)
        self._scratch = np.empty(mesh.size)
        self._diag_row = 2 * mesh.m
        _logger.debug(
            f"forward solver ready: {mesh.size} unknowns, bandwidth {mesh.m}, "
            f"H={phys.h}, delta={phys.delta}, q={phys.q}"
        )

    def _solve_values(self, K: ConductivityField) -> np.ndarray:
        _check_conductivity(K, self.mesh, self.kappa_min)
        st = self._stencil
        np.divide(1.0, K.values.ravel(), out=self._inv_k)
        np.copyto(self._ab, st.band_template)
        np.multiply(st.diag_coef, self._inv_k, out=self._scratch)
        self._ab[self._diag_row] += self._scratch
        np.multiply(st.rhs_coef, self._inv_k, out=self._rhs)
        self._rhs += st.source
        m = self.mesh.m
        _, _, x, info = dgbsv(m, m, self._ab, self._rhs, overwrite_ab=1, overwrite_b=1)
        if info > 0:
            raise SolverError(f"singular system: zero pivot at row {info}")
        if info < 0:
            raise SolverError(f"dgbsv rejected argument {-info}")
        if not np.isfinite(x).all():
            raise SolverError("forward solve produced non-finite temperatures")
        return x

    def solve(self, K: ConductivityField) -> TemperatureField:
        return TemperatureField(self.mesh, self._solve_values(K).reshape(self.mesh.shape))

    def boundary(self, K: ConductivityField) -> BoundaryTrace:
        u = self._solve_values(K).reshape(self.mesh.shape)
        return BoundaryTrace(u[self.mesh.boundary_rows, self.mesh.boundary_cols])


def solve_forward(
    K: ConductivityField,
    mesh: MeshSpec,
    phys: PhysicalParams,
    source: np.ndarray | None = None,
    boundary_data: np.ndarray | None = None,
) -> TemperatureField:
    return ForwardSolver(mesh, phys, source, boundary_data).solve(K)


def boundary_of_solution(K: ConductivityField, mesh: MeshSpec, phys: PhysicalParams) -> BoundaryTrace:
    return ForwardSolver(mesh, phys).boundary(K)
