"""
Mesh geometry for the rectangular fin.

Index convention: i runs along x (1..m), j along y (1..n). Arrays are stored
with shape (n, m) so that values[j - 1, i - 1] is the value at node (i, j) and
the flattened node index is k = (j - 1) * m + (i - 1).

The last coordinate is pinned: x(m) == lx exactly. Gaps x(i + 1) - x(i) equal
dx only up to rounding, the final one included.
"""

from __future__ import annotations
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import MeshError

MIN_NODES = 4


@dataclass(frozen=True)
class MeshSpec:
    m: int
    n: int
    lx: float
    ly: float

    @property
    def dx(self) -> float:
        return self.lx / (self.m - 1)

    @property
    def dy(self) -> float:
        return self.ly / (self.n - 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.m)

    @property
    def size(self) -> int:
        return self.m * self.n

    @property
    def boundary_size(self) -> int:
        return 2 * (self.m + self.n) - 4

    def x(self, i: int) -> float:
        """x coordinate of 1-based column i."""
        return self.lx if i == self.m else (i - 1) * self.dx

    def y(self, j: int) -> float:
        """y coordinate of 1-based row j."""
        return self.ly if j == self.n else (j - 1) * self.dy

    @cached_property
    def xs(self) -> np.ndarray:
        xs = np.arange(self.m, dtype=float) * self.dx
        xs[-1] = self.lx
        return xs

    @cached_property
    def ys(self) -> np.ndarray:
        ys = np.arange(self.n, dtype=float) * self.dy
        ys[-1] = self.ly
        return ys

    def node_index(self, i: int, j: int) -> int:
        """Zero-based linear index of 1-based node (i, j)."""
        return (j - 1) * self.m + (i - 1)

    @cached_property
    def boundary_nodes(self) -> tuple[tuple[int, int], ...]:
        """1-based (i, j) of the boundary, counterclockwise from the origin.

        Bottom row left to right, right column upward, top row right to left,
        left column downward; every corner appears once.
        """
        m, n = self.m, self.n
        nodes = [(i, 1) for i in range(1, m + 1)]
        nodes += [(m, j) for j in range(2, n + 1)]
        nodes += [(i, n) for i in range(m - 1, 0, -1)]
        nodes += [(1, j) for j in range(n - 1, 1, -1)]
        return tuple(nodes)

    @cached_property
    def boundary_rows(self) -> np.ndarray:
        return np.array([j - 1 for _, j in self.boundary_nodes], dtype=np.intp)

    @cached_property
    def boundary_cols(self) -> np.ndarray:
        return np.array([i - 1 for i, _ in self.boundary_nodes], dtype=np.intp)


def make_mesh(m: int, n: int, lx: float = 4.0, ly: float = 4.0) -> MeshSpec:
    if int(m) != m or int(n) != n:
        raise MeshError(f"node counts must be integers, got m={m}, n={n}")
    if m < MIN_NODES or n < MIN_NODES:
        raise MeshError(f"mesh needs at least {MIN_NODES} nodes per direction, got m={m}, n={n}")
    if not (lx > 0 and ly > 0) or not np.isfinite([lx, ly]).all():
        raise MeshError(f"fin dimensions must be positive, got lx={lx}, ly={ly}")
    return MeshSpec(m=int(m), n=int(n), lx=float(lx), ly=float(ly))
