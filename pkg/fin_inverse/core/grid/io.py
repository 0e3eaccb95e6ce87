"""
CSV formats for fields and boundary traces.

Field: header line "m,n,Lx,Ly", then n lines of m values for j = 1..n.
Trace: one column under a header naming the canonical order.
Floats are written with repr(), the shortest string that round-trips.
"""

from __future__ import annotations
from pathlib import Path
from typing import TypeVar

import numpy as np

from ..errors import FieldError
from .fields import BoundaryTrace, ConductivityField, GridField
from .mesh import make_mesh

TRACE_HEADER = "boundary_ccw_from_origin"

F = TypeVar("F", bound=GridField)


def _fmt(value: float) -> str:
    return repr(float(value))


def write_field_csv(path: Path, field: GridField) -> None:
    mesh = field.mesh
    lines = [f"{mesh.m},{mesh.n},{_fmt(mesh.lx)},{_fmt(mesh.ly)}"]
    lines += [",".join(_fmt(v) for v in row) for row in field.values]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_field_csv(path: Path, kind: type[F] = ConductivityField) -> F:  # type: ignore[assignment]
    rows = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if not rows:
        raise FieldError(f"{path}: empty field file")
    try:
        m_s, n_s, lx_s, ly_s = rows[0].split(",")
        mesh = make_mesh(int(m_s), int(n_s), float(lx_s), float(ly_s))
        values = np.array([[float(v) for v in row.split(",")] for row in rows[1:]])
    except ValueError as e:
        raise FieldError(f"{path}: malformed field file: {e}") from e
    return kind(mesh, values)


def write_trace_csv(path: Path, trace: BoundaryTrace) -> None:
    lines = [TRACE_HEADER] + [_fmt(v) for v in trace.values]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trace_csv(path: Path) -> BoundaryTrace:
    rows = [line.strip() for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if not rows or rows[0] != TRACE_HEADER:
        raise FieldError(f"{path}: expected header {TRACE_HEADER!r}")
    try:
        return BoundaryTrace(np.array([float(v) for v in rows[1:]]))
    except ValueError as e:
        raise FieldError(f"{path}: malformed trace file: {e}") from e
