from .fields import (
    DEFAULT_KAPPA_MIN,
    BoundaryTrace,
    ConductivityField,
    GridField,
    TemperatureField,
    constant_field,
    extract_boundary,
)
from .io import read_field_csv, read_trace_csv, write_field_csv, write_trace_csv
from .mesh import MeshSpec, make_mesh

__all__ = [
    "DEFAULT_KAPPA_MIN",
    "BoundaryTrace",
    "ConductivityField",
    "GridField",
    "MeshSpec",
    "TemperatureField",
    "constant_field",
    "extract_boundary",
    "make_mesh",
    "read_field_csv",
    "read_trace_csv",
    "write_field_csv",
    "write_trace_csv",
]
