from .forward import (
    ForwardSolver,
    LinearSystem,
    PhysicalParams,
    assemble_system,
    boundary_of_solution,
    solve_forward,
)

__all__ = [
    "ForwardSolver",
    "LinearSystem",
    "PhysicalParams",
    "assemble_system",
    "boundary_of_solution",
    "solve_forward",
]
