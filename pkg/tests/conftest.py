"""
Pytest fixtures for the test suite
"""

import itertools
import os
import tempfile
from pathlib import Path

# Before any fin_inverse import: keeps the rotating app log out of the real home.
os.environ.setdefault("FIN_INVERSE_HOME", tempfile.mkdtemp(prefix="fin_inverse_home_"))

import pytest  # noqa: E402

from fin_inverse.core.grid.mesh import make_mesh  # noqa: E402
from fin_inverse.core.errors import SolverError  # noqa: E402
from fin_inverse.core.solver.forward import ForwardSolver, PhysicalParams  # noqa: E402


@pytest.fixture
def temp_dir():
    """Temporary directory for run outputs"""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def mesh10():
    return make_mesh(10, 10)


@pytest.fixture
def mesh5():
    return make_mesh(5, 5)


@pytest.fixture
def phys():
    return PhysicalParams()


@pytest.fixture
def fail_solve_at(monkeypatch):
    """Arm ForwardSolver.boundary to raise SolverError on its n-th call from now on."""

    def arm(call: int) -> None:
        original = ForwardSolver.boundary
        calls = itertools.count(1)

        def boundary(self, K):
            if next(calls) == call:
                raise SolverError("banded factorization returned non-finite temperatures")
            return original(self, K)

        monkeypatch.setattr(ForwardSolver, "boundary", boundary)

    return arm
