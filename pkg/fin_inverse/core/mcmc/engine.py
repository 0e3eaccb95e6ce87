"""
Metropolis-Hastings chain over conductivity fields.

One forward solve per iteration, on the candidate only; the current state's
misfit f_n and smoothness T_n are cached in the ChainState and replaced by the
candidate's values on acceptance.
"""

from __future__ import annotations
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import ChainError, FieldError, SolverError
from ..grid.fields import BoundaryTrace, ConductivityField, constant_field
from ..grid.mesh import MeshSpec
from ..priors.functionals import (
    PriorEvaluation,
    PriorWeights,
    SlopeTerms,
    acceptance_probability,
    data_misfit,
    slope_terms,
    smoothness_term,
)
from ..proposals.kernels import ProposalConfig, propose
from ..proposals.rng import RngStream, derive_seed
from ..solver.forward import ForwardSolver, PhysicalParams
from ...infra.logging.logger import get_logger

_logger = get_logger("fin_inverse.mcmc")

TRACE_COLUMNS = ["iter", "f", "best_f", "acceptance_rate"]


@dataclass(frozen=True)
class McmcConfig:
    iterations: int = 100_000
    weights: PriorWeights = PriorWeights()
    proposal: ProposalConfig = ProposalConfig()
    thin: int | None = None
    snapshot_count: int = 10
    seed: int = 0
    log_every: int = 10_000
    checkpoint_every: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise FieldError(f"iterations must be >= 1, got {self.iterations}")
        if self.thin is not None and self.thin < 1:
            raise FieldError(f"thin must be >= 1, got {self.thin}")
        if self.snapshot_count < 0:
            raise FieldError(f"snapshot_count must be >= 0, got {self.snapshot_count}")

    @property
    def effective_thin(self) -> int:
        return self.thin if self.thin is not None else max(1, self.iterations // 1000)

    def snapshot_iterations(self) -> set[int]:
        count = min(self.snapshot_count, self.iterations)
        if count == 0:
            return set()
        return {round(self.iterations * (s + 1) / count) for s in range(count)}

    def with_iterations(self, iterations: int) -> McmcConfig:
        return McmcConfig(
            iterations, self.weights, self.proposal, self.thin,
            self.snapshot_count, self.seed, self.log_every, self.checkpoint_every,
        )

    def with_seed(self, seed: int) -> McmcConfig:
        return McmcConfig(
            self.iterations, self.weights, self.proposal, self.thin,
            self.snapshot_count, seed, self.log_every, self.checkpoint_every,
        )


@dataclass(eq=False)
class ChainState:
    k: ConductivityField
    f: float
    t: float
    rng: RngStream
    iteration: int = 0
    accepted: int = 0
    floor_rejected: int = 0
    degenerate: int = 0
    best_f: float = float("inf")
    update_counts: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.update_counts is None:
            self.update_counts = np.zeros(self.k.mesh.shape, dtype=np.int64)
        self.best_f = min(self.best_f, self.f)

    @classmethod
    def start(
        cls, k0: ConductivityField, data: BoundaryTrace, solver: ForwardSolver, cfg: McmcConfig
    ) -> ChainState:
        k0.check_floor(cfg.proposal.kappa_min)
        f0 = data_misfit(data, solver.boundary(k0), cfg.weights.sigma)
        return cls(k=k0, f=f0, t=smoothness_term(k0), rng=RngStream(cfg.seed))

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.iteration if self.iteration else 0.0

    def same_as(self, other: ChainState) -> bool:
        return (
            self.k.same_values(other.k)
            and (self.f, self.t, self.best_f) == (other.f, other.t, other.best_f)
            and (self.iteration, self.accepted, self.floor_rejected, self.degenerate)
            == (other.iteration, other.accepted, other.floor_rejected, other.degenerate)
            and np.array_equal(self.update_counts, other.update_counts)
            and self.rng == other.rng
        )


@dataclass(eq=False)
class ChainResult:
    final_k: ConductivityField
    trace: pd.DataFrame
    snapshots: dict[int, ConductivityField]
    update_counts: np.ndarray
    config: McmcConfig
    state: ChainState
    wall_time: float

    @property
    def acceptance_rate(self) -> float:
        return self.state.acceptance_rate


def evaluate_candidate(
    candidate: ConductivityField, data: BoundaryTrace, solver: ForwardSolver, weights: PriorWeights
) -> tuple[PriorEvaluation, int]:
    """Misfit and prior terms of a candidate, plus its degenerate slope-ratio count."""
    f_c = data_misfit(data, solver.boundary(candidate), weights.sigma)
    slopes = slope_terms(candidate, weights.epsilon0) if weights.uses_slope else SlopeTerms(0.0, 0.0)
    return PriorEvaluation(f=f_c, t=smoothness_term(candidate), px=slopes.px, py=slopes.py), slopes.degenerate


def mh_step(
    state: ChainState,
    data: BoundaryTrace,
    mesh: MeshSpec,
    phys: PhysicalParams,
    cfg: McmcConfig,
    solver: ForwardSolver | None = None,
) -> ChainState:
    """Advance the chain by one accept/reject decision (in place)."""
    if solver is None:
        solver = ForwardSolver(mesh, phys, kappa_min=cfg.proposal.kappa_min)
    move, candidate = propose(state.k, cfg.proposal, state.rng)
    if candidate.min() <= cfg.proposal.kappa_min:
        state.floor_rejected += 1
        state.iteration += 1
        return state
    try:
        ev, degenerate = evaluate_candidate(candidate, data, solver, cfg.weights)
    except (SolverError, FieldError) as e:
        raise ChainError(str(e), state.iteration + 1, candidate.digest()) from e
    state.degenerate += degenerate
    alpha = acceptance_probability(state.f, ev.f, state.t, ev.t, ev.px, ev.py, cfg.weights)
    if state.rng.uniform() < alpha:
        state.k, state.f, state.t = candidate, ev.f, ev.t
        state.accepted += 1
        state.update_counts[move.touched(mesh)] += 1
        state.best_f = min(state.best_f, ev.f)
    state.iteration += 1
    return state


def run_chain(
    data: BoundaryTrace,
    mesh: MeshSpec,
    phys: PhysicalParams,
    cfg: McmcConfig,
    k0: ConductivityField | None = None,
    state: ChainState | None = None,
    checkpoint_path: Path | None = None,
) -> ChainResult:
    """Run the chain up to cfg.iterations, starting from k0 or resuming `state`.

    A checkpoint is written at the end, every cfg.checkpoint_every steps, and
    on failure (before re-raising) when checkpoint_path is given. The failure
    checkpoint holds the last completed iteration; its stream is already past
    the failed proposal, so a resume draws a fresh candidate.
    """
    from .checkpoint import checkpoint_save

    solver = ForwardSolver(mesh, phys, kappa_min=cfg.proposal.kappa_min)
    if state is None:
        state = ChainState.start(k0 if k0 is not None else constant_field(mesh, 1.0), data, solver, cfg)
    thin = cfg.effective_thin
    snap_at = cfg.snapshot_iterations()
    rows: list[tuple[int, float, float, float]] = []
    snapshots: dict[int, ConductivityField] = {}
    if state.iteration == 0:
        rows.append((0, state.f, state.best_f, 0.0))
    _logger.info(
        f"chain start: iter={state.iteration}/{cfg.iterations} kernel={cfg.proposal.kernel.value} "
        f"f={state.f:.6g}"
    )
    started = time.perf_counter()
    try:
        while state.iteration < cfg.iterations:
            mh_step(state, data, mesh, phys, cfg, solver)
            it = state.iteration
            if it % thin == 0 or it == cfg.iterations:
                rows.append((it, state.f, state.best_f, state.acceptance_rate))
            if it in snap_at:
                snapshots[it] = state.k
            if cfg.log_every and it % cfg.log_every == 0:
                _logger.info(
                    f"iter={it} f={state.f:.6g} best_f={state.best_f:.6g} "
                    f"acceptance={state.acceptance_rate:.4f} floor_rejects={state.floor_rejected}"
                )
            if checkpoint_path is not None and cfg.checkpoint_every and it % cfg.checkpoint_every == 0:
                checkpoint_save(state, checkpoint_path)
    except Exception:
        if checkpoint_path is not None:
            checkpoint_save(state, checkpoint_path)
            _logger.error(f"chain failed at iteration {state.iteration}; partial checkpoint at {checkpoint_path}")
        raise
    if checkpoint_path is not None:
        checkpoint_save(state, checkpoint_path)
    wall = time.perf_counter() - started
    _logger.info(f"chain done: f={state.f:.6g} acceptance={state.acceptance_rate:.4f} in {wall:.1f}s")
    return ChainResult(
        final_k=state.k,
        trace=pd.DataFrame(rows, columns=TRACE_COLUMNS),
        snapshots=snapshots,
        update_counts=state.update_counts.copy(),
        config=cfg,
        state=state,
        wall_time=wall,
    )


def _run_indexed(args: tuple) -> ChainResult:
    data, mesh, phys, cfg, k0 = args
    return run_chain(data, mesh, phys, cfg, k0)


def run_chains(
    data: BoundaryTrace,
    mesh: MeshSpec,
    phys: PhysicalParams,
    cfg: McmcConfig,
    count: int,
    jobs: int = 1,
    k0: ConductivityField | None = None,
) -> list[ChainResult]:
    """Run `count` independent chains seeded by derive_seed(cfg.seed, index).

    Results are returned in index order whatever the scheduling.
    """
    if count < 1:
        raise FieldError(f"count must be >= 1, got {count}")
    tasks = [(data, mesh, phys, cfg.with_seed(derive_seed(cfg.seed, idx)), k0) for idx in range(count)]
    if jobs <= 1:
        return [_run_indexed(t) for t in tasks]
    with Pool(processes=min(jobs, count)) as pool:
        return pool.map(_run_indexed, tasks)
