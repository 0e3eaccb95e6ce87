"""
Experiment orchestration: synthesize data, run the chain, write outputs and
a manifest that is enough to reproduce the run.
"""

from __future__ import annotations
import hashlib
import itertools
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np
import pandas as pd
import yaml
from sqlalchemy import select

from .. import __version__
from ..core.errors import (
    CheckpointError,
    ConfigValidationError,
    FieldError,
    MeshError,
    ValidationErrorInfo,
)
from ..core.grid.fields import BoundaryTrace, ConductivityField, constant_field
from ..core.grid.io import read_field_csv, read_trace_csv, write_field_csv, write_trace_csv
from ..core.mcmc.checkpoint import checkpoint_load
from ..core.mcmc.engine import TRACE_COLUMNS, ChainResult, run_chain
from ..core.proposals.rng import RngStream, derive_seed
from ..core.trials.problems import reconstruction_error, synthesize_data
from ..infra.db.models import RunRecord
from ..infra.db.session import open_registry
from ..infra.logging.logger import attach_run_log, detach_run_log, get_logger
from .config import RunConfig, config_from_mapping

_logger = get_logger("fin_inverse.cli")

# Index of the data-noise stream; chain streams use derive_seed(seed, chain index).
DATA_STREAM = 0xDA7A
MANIFEST = "manifest.yaml"
CHECKPOINT = "checkpoint.frck"
ERROR_RECORD = "error.json"

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, (ConfigValidationError, MeshError, FieldError)):
        return EXIT_VALIDATION
    if isinstance(error, (CheckpointError, OSError)):
        return EXIT_IO
    return EXIT_RUNTIME


def calculate_checksum(file_path: Path) -> str:
    """SHA256 of a file."""
    sha256 = hashlib.sha256()
    with open(file_path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            sha256.update(chunk)
    return sha256.hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunManifest:
    config: dict[str, Any]
    seed: int
    started: str
    version: str = __version__
    finished: str | None = None
    status: str = "running"
    partial: bool = True
    error_stats: dict[str, float] | None = None
    acceptance: dict[str, Any] | None = None
    final_f: float | None = None
    wall_time: float | None = None
    resumed_from: int | None = None
    physics: dict[str, float] | None = None
    error: dict[str, Any] | None = None
    files: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def save(self, out: Path) -> Path:
        path = out / MANIFEST
        with path.open("w", encoding="utf-8") as fp:
            yaml.safe_dump(self.to_dict(), fp, sort_keys=False)
        return path

    @classmethod
    def load(cls, out: Path) -> RunManifest:
        with (out / MANIFEST).open("r", encoding="utf-8") as fp:
            return cls(**yaml.safe_load(fp))


def _inventory(out: Path) -> dict[str, str]:
    skip = {MANIFEST, ERROR_RECORD}
    return {
        str(p.relative_to(out)): calculate_checksum(p)
        for p in sorted(out.rglob("*"))
        if p.is_file() and p.name not in skip and not p.name.endswith(".tmp")
    }


def write_error_record(out: Path, error: BaseException) -> dict[str, Any]:
    """Write error.json into `out` (best effort) and return the record."""
    record: dict[str, Any] = {
        "type": type(error).__name__,
        "message": str(error),
        "exit_code": exit_code_for(error),
    }
    for attr in ("iteration", "candidate_hash"):
        if hasattr(error, attr):
            record[attr] = getattr(error, attr)
    if isinstance(error, ConfigValidationError):
        record["errors"] = [e.to_dict() for e in error.errors]
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / ERROR_RECORD).write_text(json.dumps(record, indent=2), encoding="utf-8")
    except OSError:
        pass
    return record


def synthesize(cfg: RunConfig) -> tuple[ConductivityField, BoundaryTrace]:
    trial = cfg.trial()
    k_correct = trial.field()
    rng = RngStream(derive_seed(cfg.seed, DATA_STREAM))
    data = synthesize_data(k_correct, trial.mesh, cfg.physics(), trial.noise_std, rng)
    return k_correct, data


def generate(cfg: RunConfig, out: Path | None = None) -> dict[str, str]:
    """Write the trial field and its boundary data only."""
    out = out or cfg.out
    out.mkdir(parents=True, exist_ok=True)
    k_correct, data = synthesize(cfg)
    write_field_csv(out / "K_correct.csv", k_correct)
    write_trace_csv(out / "boundary_data.csv", data)
    return {name: calculate_checksum(out / name) for name in ("K_correct.csv", "boundary_data.csv")}


def _write_results(out: Path, result: ChainResult, trace: pd.DataFrame) -> None:
    write_field_csv(out / "K_final.csv", result.final_k)
    trace.to_csv(out / "trace.csv", index=False, columns=TRACE_COLUMNS)
    snap_dir = out / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    for it, k in sorted(result.snapshots.items()):
        write_field_csv(snap_dir / f"K_iter_{it}.csv", k)
    _prune_snapshots(snap_dir, result.config.snapshot_iterations())
    np.savetxt(out / "update_counts.csv", result.update_counts, fmt="%d", delimiter=",")


def _prune_snapshots(snap_dir: Path, schedule: set[int]) -> list[Path]:
    """Remove snapshot files whose iteration is not in the current schedule."""
    removed = []
    for path in snap_dir.glob("K_iter_*.csv"):
        suffix = path.stem.removeprefix("K_iter_")
        if not suffix.isdigit() or int(suffix) not in schedule:
            path.unlink()
            removed.append(path)
    if removed:
        _logger.info(f"removed {len(removed)} snapshot(s) outside the schedule")
    return removed


def physics_record(cfg: RunConfig) -> dict[str, float]:
    """Physical calibration of a run, with the CPU power implied by the contact flux."""
    phys = cfg.physics()
    return {
        "h": phys.h,
        "delta": phys.delta,
        "q": phys.q,
        "contact_fraction": phys.contact_fraction,
        "lx": float(cfg["lx"]),
        "ly": float(cfg["ly"]),
        "contact_power": phys.q * phys.delta * phys.contact_fraction * float(cfg["ly"]),
    }


def _finish(manifest: RunManifest, result: ChainResult, k_correct: ConductivityField) -> RunManifest:
    state = result.state
    manifest.error_stats = reconstruction_error(result.final_k, k_correct).to_dict()
    manifest.acceptance = {
        "iterations": state.iteration,
        "accepted": state.accepted,
        "floor_rejected": state.floor_rejected,
        "acceptance_rate": state.acceptance_rate,
        "degenerate_slope_ratios": state.degenerate,
    }
    manifest.final_f = state.f
    manifest.wall_time = result.wall_time
    manifest.status, manifest.partial = "completed", False
    return manifest


def _execute(cfg: RunConfig, out: Path, body: Callable[[RunManifest], None]) -> RunManifest:
    """Shared run scaffolding: run log, manifest on success and on failure."""
    out.mkdir(parents=True, exist_ok=True)
    (out / ERROR_RECORD).unlink(missing_ok=True)
    handler = attach_run_log(out / "run.log")
    manifest = RunManifest(
        config=cfg.to_dict(), seed=cfg.seed, started=_now(), physics=physics_record(cfg)
    )
    try:
        body(manifest)
    except Exception as e:
        manifest.status, manifest.partial = "failed", True
        manifest.error = write_error_record(out, e)
        _logger.error(f"run failed: {type(e).__name__}: {e}")
        raise
    finally:
        detach_run_log(handler)
        manifest.finished = _now()
        manifest.files = _inventory(out)
        manifest.save(out)
    return manifest


def run_experiment(cfg: RunConfig, out: Path | None = None) -> RunManifest:
    out = out or cfg.out

    def body(manifest: RunManifest) -> None:
        _logger.info(f"run: trial={cfg['trial']} mesh={cfg['m']}x{cfg['n']} kernel={cfg['kernel']} seed={cfg.seed}")
        k_correct, data = synthesize(cfg)
        write_field_csv(out / "K_correct.csv", k_correct)
        write_trace_csv(out / "boundary_data.csv", data)
        mesh = k_correct.mesh
        result = run_chain(
            data, mesh, cfg.physics(), cfg.mcmc(),
            k0=constant_field(mesh, cfg["k0"], cfg["kappa_min"]),
            checkpoint_path=out / CHECKPOINT,
        )
        _write_results(out, result, result.trace)
        _finish(manifest, result, k_correct)
        _logger.info(f"run done: {manifest.error_stats}")

    return _execute(cfg, out, body)


def resume_experiment(run_dir: Path, iterations: int | None = None) -> RunManifest:
    """Continue a run from its checkpoint up to the (possibly raised) iteration budget."""
    previous = RunManifest.load(run_dir)
    raw = dict(previous.config)
    raw["out"] = str(run_dir)
    if iterations is not None:
        raw["iterations"] = iterations
    cfg = config_from_mapping(raw)
    state = checkpoint_load(run_dir / CHECKPOINT)
    k_correct = read_field_csv(run_dir / "K_correct.csv")
    data = read_trace_csv(run_dir / "boundary_data.csv")
    if state.k.mesh != k_correct.mesh:
        raise FieldError("checkpoint mesh does not match K_correct.csv")

    def body(manifest: RunManifest) -> None:
        manifest.resumed_from = state.iteration
        _logger.info(f"resume: from iteration {state.iteration} to {cfg['iterations']}")
        result = run_chain(
            data, k_correct.mesh, cfg.physics(), cfg.mcmc(),
            state=state, checkpoint_path=run_dir / CHECKPOINT,
        )
        trace = result.trace
        old_trace = run_dir / "trace.csv"
        if old_trace.exists():
            old = pd.read_csv(old_trace, float_precision="round_trip")
            trace = pd.concat([old[old["iter"] <= state.iteration], trace], ignore_index=True)
        _write_results(run_dir, result, trace)
        _finish(manifest, result, k_correct)

    return _execute(cfg, run_dir, body)


@dataclass
class SweepOutcome:
    index: int
    run_name: str
    params: dict[str, Any]
    seed: int
    manifest: RunManifest | None
    error: str | None = None


def _expand_grid(grid: Mapping[str, Sequence[Any]]) -> list[dict[str, Any]]:
    if not grid or any(len(values) == 0 for values in grid.values()):
        raise ConfigValidationError(
            [ValidationErrorInfo("sweep grid must name at least one key with values", "grid", "minItems")]
        )
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def _sweep_task(task: tuple[int, str, dict[str, Any], dict[str, Any]]) -> SweepOutcome:
    index, name, params, raw = task
    seed = int(raw["seed"])
    try:
        cfg = config_from_mapping(raw)
        return SweepOutcome(index, name, params, seed, run_experiment(cfg))
    except Exception as e:
        _logger.warning(f"sweep run {name} failed: {type(e).__name__}: {e}")
        manifest = None
        try:
            manifest = RunManifest.load(Path(raw["out"]))
        except (OSError, TypeError, yaml.YAMLError):
            pass
        return SweepOutcome(index, name, params, seed, manifest, f"{type(e).__name__}: {e}")


def sweep(
    cfg: RunConfig, grid: Mapping[str, Sequence[Any]], jobs: int = 1, out: Path | None = None
) -> list[SweepOutcome]:
    """One run per grid point, seeds derived from the master seed and the grid index.

    Failed runs are recorded in the registry and the sweep continues; the
    summary CSV lists the completed runs.
    """
    out = out or cfg.out
    points = _expand_grid(grid)
    out.mkdir(parents=True, exist_ok=True)
    tasks = []
    for index, params in enumerate(points):
        name = f"run_{index:03d}"
        raw = cfg.to_dict() | params
        raw["seed"] = derive_seed(cfg.seed, index)
        raw["out"] = str(out / name)
        tasks.append((index, name, params, raw))
    _logger.info(f"sweep: {len(tasks)} runs over {list(grid)} with {jobs} job(s)")
    if jobs <= 1:
        outcomes = [_sweep_task(t) for t in tasks]
    else:
        with Pool(processes=min(jobs, len(tasks))) as pool:
            outcomes = pool.map(_sweep_task, tasks)

    factory = open_registry(out / "registry.sqlite3")
    with factory() as session:
        for o in outcomes:
            m = o.manifest
            stats = (m.error_stats if m else None) or {}
            session.add(
                RunRecord(
                    grid_index=o.index,
                    run_name=o.run_name,
                    seed=str(o.seed),
                    status="completed" if o.error is None else "failed",
                    params=o.params,
                    mean_abs=stats.get("mean_abs"),
                    rms=stats.get("rms"),
                    max_abs=stats.get("max_abs"),
                    acceptance_rate=(m.acceptance or {}).get("acceptance_rate") if m else None,
                    final_f=m.final_f if m else None,
                    error=o.error,
                    manifest_path=str(out / o.run_name / MANIFEST),
                )
            )
        session.commit()
        records = session.scalars(
            select(RunRecord).where(RunRecord.status == "completed").order_by(RunRecord.grid_index)
        ).all()
    summary = pd.DataFrame(
        [
            {
                "run": r.run_name,
                **r.params,
                "seed": r.seed,
                "mean_abs": r.mean_abs,
                "rms": r.rms,
                "max_abs": r.max_abs,
                "acceptance_rate": r.acceptance_rate,
                "final_f": r.final_f,
            }
            for r in records
        ]
    )
    summary.to_csv(out / "summary.csv", index=False)
    return outcomes
