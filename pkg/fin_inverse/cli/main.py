"""
Command-line entry point: ``fin-inverse run|sweep|resume|gen``.
"""

from __future__ import annotations
import argparse
import sys
from pathlib import Path
from typing import Any, Sequence

from rich.console import Console
from rich.table import Table

from .. import __version__
from ..core.errors import ConfigValidationError, ValidationErrorInfo
from ..infra.logging.logger import get_logger
from ..infra.schemas.schema_manager import get_properties
from .config import parse_assignment, parse_config, parse_value
from .runner import (
    EXIT_OK,
    RunManifest,
    SweepOutcome,
    exit_code_for,
    generate,
    write_error_record,
    resume_experiment,
    run_experiment,
    sweep,
)

_logger = get_logger("fin_inverse.cli")
_console = Console(stderr=True)


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="YAML or key = value configuration file")
    parser.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE", help="override any key (repeatable)"
    )
    group = parser.add_argument_group("configuration keys")
    for key, spec in get_properties().items():
        if key in ("seed", "out"):
            continue
        group.add_argument(
            _flag(key), dest=f"cfg_{key}", metavar="VALUE", help=spec.get("description")
        )
    parser.add_argument("--seed", help="master seed (u64)")
    parser.add_argument("--out", help="output directory")


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for key in get_properties():
        dest = key if key in ("seed", "out") else f"cfg_{key}"
        text = getattr(args, dest, None)
        if text is not None:
            values[key] = parse_value(key, text)
    for item in args.set:
        key, value = parse_assignment(item)
        values[key] = value
    return values


def _parse_grid(items: Sequence[str]) -> dict[str, list[Any]]:
    grid: dict[str, list[Any]] = {}
    for item in items:
        key, sep, text = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigValidationError(
                [ValidationErrorInfo(f"expected key=v1,v2,..., got {item!r}", "grid", "syntax", item)]
            )
        grid[key] = [parse_value(key, v.strip()) for v in text.split(",") if v.strip()]
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fin-inverse",
        description="Reconstruct cooling-fin conductivity from boundary temperatures by MCMC.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="synthesize data and run one chain")
    _add_config_options(run)

    sw = sub.add_parser("sweep", help="run a Cartesian grid of configurations")
    _add_config_options(sw)
    sw.add_argument(
        "--grid", action="append", default=[], metavar="KEY=V1,V2", help="swept key and its values"
    )
    sw.add_argument("--jobs", type=int, default=1, help="worker processes")

    res = sub.add_parser("resume", help="continue a run from its checkpoint")
    res.add_argument("run_dir", type=Path)
    res.add_argument("--iterations", type=int, help="new total iteration budget")

    gen = sub.add_parser("gen", help="write the trial field and boundary data only")
    _add_config_options(gen)
    return parser


def _print_manifest(m: RunManifest) -> None:
    table = Table(title=f"run {m.status}")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for k, v in (m.error_stats or {}).items():
        table.add_row(k, f"{v:.6g}")
    for k, v in (m.acceptance or {}).items():
        table.add_row(k, f"{v:.6g}" if isinstance(v, float) else str(v))
    if m.final_f is not None:
        table.add_row("final_f", f"{m.final_f:.6g}")
    if m.wall_time is not None:
        table.add_row("wall_time_s", f"{m.wall_time:.2f}")
    _console.print(table)


def _print_sweep(outcomes: list[SweepOutcome]) -> None:
    table = Table(title="sweep")
    for col in ("run", "params", "status", "mean_abs", "rms", "acceptance"):
        table.add_column(col)
    for o in outcomes:
        stats = (o.manifest.error_stats if o.manifest else None) or {}
        acc = (o.manifest.acceptance if o.manifest else None) or {}
        table.add_row(
            o.run_name,
            ", ".join(f"{k}={v}" for k, v in o.params.items()),
            "completed" if o.error is None else "failed",
            f"{stats['mean_abs']:.4g}" if "mean_abs" in stats else "-",
            f"{stats['rms']:.4g}" if "rms" in stats else "-",
            f"{acc['acceptance_rate']:.3f}" if "acceptance_rate" in acc else "-",
        )
    _console.print(table)


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "resume":
        _print_manifest(resume_experiment(args.run_dir, args.iterations))
        return EXIT_OK
    cfg = parse_config(args.config, _overrides(args))
    if args.command == "gen":
        for name, digest in generate(cfg).items():
            _console.print(f"{cfg.out / name}  sha256:{digest[:16]}")
        return EXIT_OK
    if args.command == "sweep":
        outcomes = sweep(cfg, _parse_grid(args.grid), args.jobs)
        _print_sweep(outcomes)
        return EXIT_OK
    _print_manifest(run_experiment(cfg))
    return EXIT_OK


def _output_dir(args: argparse.Namespace) -> Path | None:
    """Output directory named on the command line, if any (``--set out=`` beats ``--out``)."""
    if args.command == "resume":
        return args.run_dir if args.run_dir.is_dir() else None
    for item in reversed(args.set):
        key, sep, text = item.partition("=")
        if sep and key.strip() == "out" and text.strip():
            return Path(text.strip())
    return Path(args.out) if args.out else None


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigValidationError as e:
        for err in e.errors:
            _console.print(f"[red]config error[/red] {err.path}: {err.message}")
        error: Exception = e
    except Exception as e:
        _logger.error(f"{args.command} failed ({exit_code_for(e)}): {type(e).__name__}: {e}")
        error = e
    out = _output_dir(args)
    if out is not None:
        write_error_record(out, error)
    return exit_code_for(error)


if __name__ == "__main__":
    sys.exit(main())
