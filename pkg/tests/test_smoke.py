from pathlib import Path

from fin_inverse.cli.config import parse_config
from fin_inverse.cli.runner import run_experiment


def test_run_structure(tmp_path: Path):
    cfg = parse_config(
        overrides={"m": 4, "n": 4, "iterations": 20, "log_every": 0, "out": str(tmp_path / "run")}
    )
    manifest = run_experiment(cfg)
    assert manifest.status == "completed"
    assert (tmp_path / "run" / "K_final.csv").exists()
    assert (tmp_path / "run" / "snapshots").is_dir()
