import json

import pandas as pd
import pytest
import yaml
from sqlalchemy import select

from fin_inverse.cli.config import parse_config
from fin_inverse.cli.main import main
from fin_inverse.core.errors import ConfigValidationError
from fin_inverse.core.grid import read_field_csv, read_trace_csv
from fin_inverse.core.mcmc import checkpoint_load
from fin_inverse.core.proposals import ProposalKind
from fin_inverse.infra.db.models import RunRecord
from fin_inverse.infra.db.session import open_registry

SMALL = ["--m", "5", "--n", "5", "--iterations", "120", "--log-every", "0", "--snapshot-count", "3"]


def test_empty_config_gives_defaults(temp_dir):
    path = temp_dir / "empty.cfg"
    path.write_text("# nothing set\n")
    cfg = parse_config(path)
    assert cfg["sigma"] == 0.1
    assert cfg["omega_bound"] == 0.005
    assert cfg["epsilon0"] == 5e-5
    assert cfg["k0"] == 1.0
    assert cfg.weights().lambda_ is None


def test_assignment_file_sets_up_gridwise_run(temp_dir):
    path = temp_dir / "run.cfg"
    path.write_text("kernel = gridwise\nm = 20\nn = 20\nk0 = 2.0\nepsilon0 = 5e-05\n")
    cfg = parse_config(path)
    assert cfg.proposal().kernel is ProposalKind.GRIDWISE
    assert cfg.mesh().shape == (20, 20)
    assert cfg["k0"] == 2.0
    assert cfg["epsilon0"] == 5e-5


def test_yaml_file_and_override_precedence(temp_dir):
    path = temp_dir / "run.yaml"
    path.write_text("lambda: 100\nmu: 10\nseed: 5\n")
    cfg = parse_config(path, {"mu": 7.5})
    assert cfg["lambda"] == 100
    assert cfg["mu"] == 7.5
    assert cfg.seed == 5


def test_negative_lambda_names_the_bound(temp_dir):
    path = temp_dir / "bad.cfg"
    path.write_text("lambda = -1\n")
    with pytest.raises(ConfigValidationError) as exc:
        parse_config(path)
    assert "lambda must be >= 0" in str(exc.value)


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigValidationError) as exc:
        parse_config(overrides={"lamda": 1})
    assert "lamda" in str(exc.value)


def test_run_exit_codes(temp_dir):
    assert main(["run", "--lambda", "-1", "--out", str(temp_dir / "a")]) == 1
    assert main(["run", "--config", str(temp_dir / "missing.cfg")]) == 3
    assert main(["run", "--set", "trial=tilted_plane", "--out", str(temp_dir / "b"), *SMALL]) == 0


def test_config_error_is_recorded_in_the_output_dir(temp_dir):
    out = temp_dir / "bad"
    assert main(["run", "--lambda", "-1", "--out", str(out)]) == 1
    error = json.loads((out / "error.json").read_text())
    assert error["type"] == "ConfigValidationError"
    assert error["exit_code"] == 1
    assert error["errors"][0]["path"] == "lambda"
    assert not (out / "manifest.yaml").exists()
    assert main(["gen", "--set", f"out={temp_dir / 'other'}", "--set", "sigma=0"]) == 1
    assert json.loads((temp_dir / "other" / "error.json").read_text())["errors"][0]["path"] == "sigma"


def test_failed_chain_leaves_partial_outputs_and_resumes(temp_dir, fail_solve_at, monkeypatch):
    out = temp_dir / "run"
    # call 1 synthesizes the data, call 2 is the starting misfit, step s is call s + 2
    fail_solve_at(42)
    assert main(["run", "--out", str(out), *SMALL]) == 2
    manifest = yaml.safe_load((out / "manifest.yaml").read_text())
    assert manifest["status"] == "failed"
    assert manifest["partial"] is True
    assert manifest["error"]["type"] == "ChainError"
    assert "checkpoint.frck" in manifest["files"]
    error = json.loads((out / "error.json").read_text())
    assert (error["type"], error["exit_code"], error["iteration"]) == ("ChainError", 2, 40)
    assert checkpoint_load(out / "checkpoint.frck").iteration == 39
    assert not (out / "K_final.csv").exists()

    monkeypatch.undo()
    assert main(["resume", str(out)]) == 0
    manifest = yaml.safe_load((out / "manifest.yaml").read_text())
    assert manifest["status"] == "completed"
    assert (manifest["partial"], manifest["resumed_from"]) == (False, 39)
    assert manifest["acceptance"]["iterations"] == 120
    assert not (out / "error.json").exists()


def test_run_writes_outputs(temp_dir):
    out = temp_dir / "run"
    assert main(["run", "--out", str(out), "--lambda", "10", "--kernel", "gridwise", *SMALL]) == 0
    for name in ("K_correct.csv", "K_final.csv", "trace.csv", "boundary_data.csv",
                 "update_counts.csv", "checkpoint.frck", "run.log", "manifest.yaml"):
        assert (out / name).exists(), name
    assert sorted(p.name for p in (out / "snapshots").iterdir()) == [
        "K_iter_120.csv", "K_iter_40.csv", "K_iter_80.csv"
    ]
    manifest = yaml.safe_load((out / "manifest.yaml").read_text())
    assert manifest["status"] == "completed"
    assert manifest["partial"] is False
    assert manifest["config"]["lambda"] == 10
    assert manifest["physics"]["q"] == manifest["config"]["q"] == 100.0
    assert manifest["physics"]["contact_power"] == pytest.approx(20.0)
    assert not (out / "error.json").exists()
    assert manifest["acceptance"]["iterations"] == 120
    assert set(manifest["error_stats"]) == {"mean_abs", "rms", "max_abs"}
    assert "K_final.csv" in manifest["files"]
    trace = pd.read_csv(out / "trace.csv")
    assert list(trace.columns) == ["iter", "f", "best_f", "acceptance_rate"]
    assert trace["acceptance_rate"].iloc[-1] == pytest.approx(manifest["acceptance"]["acceptance_rate"])
    assert len(read_trace_csv(out / "boundary_data.csv")) == 16
    assert read_field_csv(out / "K_final.csv").mesh.shape == (5, 5)


def test_same_config_gives_identical_outputs(temp_dir):
    runs = [temp_dir / "one", temp_dir / "two"]
    for out in runs:
        assert main(["run", "--out", str(out), "--seed", "7", "--mu", "10", *SMALL]) == 0
    assert (runs[0] / "K_final.csv").read_bytes() == (runs[1] / "K_final.csv").read_bytes()
    m0, m1 = (yaml.safe_load((r / "manifest.yaml").read_text()) for r in runs)
    assert m0["files"]["K_final.csv"] == m1["files"]["K_final.csv"]


def test_resume_continues_to_the_same_state(temp_dir):
    straight, split = temp_dir / "straight", temp_dir / "split"
    common = ["--m", "5", "--n", "5", "--log-every", "0", "--lambda", "5", "--seed", "3"]
    assert main(["run", "--out", str(straight), "--iterations", "200", *common]) == 0
    assert main(["run", "--out", str(split), "--iterations", "100", *common]) == 0
    assert main(["resume", str(split), "--iterations", "200"]) == 0
    assert (split / "K_final.csv").read_bytes() == (straight / "K_final.csv").read_bytes()
    manifest = yaml.safe_load((split / "manifest.yaml").read_text())
    assert manifest["resumed_from"] == 100
    assert manifest["config"]["iterations"] == 200
    trace = pd.read_csv(split / "trace.csv")
    assert trace["iter"].is_monotonic_increasing
    assert trace["iter"].iloc[-1] == 200
    # the first segment saved every 10th iteration; only the new schedule is kept
    snapshots = sorted(p.name for p in (split / "snapshots").iterdir())
    assert snapshots == sorted(f"K_iter_{it}.csv" for it in range(20, 201, 20))
    assert snapshots == sorted(p.name for p in (straight / "snapshots").iterdir())


def test_gen_writes_field_and_data(temp_dir):
    out = temp_dir / "gen"
    assert main(["gen", "--out", str(out), "--trial", "gaussian_well", "--m", "21", "--n", "21"]) == 0
    k = read_field_csv(out / "K_correct.csv")
    assert k.at(11, 11) == pytest.approx(2 / 51)
    assert len(read_trace_csv(out / "boundary_data.csv")) == 80
    assert not (out / "K_final.csv").exists()


def test_sweep_runs_the_cartesian_grid(temp_dir):
    out = temp_dir / "sweep"
    argv = ["sweep", "--out", str(out), "--grid", "lambda=1,5,10", "--grid", "mu=7.5,10", "--jobs", "2"]
    assert main(argv + SMALL) == 0
    summary = pd.read_csv(out / "summary.csv")
    assert len(summary) == 6
    assert sorted(zip(summary["lambda"], summary["mu"])) == [
        (1, 7.5), (1, 10), (5, 7.5), (5, 10), (10, 7.5), (10, 10)
    ]
    seeds = {yaml.safe_load((out / f"run_{i:03d}" / "manifest.yaml").read_text())["seed"] for i in range(6)}
    assert len(seeds) == 6


def test_sweep_without_grid_is_an_error(temp_dir):
    assert main(["sweep", "--out", str(temp_dir / "s")] + SMALL) == 1
    assert main(["sweep", "--out", str(temp_dir / "s"), "--grid", "lambda="] + SMALL) == 1


def test_sweep_continues_past_a_failed_run(temp_dir):
    out = temp_dir / "sweep"
    assert main(["sweep", "--out", str(out), "--grid", "k0=1.0,1e-7"] + SMALL) == 0
    summary = pd.read_csv(out / "summary.csv")
    assert len(summary) == 1
    failed = out / "run_001"
    manifest = yaml.safe_load((failed / "manifest.yaml").read_text())
    assert manifest["status"] == "failed"
    assert manifest["partial"] is True
    error = json.loads((failed / "error.json").read_text())
    assert error["type"] == "FieldError"
    assert error["exit_code"] == 1
    factory = open_registry(out / "registry.sqlite3")
    with factory() as session:
        records = session.scalars(select(RunRecord).order_by(RunRecord.grid_index)).all()
    assert [r.status for r in records] == ["completed", "failed"]
    assert records[1].error.startswith("FieldError")
