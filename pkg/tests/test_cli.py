"""CLI subcommands: exit codes, file outputs, determinism."""

import json

import numpy as np
import pytest

from expofuse import HsiCube, read_cube, write_cube
from expofuse.cli import cli_main
from expofuse.synth import synthetic_scene


@pytest.fixture()
def scene_file(tmp_path):
    rng = np.random.default_rng(0)
    cube = synthetic_scene(8, 32, 32, rng)
    path = tmp_path / "gt.cube"
    write_cube(path, cube)
    return path


def test_usage_error_exit_code():
    assert cli_main(["simulate"]) == 1  # missing required args
    assert cli_main(["not-a-command"]) == 1


def test_simulate_writes_outputs(scene_file, tmp_path):
    out = tmp_path / "sim"
    code = cli_main(
        ["simulate", "--input", str(scene_file), "--out-dir", str(out), "--case", "1"]
    )
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["ratio"] == 4
    assert manifest["gamma_hsi"] == {"alpha": 0.5, "gamma": 0.7}
    for name in manifest["files"].values():
        assert (out / name).exists()
    assert (out / "simulate_preview.png").exists()
    x = read_cube(out / "x.cube")
    assert x.dims == (8, 8, 8)
    y = read_cube(out / "y.cube")
    assert y.dims == (3, 32, 32)


def test_simulate_missing_input_is_data_error(tmp_path):
    code = cli_main(
        ["simulate", "--input", str(tmp_path / "nope.cube"), "--out-dir", str(tmp_path / "o")]
    )
    assert code == 2


def test_simulate_custom_case_requires_params(scene_file, tmp_path):
    code = cli_main(
        ["simulate", "--input", str(scene_file), "--out-dir", str(tmp_path / "o"),
         "--case", "custom"]
    )
    assert code == 2


def test_exposure_changes_spectra(scene_file, tmp_path):
    # Case-1 gamma is nonlinear per band, so the exposed cube must have SAM > 0
    # against the ground truth.
    sim_dir = tmp_path / "sim"
    assert cli_main(["simulate", "--input", str(scene_file), "--out-dir", str(sim_dir)]) == 0
    ev_dir = tmp_path / "ev"
    code = cli_main(
        ["eval", "--ref", str(sim_dir / "z.cube"), "--est", str(sim_dir / "zx.cube"),
         "--out-dir", str(ev_dir), "--ratio", "4", "--no-figures"]
    )
    assert code == 0
    metrics = json.loads((ev_dir / "metrics.json").read_text())
    assert metrics["estimate"]["sam"] > 0.0


def test_fuse_and_eval_pipeline(scene_file, tmp_path):
    sim_dir = tmp_path / "sim"
    assert cli_main(["simulate", "--input", str(scene_file), "--out-dir", str(sim_dir)]) == 0

    config = {
        "steps": [1.0, 1.0, 1.0],
        "outer_iters": 5,
        "line_search": {"enabled": True, "backtrack": 0.5, "max_trials": 20},
    }
    cfg_path = tmp_path / "solver.json"
    cfg_path.write_text(json.dumps(config))

    fuse_dir = tmp_path / "fuse"
    code = cli_main(
        ["fuse", "--input", str(sim_dir / "x.cube"), "--msi", str(sim_dir / "y.cube"),
         "--manifest", str(sim_dir / "manifest.json"), "--config", str(cfg_path),
         "--out-dir", str(fuse_dir)]
    )
    assert code == 0
    assert (fuse_dir / "fused.cube").exists()
    assert (fuse_dir / "objective_history.png").exists()
    hist_lines = (fuse_dir / "objective_history.csv").read_text().strip().split("\n")
    assert hist_lines[0] == "iteration,objective"
    assert len(hist_lines) == 7  # header + initial + 5 iterations

    ev_dir = tmp_path / "ev"
    code = cli_main(
        ["eval", "--est", str(fuse_dir / "fused.cube"),
         "--manifest", str(sim_dir / "manifest.json"), "--out-dir", str(ev_dir),
         "--name", "fused"]
    )
    assert code == 0
    assert (ev_dir / "metrics.csv").exists()
    assert (ev_dir / "comparison.png").exists()
    assert (ev_dir / "band_psnr.png").exists()
    metrics = json.loads((ev_dir / "metrics.json").read_text())
    assert metrics["fused"]["psnr"] > 0


def test_fuse_oracle_init_stays_near_truth(scene_file, tmp_path):
    sim_dir = tmp_path / "sim"
    assert cli_main(["simulate", "--input", str(scene_file), "--out-dir", str(sim_dir)]) == 0
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "outer_iters": 2,
        "prox": [{"kind": "identity"}, {"kind": "identity"}, {"kind": "identity"}],
    }))
    fuse_dir = tmp_path / "fuse"
    code = cli_main(
        ["fuse", "--input", str(sim_dir / "x.cube"), "--msi", str(sim_dir / "y.cube"),
         "--manifest", str(sim_dir / "manifest.json"), "--config", str(cfg_path),
         "--init", "oracle", "--out-dir", str(fuse_dir), "--no-figures"]
    )
    assert code == 0
    hist = (fuse_dir / "objective_history.csv").read_text().strip().split("\n")[1:]
    first = float(hist[0].split(",")[1])
    # The oracle start is data-consistent up to the 32-bit file precision.
    assert first < 1e-6


def test_fuse_dimension_mismatch_is_data_error(tmp_path):
    rng = np.random.default_rng(1)
    x = HsiCube(rng.uniform(size=(4, 8, 8)))
    y = HsiCube(rng.uniform(size=(3, 30, 30)))  # 30 not divisible by 8
    write_cube(tmp_path / "x.cube", x)
    write_cube(tmp_path / "y.cube", y)
    code = cli_main(
        ["fuse", "--input", str(tmp_path / "x.cube"), "--msi", str(tmp_path / "y.cube"),
         "--out-dir", str(tmp_path / "o")]
    )
    assert code == 2


def test_fuse_bad_cube_file_is_data_error(tmp_path):
    bad = tmp_path / "bad.cube"
    bad.write_bytes(b"XXXXXXXX" + b"\x00" * 24)
    good = tmp_path / "y.cube"
    write_cube(good, HsiCube(np.full((3, 8, 8), 0.5)))
    code = cli_main(
        ["fuse", "--input", str(bad), "--msi", str(good), "--out-dir", str(tmp_path / "o")]
    )
    assert code == 2


def test_gradcheck_deterministic_and_ok(capsys):
    assert cli_main(["gradcheck", "--seed", "7", "--instances", "2"]) == 0
    first = capsys.readouterr().out
    assert cli_main(["gradcheck", "--seed", "7", "--instances", "2"]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert "OK" in first


def test_bench_runs_and_reports(tmp_path, capsys):
    out = tmp_path / "bench"
    code = cli_main(["bench", "--seed", "0", "--iters", "3", "--out-dir", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    assert "baseline" in text and "fused" in text
    for name in ("bench_summary.csv", "objective_history.csv",
                 "objective_history.png", "bench_comparison.png"):
        assert (out / name).exists()
