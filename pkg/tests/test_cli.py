import json

import numpy as np
import pytest

from spinquench.cli import main
from spinquench.runio import parse_config_file, read_csv, sha256_file


def run(args):
    return main([str(a) for a in args])


def quench_args(out, **over):
    base = {"n": 8, "ns": 2, "j2": 1.0, "hi": 0.2, "hf": 0.0,
            "samples": 3000, "seed": 11}
    base.update(over)
    argv = ["quench", "--out", out]
    for key, val in base.items():
        argv += [f"--{key}", val]
    return argv


def test_quench_run_outputs_and_manifest(tmp_path):
    out = tmp_path / "run"
    assert run(quench_args(out)) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    # every referenced file exists and its recorded hash matches
    assert manifest["files"]
    for name, digest in manifest["files"].items():
        path = out / name
        assert path.exists()
        assert sha256_file(path) == digest
    for expected in ("spectrum_weights.csv", "loschmidt.csv", "trace_distance.csv",
                     "magnetization.csv", "bounds.json", "overlay_two_mode.csv",
                     "overlay_toy_ds.csv"):
        assert expected in manifest["files"]
    assert manifest["engine"]["ground_search"]["winning_sector"] == 0
    assert manifest["engine"]["coverage_full"] == pytest.approx(1.0, abs=1e-10)
    assert not manifest["engine"]["identity_quench"]
    assert manifest["bounds"]["markov_ok"]


def test_rerun_reproduces_byte_identical_csv_bodies(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(quench_args(a)) == 0
    assert run(quench_args(b)) == 0
    for name in json.loads((a / "manifest.json").read_text())["files"]:
        if name.endswith(".csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_identity_quench_flagged(tmp_path):
    out = tmp_path / "ident"
    assert run(quench_args(out, hi=0.3, hf=0.3)) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["engine"]["identity_quench"]
    assert manifest["derived"]["loschmidt"]["mean"] == pytest.approx(1.0, abs=1e-9)
    assert manifest["derived"]["trace_distance"]["max"] < 1e-9


def test_coverage_failure_exit_code(tmp_path, capsys):
    out = tmp_path / "short"
    code = run(quench_args(out, hi=3.0, solver="lanczos", k=3))
    assert code == 3
    assert "coverage" in capsys.readouterr().err


def test_renormalized_truncation_recovers(tmp_path):
    out = tmp_path / "renorm"
    argv = quench_args(out, hi=3.0, solver="lanczos", k=30) + ["--renormalize-truncation"]
    assert run(argv) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["engine"]["renormalized"]
    assert manifest["engine"]["coverage_full"] < 1 - 1e-4


def test_parameter_error_exit_code(tmp_path):
    assert run(quench_args(tmp_path / "x", ns=9)) == 2
    assert run(["quench", "--out", tmp_path / "y", "--n", "8", "--ns", "2",
                "--observables", "bogus"]) == 2


def test_missing_out_is_parameter_error():
    assert run(["quench", "--n", "8", "--ns", "2"]) == 2


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# quench configuration\n"
        "n = 8\n"
        "ns = 2\n"
        "j2 = 1.0\n"
        "hi = 0.2\n"
        "hf = 0.0\n"
        "samples = 2000\n"
        "seed = 5\n")
    parsed = parse_config_file(cfg)
    assert parsed["samples"] == "2000"
    out = tmp_path / "cfgrun"
    assert run(["quench", "--config", cfg, "--out", out, "--seed", "9"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["plan"]["seed"] == 9          # flag wins
    assert manifest["plan"]["n_samples"] == 2000  # config survives


def test_observable_subset(tmp_path):
    out = tmp_path / "lonly"
    assert run(quench_args(out, observables="loschmidt")) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert "loschmidt.csv" in manifest["files"]
    assert "trace_distance.csv" not in manifest["files"]
    assert manifest["bounds"] is None


def test_truncated_overlay_written_with_nmax(tmp_path):
    out = tmp_path / "nmax"
    assert run(quench_args(out, nmax=5)) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert "overlay_truncated_le.csv" in manifest["files"]
    assert manifest["overlays"]["truncated_le"]["n_max"] == 5


def test_eigendata_cache_roundtrip(tmp_path):
    cache = tmp_path / "cache"
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(quench_args(a, cache=cache)) == 0
    assert run(quench_args(b, cache=cache)) == 0
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert not ma["engine"]["cache_hit"]
    assert mb["engine"]["cache_hit"]
    # cached and fresh runs agree bit for bit on the physics outputs
    assert (a / "loschmidt.csv").read_bytes() == (b / "loschmidt.csv").read_bytes()
    assert (a / "spectrum_weights.csv").read_bytes() == (b / "spectrum_weights.csv").read_bytes()


def test_spectrum_command(tmp_path):
    out = tmp_path / "spec"
    assert run(["spectrum", "--n", 8, "--ns", 4, "--j2", "0,0.5,1",
                "--h-grid", "0:1:0.5", "--levels", 5, "--out", out]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    names = [n for n in manifest["files"] if n.startswith("spectrum_j2_")]
    assert len(names) == 3
    header, data = read_csv(out / "spectrum_j2_0.5.csv")
    assert header == ["h", "E0", "E1", "E2", "E3", "E4"]
    assert data.shape == (3, 6)
    # Majumdar-Ghosh degeneracy at the zero-field grid point
    assert data[0, 2] - data[0, 1] <= 1e-10
    # single-point grid gives a single-row CSV
    single = tmp_path / "single"
    assert run(["spectrum", "--n", 8, "--ns", 4, "--j2", "0",
                "--h-grid", "1:1:0.5", "--levels", 1, "--out", single]) == 0
    _, row = read_csv(single / "spectrum_j2_0.csv")
    assert row.shape == (1, 2)


def test_spectrum_bad_grid(tmp_path):
    assert run(["spectrum", "--n", 8, "--ns", 4, "--j2", "0",
                "--h-grid", "0:1", "--out", tmp_path / "bad"]) == 2


def test_toy_command(tmp_path):
    out = tmp_path / "toy"
    assert run(["toy", "--p1", 0.86, "--p2", 0.13, "--samples", 20000,
                "--seed", 3, "--out", out]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["derived"]["edge"] == pytest.approx(np.sqrt(0.86 * 0.13), abs=1e-12)
    _, dens = read_csv(out / "toy_density.csv")
    assert dens[-1, 0] < manifest["derived"]["edge"]
    # degenerate case: single-bin histogram, empty density table
    single = tmp_path / "toy1"
    assert run(["toy", "--p1", 1.0, "--p2", 0.0, "--samples", 500,
                "--out", single]) == 0
    _, hist = read_csv(single / "toy_histogram.csv")
    assert hist.shape == (1, 3)
    _, dens1 = read_csv(single / "toy_density.csv")
    assert dens1.size == 0


def test_toy_weight_validation(tmp_path):
    assert run(["toy", "--p1", 0.5, "--p2", 0.1, "--out", tmp_path / "z"]) == 2
