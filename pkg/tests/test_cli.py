import csv
import json
import os
import shutil
import subprocess
import sys

import numpy as np
import pytest

from qwnn.cli import main

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
CFG = os.path.join(ROOT, "fixtures", "configs")


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def read_marginals(path):
    rows = list(csv.DictReader(open(path)))
    steps = max(int(r["step"]) for r in rows) + 1
    n = max(int(r["node"]) for r in rows) + 1
    c = np.zeros((steps, n))
    q = np.zeros((steps, n))
    for r in rows:
        c[int(r["step"]), int(r["node"])] = float(r["classical"])
        q[int(r["step"]), int(r["node"])] = float(r["quantum"])
    return c, q


@pytest.mark.parametrize("name", ["synthetic_shift", "toy_temperature", "toy_tu", "toy_molecules"])
def test_train_fixture_configs(tmp_path, capsys, name):
    code, out, _ = run(["train", "--config", os.path.join(CFG, name + ".toml"), "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    last = out.strip().splitlines()[-1]
    assert " ± " in last and last.endswith("trials")
    summary = json.load(open(tmp_path / "summary.json"))
    assert os.path.exists(tmp_path / "trial0_log.csv") and os.path.exists(tmp_path / "trial0.npz")
    assert len(summary["trials"]) >= 1


def test_train_deterministic(tmp_path, capsys):
    cfg = os.path.join(CFG, "toy_temperature.toml")
    outs = []
    for i in range(2):
        code, out, _ = run(["train", "--config", cfg, "--seed", "3", "--trials", "2", "--out-dir", str(tmp_path / str(i))], capsys)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    assert "over 2 trials" in outs[0]


def test_missing_learning_rate_exit_2(tmp_path, capsys):
    text = open(os.path.join(CFG, "synthetic_shift.toml")).read().replace("learning_rate = 0.03\n", "")
    (tmp_path / "c.toml").write_text(text)
    code, _, err = run(["train", "--config", str(tmp_path / "c.toml"), "--out-dir", str(tmp_path)], capsys)
    assert code == 2
    assert "training.learning_rate" in err


def test_missing_data_exit_3(tmp_path, capsys):
    text = open(os.path.join(CFG, "toy_temperature.toml")).read()
    (tmp_path / "c.toml").write_text(text)  # relative data paths no longer resolve
    code, _, err = run(["train", "--config", str(tmp_path / "c.toml"), "--out-dir", str(tmp_path)], capsys)
    assert code == 3 and "data error" in err


def test_eval_matches_restored_validation_row(tmp_path, capsys):
    cfg = os.path.join(CFG, "synthetic_shift.toml")
    assert run(["train", "--config", cfg, "--trials", "1", "--out-dir", str(tmp_path)], capsys)[0] == 0
    rows = list(csv.DictReader(open(tmp_path / "trial0_log.csv")))
    best = min(rows, key=lambda r: float(r["val_loss"]))
    before = (tmp_path / "trial0.npz").read_bytes()
    code, out, _ = run(["eval", "--checkpoint", str(tmp_path / "trial0.npz"), "--split", "validation"], capsys)
    assert code == 0
    assert out.startswith(f"validation: loss {float(best['val_loss']):.4f} rmse {float(best['val_metric']):.4f}")
    assert (tmp_path / "trial0.npz").read_bytes() == before


def test_eval_corrupted_checkpoint_exit_3(tmp_path, capsys):
    (tmp_path / "x.npz").write_bytes(b"garbage")
    code, _, err = run(["eval", "--checkpoint", str(tmp_path / "x.npz")], capsys)
    assert code == 3 and "checksum" in err


def test_eval_feature_mismatch_exit_3(tmp_path, capsys):
    assert run(["train", "--config", os.path.join(CFG, "synthetic_shift.toml"), "--trials", "1", "--out-dir", str(tmp_path)], capsys)[0] == 0
    code, _, err = run(["eval", "--checkpoint", str(tmp_path / "trial0.npz"), "--config", os.path.join(CFG, "toy_temperature.toml")], capsys)
    assert code == 3 and "nodes" in err


@pytest.mark.parametrize("coin", ["grover", "hadamard"])
def test_inspect_walk_zero_steps(tmp_path, capsys, coin):
    code, _, _ = run(["inspect-walk", "--graph", "cycle:7", "--coin", coin, "--steps", "0", "--start", "3", "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    c, q = read_marginals(tmp_path / "walk_marginals.csv")
    expect = np.eye(7)[3]
    np.testing.assert_array_equal(c[0], expect)
    np.testing.assert_allclose(q[0], expect, atol=1e-15)


def test_inspect_walk_flip_coin_rotation(tmp_path, capsys):
    code, _, _ = run(["inspect-walk", "--graph", "cycle:3", "--coin", "flip", "--steps", "6", "--start", "0",
                      "--start-slot", "0", "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    _, q = read_marginals(tmp_path / "walk_marginals.csv")
    # all amplitude keeps circling one way: 0, 2, 1, 0, ...
    for t in range(7):
        np.testing.assert_array_equal(q[t], np.eye(3)[(-t) % 3])


def test_inspect_walk_lattice_default(tmp_path, capsys):
    code, out, _ = run(["inspect-walk", "--graph", "lattice:9x9", "--steps", "4", "--start", "40", "--out-dir", str(tmp_path)], capsys)
    assert code == 0 and "4 steps, 81 nodes" in out
    c, q = read_marginals(tmp_path / "walk_marginals.csv")
    assert c.shape == (5, 81)
    np.testing.assert_allclose(q.sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(c.sum(axis=1), 1.0, atol=1e-12)
    p = np.loadtxt(tmp_path / "diffusion.csv", delimiter=",")
    assert p.shape == (81, 81)


def test_inspect_walk_bad_args(tmp_path, capsys):
    assert run(["inspect-walk", "--graph", "blob:3", "--out-dir", str(tmp_path)], capsys)[0] == 2
    assert run(["inspect-walk", "--graph", "cycle:3", "--start", "5", "--out-dir", str(tmp_path)], capsys)[0] == 2
    assert run(["inspect-walk", "--graph", "lattice:3x3", "--coin", "hadamard", "--out-dir", str(tmp_path)], capsys)[0] == 2


def test_import_tu_round_trip(tmp_path, capsys):
    src = os.path.join(ROOT, "fixtures", "tu", "TOY")
    code, out, _ = run(["import-data", "tu", "--source", src, "--out-dir", str(tmp_path)], capsys)
    assert code == 0 and json.loads(out)["graphs"] == 2
    for f in os.listdir(src):
        assert open(os.path.join(src, f)).read() == (tmp_path / f).read_text()
    assert run(["import-data", "qm7", "--source", str(tmp_path / "none.mat"), "--out-dir", str(tmp_path)], capsys)[0] == 3


def test_compare_writes_three_rows(tmp_path, capsys):
    code, out, _ = run(["compare", "--config", os.path.join(CFG, "toy_temperature.toml"), "--trials", "1", "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    rows = list(csv.DictReader(open(tmp_path / "comparison.csv")))
    assert [r["model"] for r in rows] == ["qwnn", "dcnn", "gcnn"]
    assert all(np.isfinite(float(r["mean"])) for r in rows)


@pytest.mark.skipif(shutil.which("qwnn") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["qwnn", "inspect-walk", "--graph", "path:5", "--steps", "2", "--out-dir", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    res = subprocess.run([sys.executable, "-m", "qwnn", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "inspect-walk" in res.stdout
