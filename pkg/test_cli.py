# test_cli.py - Command-Line Tests

import json

import pandas as pd
import pytest

from uq import main, build_parser

@pytest.fixture
def nodes_file(tmp_path):
    path = tmp_path / "nodes.txt"
    path.write_text("0.2\n0.5\n0.8\n")
    return path

def test_config_show(capsys):
    assert main(["config", "show"]) == 0
    assert main(["config", "show", "--presets"]) == 0
    assert capsys.readouterr().out

def test_basis_eval_prints_basis_values(nodes_file, capsys):
    assert main(["basis", "eval", "--nodes", str(nodes_file), "--query", "0.5"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["psi"] == pytest.approx([1 / 3, 1 / 3, 1 / 3], abs=1e-10)
    assert result["query"] == [0.5]

def test_basis_eval_outside_hull_fails(nodes_file, capsys):
    assert main(["basis", "eval", "--nodes", str(nodes_file), "--query", "0.9"]) == 1
    assert "outside" in capsys.readouterr().err

def test_run_example1_writes_results(tmp_path):
    argv = ["run", "example1", "--basis", "apc", "--n-basis", "3", "--n-samples", "40", "--t-final", "1", "--out", str(tmp_path)]
    assert main(argv) == 0
    frame = pd.read_csv(tmp_path / "example1" / "example1_apc.csv")
    assert len(frame) == 11
    assert (tmp_path / "example1" / "meta.json").exists()

def test_sample_sweep_writes_table(tmp_path):
    argv = [
        "sweep", "samples", "--list", "20,40", "--repeats", "2", "--basis", "maxent",
        "--n-basis", "3", "--seed", "7", "--out", str(tmp_path)
    ]
    assert main(argv) == 0
    table = pd.read_csv(tmp_path / "sample-study" / "sample_study_maxent.csv")
    assert list(table["n_D"]) == [20, 40]
    meta = json.loads((tmp_path / "sample-study" / "meta.json").read_text())
    assert meta["seeds"]["root"] == 7
    assert len(meta["seeds"]["children"]) == 4

def test_mismatched_sparse_count_fails(tmp_path, capsys):
    argv = ["run", "example2", "--n-basis", "10", "--n-sparse", "8", "--out", str(tmp_path)]
    assert main(argv) == 1
    assert "n_sparse" in capsys.readouterr().err

def test_config_file_with_flag_override(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"basis": "apc", "n_basis": 3, "n_samples": 40, "t_final": 1.0}))
    assert main(["run", "example1", "--config", str(path), "--basis", "maxent", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "example1" / "example1_maxent.csv").exists()
    assert not (tmp_path / "example1" / "example1_apc.csv").exists()

def test_list_arguments_must_be_integers():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["sweep", "basis", "--list", "2,x"])
