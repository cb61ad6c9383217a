"""Command-line entry point."""

import json

import pytest

from eqgan.cli import build_parser, main
from eqgan.experiments import shipped_hamiltonian_paths


def test_parser_requires_subcommand():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_parser_accepts_all_experiments():
    for name in ("rand2q", "vqe-learn", "rand-state", "ssvqe-solve"):
        args = build_parser().parse_args([name, "--out", "x"])
        assert args.experiment == name
        assert args.spec is None
        assert not args.paper_scale


def test_tiny_rand2q_run(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps({
        "samples": 1,
        "train": {"episodes": 2, "batch_size": 1},
    }))
    out = tmp_path / "out"
    code = main(["rand2q", "--spec", str(spec_path), "--out", str(out)])
    assert code == 0
    assert (out / "rand2q.csv").exists()
    assert (out / "manifest.json").exists()


def test_seed_flag_overrides_spec(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps({
        "seed": 1,
        "samples": 1,
        "train": {"episodes": 2, "batch_size": 1},
    }))
    out = tmp_path / "out"
    code = main([
        "rand2q", "--spec", str(spec_path), "--out", str(out), "--seed", "4",
    ])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["spec"]["seed"] == 4


def test_ssvqe_solve_run(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps({
        "hamiltonian": shipped_hamiltonian_paths()[0],
        "iterations": 20,
    }))
    out = tmp_path / "out"
    assert main(["ssvqe-solve", "--spec", str(spec_path), "--out", str(out)]) == 0
    assert (out / "ssvqe_solve.json").exists()


def test_bad_spec_exits_two(tmp_path, capsys):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps({"samples": -1}))
    code = main(["rand2q", "--spec", str(spec_path), "--out", str(tmp_path)])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_missing_spec_file_exits_two(tmp_path, capsys):
    code = main([
        "rand2q", "--spec", str(tmp_path / "nope.json"), "--out", str(tmp_path),
    ])
    assert code == 2


def test_invalid_json_exits_two(tmp_path, capsys):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text("{not json")
    code = main(["rand2q", "--spec", str(spec_path), "--out", str(tmp_path)])
    assert code == 2
