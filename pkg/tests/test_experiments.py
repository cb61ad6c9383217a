"""Experiment runners: spec resolution, summaries, outputs, determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

from eqgan.experiments import (
    EXPERIMENTS,
    SpecError,
    resolve_spec,
    run_rand2q,
    run_rand_state,
    run_ssvqe_solve,
    run_vqe_learn,
    shipped_hamiltonian_paths,
    summarize,
)

TINY_TRAIN = {"episodes": 3, "batch_size": 2}
TINY_SSVQE_H = shipped_hamiltonian_paths()[0]


def read(path):
    return Path(path).read_bytes()


def test_experiment_names():
    assert set(EXPERIMENTS) == {"rand2q", "vqe-learn", "rand-state", "ssvqe-solve"}


def test_shipped_hamiltonians_exist():
    paths = shipped_hamiltonian_paths()
    assert len(paths) == 5
    for p in paths:
        assert Path(p).exists()


def test_resolve_spec_defaults():
    spec = resolve_spec({}, "rand2q")
    assert spec["samples"] == 200
    assert spec["seed"] == 0
    assert spec["ansatz"]["entangler"] == "CZ"
    assert resolve_spec({}, "rand2q", paper_scale=True)["samples"] == 10000


def test_resolve_spec_seed_override():
    assert resolve_spec({"seed": 5}, "rand2q")["seed"] == 5
    assert resolve_spec({"seed": 5}, "rand2q", seed=9)["seed"] == 9


def test_resolve_spec_errors():
    with pytest.raises(SpecError):
        resolve_spec({}, "unknown-experiment")
    with pytest.raises(SpecError):
        resolve_spec({"bogus_key": 1}, "rand2q")
    with pytest.raises(SpecError):
        resolve_spec({"experiment": "rand2q"}, "rand-state")
    with pytest.raises(SpecError):
        resolve_spec({"samples": 0}, "rand2q")
    with pytest.raises(SpecError):
        resolve_spec({"train": {"episodes": 0}}, "rand2q")
    with pytest.raises(SpecError):
        resolve_spec({"ansatz": {"num_qubits": 3}}, "rand2q")
    with pytest.raises(SpecError):
        resolve_spec({"qubits": [7]}, "rand-state")
    with pytest.raises(SpecError):
        resolve_spec({"disc_mode": "sometimes"}, "rand-state")
    with pytest.raises(SpecError):
        resolve_spec({}, "ssvqe-solve")
    with pytest.raises(SpecError):
        resolve_spec({"hamiltonian": "/nonexistent.json"}, "ssvqe-solve")
    with pytest.raises(SpecError):
        resolve_spec({"hamiltonians": []}, "vqe-learn")


def test_summarize_examples():
    stats = summarize([1.0, 1.0, 0.5])
    assert stats.mean == pytest.approx(0.8333333333, abs=1e-9)
    assert stats.mode == pytest.approx(0.995)  # center of the top bin
    assert stats.counts.sum() == 3
    assert len(stats.bin_edges) == 101


def test_summarize_mode_tie_breaks_high():
    # one value in [0.50, 0.51) and one at the top; tie goes to the higher bin
    stats = summarize([0.505, 0.999])
    assert stats.mode == pytest.approx(0.995)


def test_summarize_empty_rejected():
    with pytest.raises(ValueError):
        summarize([])


def test_rand2q_outputs_and_determinism(tmp_path):
    spec = resolve_spec(
        {"samples": 2, "train": dict(TINY_TRAIN), "seed": 3}, "rand2q"
    )
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    summary = run_rand2q(spec, out_a)
    run_rand2q(spec, out_b)
    for name in ("rand2q.csv", "rand2q_summary.json", "manifest.json"):
        assert (out_a / name).exists()
        assert read(out_a / name) == read(out_b / name)
    assert set(summary) == {"perfect", "adversarial"}
    lines = (out_a / "rand2q.csv").read_text().strip().splitlines()
    assert lines[0] == "run_id,seed,mode,final_fidelity,best_fidelity,episodes"
    assert len(lines) == 1 + 2 * 2  # two samples, two modes each


def test_rand_state_outputs(tmp_path):
    spec = resolve_spec(
        {
            "qubits": [2],
            "layers": [1],
            "entanglers": ["CZ"],
            "parametrized": [False],
            "states_per_cell": 2,
            "train": dict(TINY_TRAIN),
        },
        "rand-state",
    )
    rows = run_rand_state(spec, tmp_path)
    assert len(rows) == 1
    q, gate, par, layers, mean_infid, stderr, n = rows[0]
    assert (q, gate, par, layers, n) == (2, "CZ", 0, 1, 2)
    assert 0.0 <= mean_infid <= 1.0
    lines = (tmp_path / "rand_state.csv").read_text().strip().splitlines()
    assert lines[0].startswith("qubits,gate,parametrized,layers,mean_infidelity")


def test_vqe_learn_outputs(tmp_path):
    spec = resolve_spec(
        {
            "hamiltonians": [TINY_SSVQE_H],
            "ssvqe_iterations": 10,
            "pool_size": 4,
            "train": dict(TINY_TRAIN),
        },
        "vqe-learn",
    )
    rows = run_vqe_learn(spec, tmp_path)
    # one bond, two eigenstates, two discriminator modes
    assert len(rows) == 4
    for bond, state_index, mode, vqe_e, gan_e, infid in rows:
        assert state_index in (0, 1)
        assert mode in ("perfect", "adversarial")
        assert 0.0 <= infid <= 1.0
    assert (tmp_path / "vqe_learn.csv").exists()


def test_ssvqe_solve_outputs(tmp_path):
    spec = resolve_spec(
        {"hamiltonian": TINY_SSVQE_H, "iterations": 50}, "ssvqe-solve"
    )
    payload = run_ssvqe_solve(spec, tmp_path)
    assert payload["energies"][0] <= payload["energies"][1]
    # variational: computed energies sit at or above the exact ones
    assert payload["energies"][0] >= payload["exact_energies"][0] - 1e-9
    saved = json.loads((tmp_path / "ssvqe_solve.json").read_text())
    assert saved == payload
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["spec"]["experiment"] == "ssvqe-solve"
    assert "ssvqe_solve.json" in manifest["outputs"]


def test_infidelity_matches_final_fidelity(tmp_path):
    from eqgan.ansatz import AnsatzConfig
    from eqgan.experiments import _sub_seed, _train_config
    from eqgan.sources import sample_haar_state, state_family_source
    from eqgan.training import train_eqgan

    spec = resolve_spec(
        {
            "qubits": [2],
            "layers": [1],
            "entanglers": ["CZ"],
            "parametrized": [False],
            "states_per_cell": 1,
            "train": dict(TINY_TRAIN),
            "seed": 7,
        },
        "rand-state",
    )
    rows = run_rand_state(spec, tmp_path)
    seed = _sub_seed(7, 0, 0)
    rng = np.random.default_rng(seed)
    target = sample_haar_state(2, rng)
    source = state_family_source(target, rng, sigma=0.01, pool_size=100)
    from eqgan.experiments import _noise_model

    record = train_eqgan(
        source,
        AnsatzConfig(2, 1, "CZ"),
        _train_config(spec, "perfect", seed),
        _noise_model(spec),
    )
    assert rows[0][4] == pytest.approx(1.0 - record.fidelities[-1], abs=1e-12)
