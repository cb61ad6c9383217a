"""Experiment harness: configures, runs, aggregates and serializes the
three benchmark experiments plus the SSVQE solver.

Every experiment resolves a JSON spec (missing keys filled with desk-scale
defaults), derives all randomness from the master seed, and writes one CSV
(or JSON) plus a manifest. Reruns with the same spec and seed are
byte-identical.
"""

from __future__ import annotations

import csv
import importlib.resources
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ansatz import AnsatzConfig, build_generator
from .noise import NoiseModel
from .pauli import exact_spectrum, expectation, load_hamiltonian
from .sim import apply_circuit, basis_state, fidelity, run_circuit
from .sources import (
    fixed_circuit_source,
    param_family_source,
    random_circuit_params,
    sample_haar_state,
    state_family_source,
)
from .ssvqe import SSVQEConfig, ssvqe_train
from .training import TrainConfig, train_eqgan

EXPERIMENTS = ("rand2q", "vqe-learn", "rand-state", "ssvqe-solve")


class SpecError(ValueError):
    """Raised when an experiment spec fails validation (CLI exit code 2)."""


def shipped_hamiltonian_paths() -> list:
    """The H2 Hamiltonian files bundled with the package, sorted by bond length."""
    root = importlib.resources.files("eqgan") / "data"
    return sorted(str(p) for p in root.iterdir() if p.name.endswith(".json"))


# ---------------------------------------------------------------------------
# spec handling

_TRAIN_DEFAULTS = {
    "episodes": 80,
    "batch_size": 4,
    "lr_generator": 0.01,
    "lr_discriminator": 0.01,
    "gradient_mode": "parameter_shift",
}
_NOISE_DEFAULTS = {
    "enabled": True,
    "sq_mu": 0.06,
    "sq_sigma": 0.02,
    "tq_mu": 0.0,
    "tq_sigma": 0.005,
}


def _merge(defaults: dict, given, what: str) -> dict:
    out = dict(defaults)
    if given is None:
        return out
    if not isinstance(given, dict):
        raise SpecError(f"{what} section must be an object")
    unknown = set(given) - set(defaults)
    if unknown:
        raise SpecError(f"unknown {what} keys: {sorted(unknown)}")
    out.update(given)
    return out


def resolve_spec(
    data: dict, experiment: str, seed=None, paper_scale: bool = False
) -> dict:
    """Fill desk-scale defaults and validate; returns the fully resolved spec."""
    if experiment not in EXPERIMENTS:
        raise SpecError(f"unknown experiment {experiment!r}")
    if not isinstance(data, dict):
        raise SpecError("spec must be a JSON object")
    if "experiment" in data and data["experiment"] != experiment:
        raise SpecError(
            f"spec is for {data['experiment']!r}, requested {experiment!r}"
        )
    spec = {"experiment": experiment}
    spec["seed"] = int(data.get("seed", 0) if seed is None else seed)
    spec["train"] = _merge(_TRAIN_DEFAULTS, data.get("train"), "train")
    spec["noise"] = _merge(_NOISE_DEFAULTS, data.get("noise"), "noise")
    known = {"experiment", "seed", "train", "noise"}

    if experiment == "rand2q":
        spec["samples"] = int(data.get("samples", 10000 if paper_scale else 200))
        known |= {"samples", "ansatz"}
        ansatz = _merge(
            {"num_qubits": 2, "num_layers": 1, "entangler": "CZ",
             "parametrized_entangler": False},
            data.get("ansatz"),
            "ansatz",
        )
        if (ansatz["num_qubits"], ansatz["num_layers"], ansatz["entangler"]) != (
            2, 1, "CZ",
        ):
            raise SpecError("rand2q requires the 2-qubit 1-layer CZ layout")
        spec["ansatz"] = ansatz
        if spec["samples"] < 1:
            raise SpecError("samples must be >= 1")
    elif experiment == "vqe-learn":
        spec["hamiltonians"] = list(
            data.get("hamiltonians", shipped_hamiltonian_paths())
        )
        spec["num_layers"] = int(data.get("num_layers", 3))
        spec["entangler"] = data.get("entangler", "CNOT")
        spec["sigma"] = float(data.get("sigma", 0.01))
        spec["pool_size"] = int(data.get("pool_size", 100))
        spec["ssvqe_iterations"] = int(data.get("ssvqe_iterations", 500))
        known |= {
            "hamiltonians", "num_layers", "entangler", "sigma", "pool_size",
            "ssvqe_iterations",
        }
        if not spec["hamiltonians"]:
            raise SpecError("vqe-learn needs at least one hamiltonian file")
        missing = [p for p in spec["hamiltonians"] if not Path(p).exists()]
        if missing:
            raise SpecError(f"hamiltonian files not found: {missing}")
    elif experiment == "rand-state":
        spec["qubits"] = list(data.get("qubits", [2, 4, 6]))
        spec["layers"] = list(data.get("layers", [1, 2, 3, 4, 5]))
        spec["entanglers"] = list(data.get("entanglers", ["CNOT", "CZ", "ISWAP"]))
        spec["parametrized"] = list(data.get("parametrized", [False, True]))
        spec["states_per_cell"] = int(
            data.get("states_per_cell", 200 if paper_scale else 20)
        )
        spec["disc_mode"] = data.get("disc_mode", "perfect")
        spec["sigma"] = float(data.get("sigma", 0.01))
        spec["pool_size"] = int(data.get("pool_size", 100))
        known |= {
            "qubits", "layers", "entanglers", "parametrized", "states_per_cell",
            "disc_mode", "sigma", "pool_size",
        }
        if spec["states_per_cell"] < 1:
            raise SpecError("states_per_cell must be >= 1")
        if any(q not in (2, 3, 4, 5, 6) for q in spec["qubits"]):
            raise SpecError("rand-state qubit counts must be in 2..6")
        if any(l < 1 for l in spec["layers"]):
            raise SpecError("layer counts must be >= 1")
        if spec["disc_mode"] not in ("perfect", "adversarial"):
            raise SpecError("disc_mode must be perfect or adversarial")
    else:  # ssvqe-solve
        if "hamiltonian" not in data:
            raise SpecError("ssvqe-solve needs a 'hamiltonian' file path")
        spec["hamiltonian"] = data["hamiltonian"]
        spec["num_layers"] = int(data.get("num_layers", 3))
        spec["entangler"] = data.get("entangler", "CNOT")
        spec["iterations"] = int(data.get("iterations", 500))
        known |= {"hamiltonian", "num_layers", "entangler", "iterations"}
        if not Path(spec["hamiltonian"]).exists():
            raise SpecError(f"hamiltonian file not found: {spec['hamiltonian']}")

    unknown = set(data) - known
    if unknown:
        raise SpecError(f"unknown spec keys: {sorted(unknown)}")
    try:
        _train_config(spec, mode="perfect", seed=0)
        _noise_model(spec)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    return spec


def _train_config(spec: dict, mode: str, seed: int) -> TrainConfig:
    t = spec["train"]
    return TrainConfig(
        episodes=int(t["episodes"]),
        batch_size=int(t["batch_size"]),
        lr_generator=float(t["lr_generator"]),
        lr_discriminator=float(t["lr_discriminator"]),
        discriminator_mode=mode,
        seed=seed,
        gradient_mode=t["gradient_mode"],
    )


def _noise_model(spec: dict):
    nz = spec["noise"]
    if not nz["enabled"]:
        return None
    return NoiseModel(
        single_qubit_mu=float(nz["sq_mu"]),
        single_qubit_sigma=float(nz["sq_sigma"]),
        two_qubit_mu=float(nz["tq_mu"]),
        two_qubit_sigma=float(nz["tq_sigma"]),
        enabled=True,
    )


def _sub_seed(master: int, *idx) -> int:
    return int(np.random.SeedSequence([master, *idx]).generate_state(1)[0])


# ---------------------------------------------------------------------------
# summaries

@dataclass
class SummaryStats:
    mean: float
    mode: float
    bin_edges: np.ndarray
    counts: np.ndarray

    def to_dict(self) -> dict:
        return {
            "mean": float(self.mean),
            "mode": float(self.mode),
            "bin_edges": [float(x) for x in self.bin_edges],
            "counts": [int(c) for c in self.counts],
        }


def summarize(records) -> SummaryStats:
    """Mean plus histogram (bin width 0.01 over [0, 1]) and its mode.

    The mode is the center of the most populated bin; ties break toward
    higher fidelity.
    """
    values = np.asarray(list(records), dtype=float)
    if values.size == 0:
        raise ValueError("cannot summarize an empty record list")
    edges = np.linspace(0.0, 1.0, 101)
    counts, _ = np.histogram(np.clip(values, 0.0, 1.0), bins=edges)
    idx = len(counts) - 1 - int(np.argmax(counts[::-1]))
    mode = (edges[idx] + edges[idx + 1]) / 2
    return SummaryStats(float(values.mean()), float(mode), edges, counts)


# ---------------------------------------------------------------------------
# output plumbing

def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out: Path, spec: dict, outputs):
    _write_json(
        out / "manifest.json",
        {"spec": spec, "outputs": sorted(outputs)},
    )


def _progress(msg: str, verbose: bool):
    if verbose:
        print(msg, file=sys.stderr, flush=True)


# ---------------------------------------------------------------------------
# experiments

def run_rand2q(spec: dict, out_dir, verbose: bool = False) -> dict:
    """Learn random fixed two-qubit circuits with both discriminators."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    master = spec["seed"]
    noise = _noise_model(spec)
    a = spec["ansatz"]
    config = AnsatzConfig(
        a["num_qubits"], a["num_layers"], a["entangler"], a["parametrized_entangler"]
    )
    circuit = build_generator(config)

    rows = []
    finals = {"perfect": [], "adversarial": []}
    for run_id in range(spec["samples"]):
        sample_seed = _sub_seed(master, run_id)
        theta_star = random_circuit_params(
            config, np.random.default_rng(sample_seed)
        )
        source = fixed_circuit_source(circuit, theta_star, noise=noise)
        for mode_idx, mode in enumerate(("perfect", "adversarial")):
            train_seed = _sub_seed(master, run_id, mode_idx)
            record = train_eqgan(
                source, config, _train_config(spec, mode, train_seed), noise
            )
            rows.append(
                [
                    run_id,
                    train_seed,
                    mode,
                    record.fidelities[-1],
                    record.best_fidelity,
                    spec["train"]["episodes"],
                ]
            )
            finals[mode].append(record.fidelities[-1])
        if (run_id + 1) % 20 == 0:
            _progress(f"rand2q: {run_id + 1}/{spec['samples']} samples", verbose)

    rows.sort(key=lambda r: (r[0], r[2]))
    _write_csv(
        out / "rand2q.csv",
        ["run_id", "seed", "mode", "final_fidelity", "best_fidelity", "episodes"],
        rows,
    )
    summaries = {m: summarize(v).to_dict() for m, v in finals.items()}
    _write_json(out / "rand2q_summary.json", summaries)
    _write_manifest(out, spec, ["rand2q.csv", "rand2q_summary.json"])
    return summaries


def run_vqe_learn(spec: dict, out_dir, verbose: bool = False) -> list:
    """SSVQE the shipped Hamiltonians, then learn each eigenstate circuit."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    master = spec["seed"]
    noise = _noise_model(spec)

    rows = []
    qubit_counts = set()
    for h_idx, path in enumerate(spec["hamiltonians"]):
        h = load_hamiltonian(path)
        qubit_counts.add(h.num_qubits)
        if len(qubit_counts) > 1:
            raise SpecError("hamiltonian files must share one qubit count")
        with open(path) as fh:
            bond = json.load(fh).get("bond_length_angstrom", float(h_idx))
        config = AnsatzConfig(h.num_qubits, spec["num_layers"], spec["entangler"])
        vqe = ssvqe_train(
            h,
            config,
            SSVQEConfig(iterations=spec["ssvqe_iterations"]),
            seed=_sub_seed(master, h_idx),
        )
        exact = exact_spectrum(h, 2)
        circuit = build_generator(config)
        for state_index in (0, 1):
            input_index = vqe.input_order[state_index]
            vqe_state = apply_circuit(
                basis_state(h.num_qubits, input_index), circuit, vqe.theta
            )
            source = param_family_source(
                circuit,
                vqe.theta,
                np.random.default_rng(_sub_seed(master, h_idx, state_index)),
                sigma=spec["sigma"],
                pool_size=spec["pool_size"],
                noise=noise,
                input_index=input_index,
            )
            for mode_idx, mode in enumerate(("perfect", "adversarial")):
                record = train_eqgan(
                    source,
                    config,
                    _train_config(
                        spec, mode, _sub_seed(master, h_idx, state_index, mode_idx)
                    ),
                    noise,
                )
                gan_state = run_circuit(circuit, record.final_theta_g)
                rows.append(
                    [
                        bond,
                        state_index,
                        mode,
                        vqe.energies[state_index],
                        expectation(gan_state, h),
                        1.0 - fidelity(gan_state, vqe_state),
                    ]
                )
        assert vqe.energies[0] >= exact[0] - 1e-9, "variational bound violated"
        _progress(
            f"vqe-learn: bond {bond} done ({h_idx + 1}/{len(spec['hamiltonians'])})",
            verbose,
        )

    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    _write_csv(
        out / "vqe_learn.csv",
        ["bond_length", "state_index", "disc_mode", "ssvqe_energy", "gan_energy",
         "infidelity"],
        rows,
    )
    _write_manifest(out, spec, ["vqe_learn.csv"])
    return rows


def run_rand_state(spec: dict, out_dir, verbose: bool = False) -> list:
    """Mean infidelity over the (qubits x gate x parametrized x layers) grid."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    master = spec["seed"]
    noise = _noise_model(spec)

    rows = []
    cells = [
        (q, gate, par, layers)
        for q in spec["qubits"]
        for gate in spec["entanglers"]
        for par in spec["parametrized"]
        for layers in spec["layers"]
    ]
    for cell_idx, (q, gate, par, layers) in enumerate(cells):
        config = AnsatzConfig(q, layers, gate, par)
        infids = []
        for s in range(spec["states_per_cell"]):
            seed = _sub_seed(master, cell_idx, s)
            rng = np.random.default_rng(seed)
            target = sample_haar_state(q, rng)
            source = state_family_source(
                target, rng, sigma=spec["sigma"], pool_size=spec["pool_size"]
            )
            record = train_eqgan(
                source, config, _train_config(spec, spec["disc_mode"], seed), noise
            )
            infids.append(1.0 - record.fidelities[-1])
        infids = np.array(infids)
        stderr = (
            float(infids.std(ddof=1) / np.sqrt(len(infids))) if len(infids) > 1 else 0.0
        )
        rows.append(
            [q, gate, int(par), layers, float(infids.mean()), stderr, len(infids)]
        )
        _progress(
            f"rand-state: cell {cell_idx + 1}/{len(cells)} "
            f"(q={q} {gate} par={par} L={layers}) mean={infids.mean():.4f}",
            verbose,
        )

    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    _write_csv(
        out / "rand_state.csv",
        ["qubits", "gate", "parametrized", "layers", "mean_infidelity", "stderr",
         "n_states"],
        rows,
    )
    _write_manifest(out, spec, ["rand_state.csv"])
    return rows


def run_ssvqe_solve(spec: dict, out_dir, verbose: bool = False) -> dict:
    """Solve one Hamiltonian file; writes energies and parameters for reuse."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    h = load_hamiltonian(spec["hamiltonian"])
    config = AnsatzConfig(h.num_qubits, spec["num_layers"], spec["entangler"])
    result = ssvqe_train(
        h, config, SSVQEConfig(iterations=spec["iterations"]), seed=spec["seed"]
    )
    exact = exact_spectrum(h, 2)
    payload = {
        "hamiltonian": str(spec["hamiltonian"]),
        "num_qubits": h.num_qubits,
        "num_layers": spec["num_layers"],
        "entangler": spec["entangler"],
        "energies": [float(e) for e in result.energies],
        "exact_energies": [float(e) for e in exact],
        "energy_gaps_to_exact": [
            float(e - x) for e, x in zip(result.energies, exact)
        ],
        "input_order": [int(i) for i in result.input_order],
        "objective": float(result.objective),
        "theta_vqe": [float(x) for x in result.theta],
    }
    _write_json(out / "ssvqe_solve.json", payload)
    _write_manifest(out, spec, ["ssvqe_solve.json"])
    return payload


RUNNERS = {
    "rand2q": run_rand2q,
    "vqe-learn": run_vqe_learn,
    "rand-state": run_rand_state,
    "ssvqe-solve": run_ssvqe_solve,
}
