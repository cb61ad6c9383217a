"""Subspace-search VQE for the two lowest eigenstates of a Pauli-sum
Hamiltonian, sharing the layered ansatz with the generator.

The two orthogonal computational inputs |0...0> and |0...01> are mapped
through one circuit; the weighted objective w0 * E(in=0) + w1 * E(in=1)
with w0 > w1 > 0 pushes the heavier-weighted input to the ground state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import AnsatzConfig, build_generator, init_params
from .pauli import PauliSum, expectation
from .sim import SimulationError, apply_circuit, basis_state
from .training import AdamState, adam_step, gradient, shiftable_slots

INPUT_INDICES = (0, 1)


@dataclass(frozen=True)
class SSVQEConfig:
    weights: tuple = (1.0, 0.5)
    iterations: int = 500
    learning_rate: float = 0.01
    gradient_mode: str = "parameter_shift"

    def __post_init__(self):
        w0, w1 = self.weights
        if not w0 > w1 > 0:
            raise ValueError("weights must satisfy w0 > w1 > 0")
        if self.iterations < 1 or self.learning_rate <= 0:
            raise ValueError("bad optimizer settings")


@dataclass
class SSVQEResult:
    theta: np.ndarray
    energies: tuple  # (E0, E1), ascending
    input_order: tuple  # input basis indices mapped to (ground, excited)
    objective: float


def _input_energies(theta, h: PauliSum, circuit) -> tuple:
    out = []
    for idx in INPUT_INDICES:
        state = apply_circuit(basis_state(h.num_qubits, idx), circuit, theta)
        out.append(expectation(state, h))
    return tuple(out)


def ssvqe_objective(
    theta, h: PauliSum, config: SSVQEConfig, ansatz: AnsatzConfig
) -> float:
    """w0 * <in0|U'HU|in0> + w1 * <in1|U'HU|in1>."""
    if ansatz.num_qubits != h.num_qubits:
        raise SimulationError("ansatz/hamiltonian qubit count mismatch")
    circuit = build_generator(ansatz)
    e0, e1 = _input_energies(np.asarray(theta, dtype=float), h, circuit)
    w0, w1 = config.weights
    return w0 * e0 + w1 * e1


def ssvqe_train(
    h: PauliSum,
    ansatz: AnsatzConfig,
    config: SSVQEConfig = SSVQEConfig(),
    seed: int = 0,
) -> SSVQEResult:
    """Adam-minimize the weighted objective; returns theta and both energies."""
    if ansatz.num_qubits != h.num_qubits:
        raise SimulationError("ansatz/hamiltonian qubit count mismatch")
    rng = np.random.default_rng(seed)
    circuit = build_generator(ansatz)
    theta = init_params(ansatz, rng)
    state = AdamState.zeros(len(theta))
    mask = shiftable_slots(circuit)
    w0, w1 = config.weights

    def objective(t):
        e0, e1 = _input_energies(t, h, circuit)
        return w0 * e0 + w1 * e1

    for _ in range(config.iterations):
        grad = gradient(objective, theta, config.gradient_mode, mask)
        theta, state = adam_step(theta, grad, state, config.learning_rate)

    e_in = _input_energies(theta, h, circuit)
    order = tuple(np.argsort(e_in))
    energies = (e_in[order[0]], e_in[order[1]])
    return SSVQEResult(theta, energies, order, objective(theta))
