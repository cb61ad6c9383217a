"""Gaussian over-rotation noise: every gate is followed by a small error gate.

Single-qubit gates get an error rotation about their own axis (RZ for H,
which has no rotation axis); two-qubit gates get the parametrized
equivalent of themselves at a small angle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sim import GateOp, Circuit, TWO_QUBIT_GATES


@dataclass(frozen=True)
class NoiseModel:
    single_qubit_mu: float = 0.06
    single_qubit_sigma: float = 0.02
    two_qubit_mu: float = 0.0
    two_qubit_sigma: float = 0.005
    enabled: bool = True

    def __post_init__(self):
        if self.single_qubit_sigma < 0 or self.two_qubit_sigma < 0:
            raise ValueError("noise sigmas must be >= 0")


_ERROR_KIND = {
    "RX": "RX",
    "RY": "RY",
    "RZ": "RZ",
    "H": "RZ",
    "CNOT": "PCNOT",
    "PCNOT": "PCNOT",
    "CZ": "PCZ",
    "PCZ": "PCZ",
    "ISWAP": "PISWAP",
    "PISWAP": "PISWAP",
}


def error_gate_for(gate: GateOp, epsilon: float) -> GateOp:
    """The over-rotation gate following ``gate``, with the error angle bound."""
    return GateOp(_ERROR_KIND[gate.kind], gate.qubits, angle=epsilon)


def sample_error_angle(gate: GateOp, model: NoiseModel, rng: np.random.Generator) -> float:
    if gate.kind in TWO_QUBIT_GATES:
        return float(rng.normal(model.two_qubit_mu, model.two_qubit_sigma))
    return float(rng.normal(model.single_qubit_mu, model.single_qubit_sigma))


def sample_error_gate(gate: GateOp, model: NoiseModel, rng: np.random.Generator) -> GateOp:
    """Sample the error gate that follows ``gate`` under ``model``."""
    if not model.enabled:
        raise ValueError("noise model is disabled")
    return error_gate_for(gate, sample_error_angle(gate, model, rng))


def sample_error_angles(
    circuit: Circuit, model: NoiseModel, rng: np.random.Generator
) -> np.ndarray:
    """One frozen error angle per op, in op order (for batched evaluation)."""
    if not model.enabled:
        raise ValueError("noise model is disabled")
    return np.array(
        [sample_error_angle(op, model, rng) for op in circuit.ops], dtype=float
    )
