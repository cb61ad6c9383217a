"""Layered generator ansatz: per layer, a Z-Y-Z Euler triple on every qubit
followed by nearest-neighbor entanglers on the open chain (0,1),(1,2),...

Parameter layout is layer-major; within a layer qubit-major [z, y, z] and
then the entangler angles by pair index (parametrized entanglers only).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sim import Circuit, GateOp

ENTANGLERS = ("CNOT", "CZ", "ISWAP")
_PARAM_OF = {"CNOT": "PCNOT", "CZ": "PCZ", "ISWAP": "PISWAP"}


@dataclass(frozen=True)
class AnsatzConfig:
    num_qubits: int
    num_layers: int
    entangler: str = "CNOT"
    parametrized_entangler: bool = False

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("need at least one qubit")
        if self.num_layers < 1:
            raise ValueError("need at least one layer")
        if self.entangler not in ENTANGLERS:
            raise ValueError(f"entangler must be one of {ENTANGLERS}")


def param_count(config: AnsatzConfig) -> int:
    """L * (3N + (N-1) if parametrized entanglers else 3N)."""
    per_layer = 3 * config.num_qubits
    if config.parametrized_entangler:
        per_layer += config.num_qubits - 1
    return config.num_layers * per_layer


def build_generator(config: AnsatzConfig) -> Circuit:
    n = config.num_qubits
    ops = []
    slot = 0
    for _ in range(config.num_layers):
        for q in range(n):
            ops.append(GateOp("RZ", (q,), slot=slot))
            ops.append(GateOp("RY", (q,), slot=slot + 1))
            ops.append(GateOp("RZ", (q,), slot=slot + 2))
            slot += 3
        for q in range(n - 1):
            if config.parametrized_entangler:
                ops.append(GateOp(_PARAM_OF[config.entangler], (q, q + 1), slot=slot))
                slot += 1
            else:
                ops.append(GateOp(config.entangler, (q, q + 1)))
    assert slot == param_count(config)
    return Circuit(n, tuple(ops), param_count=slot)


def init_params(config: AnsatzConfig, rng: np.random.Generator) -> np.ndarray:
    """Uniform angles in [0, 2*pi), one per symbolic slot."""
    return rng.uniform(0.0, 2.0 * np.pi, size=param_count(config))
