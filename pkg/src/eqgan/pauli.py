"""Real-weighted Pauli-string Hamiltonians: loading, expectations, spectra.

Pauli string index 0 acts on qubit 0 (little-endian, matching the simulator).
Hamiltonian files are JSON:
{ "name": str, "num_qubits": int, "bond_length_angstrom": float (optional),
  "terms": [ { "coeff": number, "pauli": "IXYZ..." } ] }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import reduce
from typing import Optional

import numpy as np

from .sim import SimulationError, StateVector

_PAULI_CHARS = set("IXYZ")
_P = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
}


class HamiltonianError(ValueError):
    """Raised for malformed Hamiltonian data."""


@dataclass(frozen=True)
class PauliSum:
    num_qubits: int
    terms: tuple  # of (coeff: float, pauli: str)

    def __post_init__(self):
        merged = {}
        for coeff, pauli in self.terms:
            if not isinstance(pauli, str) or len(pauli) != self.num_qubits:
                raise HamiltonianError(
                    f"pauli string {pauli!r} must have length {self.num_qubits}"
                )
            if not set(pauli) <= _PAULI_CHARS:
                raise HamiltonianError(f"invalid pauli string {pauli!r}")
            coeff = float(coeff)
            if not math.isfinite(coeff):
                raise HamiltonianError(f"non-finite coefficient for {pauli!r}")
            merged[pauli] = merged.get(pauli, 0.0) + coeff
        object.__setattr__(
            self, "terms", tuple((c, p) for p, c in merged.items())
        )


def load_hamiltonian(source) -> PauliSum:
    """Load a PauliSum from a file path, file object, or parsed dict."""
    if isinstance(source, dict):
        data = source
    elif hasattr(source, "read"):
        data = json.load(source)
    else:
        with open(source) as fh:
            data = json.load(fh)
    try:
        n = int(data["num_qubits"])
        terms = [(t["coeff"], t["pauli"]) for t in data["terms"]]
    except (KeyError, TypeError) as exc:
        raise HamiltonianError(f"malformed hamiltonian data: {exc}") from exc
    if n < 1:
        raise HamiltonianError("num_qubits must be >= 1")
    return PauliSum(n, tuple(terms))


def apply_pauli_string(amps: np.ndarray, pauli: str, n: int) -> np.ndarray:
    """P|psi> for one Pauli word, via bit flips and phases."""
    flip = 0
    idx = np.arange(2**n)
    phase = np.ones(2**n, dtype=complex)
    for q, ch in enumerate(pauli):
        bit = (idx >> q) & 1
        if ch == "X":
            flip |= 1 << q
        elif ch == "Y":
            flip |= 1 << q
            phase = phase * np.where(bit == 0, 1j, -1j)
        elif ch == "Z":
            phase = phase * np.where(bit == 0, 1.0, -1.0)
    out = np.zeros_like(amps)
    out[idx ^ flip] = amps * phase
    return out


def expectation(state: StateVector, h: PauliSum) -> float:
    """<state| H |state>; the residual imaginary part must vanish."""
    if state.num_qubits != h.num_qubits:
        raise SimulationError("state/hamiltonian qubit count mismatch")
    amps = state.amplitudes
    total = 0.0 + 0.0j
    for coeff, pauli in h.terms:
        total += coeff * np.vdot(amps, apply_pauli_string(amps, pauli, h.num_qubits))
    if abs(total.imag) > 1e-10:
        raise SimulationError(f"expectation not real: {total}")
    return float(total.real)


def to_matrix(h: PauliSum) -> np.ndarray:
    """Dense 2^N x 2^N Hermitian matrix of the Pauli sum."""
    dim = 2**h.num_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for coeff, pauli in h.terms:
        # little-endian: qubit 0 is the last kron factor
        factors = [_P[pauli[q]] for q in reversed(range(h.num_qubits))]
        mat += coeff * reduce(np.kron, factors)
    return mat


def exact_spectrum(h: PauliSum, k: Optional[int] = None) -> np.ndarray:
    """The k lowest eigenvalues (ascending) by dense diagonalization."""
    if h.num_qubits > 8:
        raise HamiltonianError("exact_spectrum supports at most 8 qubits")
    vals = np.linalg.eigvalsh(to_matrix(h))
    return vals if k is None else vals[:k]
