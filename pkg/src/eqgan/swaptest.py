"""Destructive SWAP-test discriminator, perfect and parametrized.

Register layout on the 2N-qubit test circuit: real-state qubits are
0..N-1 (low bits), generated-state qubits are N..2N-1 (high bits), and
pair i couples qubits (i, N+i).

The score is D = E[prod_i (1 - 2 * (a_i AND b_i))] over Z-measurement
bits (a_i, b_i) of pair i, computed exactly from the output distribution
unless a shot count is given. For the perfect test on noiseless inputs
this equals |<real|gen>|^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .sim import (
    Circuit,
    GateOp,
    SimulationError,
    StateVector,
    apply_circuit,
    gate_matrix,
)
from .noise import sample_error_angles, error_gate_for


@dataclass(frozen=True)
class SwapTestConfig:
    num_data_qubits: int
    mode: str = "perfect"
    theta_d: np.ndarray = field(default_factory=lambda: np.zeros(0))
    shots: Optional[int] = None

    def __post_init__(self):
        if self.mode not in ("perfect", "parametrized"):
            raise ValueError(f"unknown swap-test mode {self.mode!r}")
        theta = np.asarray(self.theta_d, dtype=float)
        object.__setattr__(self, "theta_d", theta)
        want = 2 * self.num_data_qubits if self.mode == "parametrized" else 0
        if theta.shape != (want,):
            raise ValueError(
                f"{self.mode} mode carries {want} angles, got {theta.shape}"
            )
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1 when given")


def build_perfect_swap(n: int) -> Circuit:
    """Per pair: CNOT controlled on the generated qubit, then H on it."""
    if n < 1:
        raise ValueError("need at least one data qubit")
    ops = []
    for i in range(n):
        ops.append(GateOp("CNOT", (n + i, i)))
        ops.append(GateOp("H", (n + i,)))
    return Circuit(2 * n, tuple(ops))


def build_parametrized_swap(n: int) -> Circuit:
    """Trainable variant; at theta = 0 it reduces to the perfect test."""
    if n < 1:
        raise ValueError("need at least one data qubit")
    ops = []
    for i in range(n):
        ops.append(GateOp("H", (i,)))
        ops.append(GateOp("RZ", (i,), slot=2 * i))
        ops.append(GateOp("CZ", (i, n + i)))
        ops.append(GateOp("RZ", (i,), slot=2 * i + 1))
        ops.append(GateOp("H", (i,)))
        ops.append(GateOp("H", (n + i,)))
    return Circuit(2 * n, tuple(ops), param_count=2 * n)


def _test_circuit(config: SwapTestConfig):
    if config.mode == "perfect":
        return build_perfect_swap(config.num_data_qubits), np.zeros(0)
    return build_parametrized_swap(config.num_data_qubits), config.theta_d


def sign_vector(n: int) -> np.ndarray:
    """(-1)**popcount(a AND b) over all 2n-bit outcomes, pairs (i, n+i)."""
    z = np.arange(4**n)
    overlap = (z & ((1 << n) - 1)) & (z >> n)
    pop = np.array([bin(int(x)).count("1") for x in overlap])
    return np.where(pop % 2 == 0, 1.0, -1.0)


def combined_state(real: StateVector, gen: StateVector) -> StateVector:
    if real.num_qubits != gen.num_qubits:
        raise SimulationError("real/generated qubit count mismatch")
    # real occupies the low bits, so it is the second kron factor
    return StateVector(
        2 * real.num_qubits, np.kron(gen.amplitudes, real.amplitudes)
    )


def discriminator_score(
    real: StateVector,
    gen: StateVector,
    config: SwapTestConfig,
    noise=None,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Run the chosen test on real (x) gen and score the outcome bits."""
    n = config.num_data_qubits
    if real.num_qubits != n or gen.num_qubits != n:
        raise SimulationError("state size does not match the test config")
    circuit, params = _test_circuit(config)
    out = apply_circuit(combined_state(real, gen), circuit, params, noise, rng)
    probs = np.abs(out.amplitudes) ** 2
    signs = sign_vector(n)
    if config.shots is None:
        return float(probs @ signs)
    if rng is None:
        raise SimulationError("shot sampling requires an rng")
    draws = rng.choice(len(probs), size=config.shots, p=probs / probs.sum())
    return float(signs[draws].mean())


def estimate_overlap_from_bits(bitstrings) -> float:
    """Mean of prod_i (1 - 2 * (a_i AND b_i)) over measured 2N-bit outcomes.

    ``bitstrings`` is a sequence of 2N-bit rows; column k is qubit k.
    """
    bits = np.asarray(bitstrings, dtype=int)
    if bits.ndim != 2 or bits.shape[0] == 0 or bits.shape[1] % 2 != 0:
        raise ValueError("expected a nonempty list of 2N-bit outcomes")
    n = bits.shape[1] // 2
    both = bits[:, :n] & bits[:, n:]
    return float(np.prod(1 - 2 * both, axis=1).mean())


# ---------------------------------------------------------------------------
# pair-factored fast path
#
# Both test circuits act pair-locally, so U_D = (x)_i V_i and the scored
# observable O = (x)_i diag(1,1,1,-1). Conjugating and tracing out the real
# state once gives a 2^N x 2^N matrix M with D = <gen| M |gen>, which makes
# repeated scoring against one real state cheap (used by the trainer).

_SWAP_SYMMETRIC = frozenset({"CZ", "PCZ", "ISWAP", "PISWAP"})
_I2 = np.eye(2, dtype=complex)


def _local_matrix(op: GateOp, local: dict) -> np.ndarray:
    mat = gate_matrix(op.kind, op.angle)
    if len(op.qubits) == 1:
        q = local[op.qubits[0]]
        return np.kron(mat, _I2) if q == 1 else np.kron(_I2, mat)
    a, b = (local[q] for q in op.qubits)
    if (a, b) == (1, 0):
        return mat  # matrix index 2*b_first + b_second matches 2*b1 + b0
    assert op.kind in _SWAP_SYMMETRIC, "asymmetric gate in swapped orientation"
    return mat


#: local (qubit0 = real, qubit1 = generated) op templates for one pair
_PERFECT_PAIR_OPS = (("CNOT", (1, 0)), ("H", (1,)))
_PARAM_PAIR_OPS = (
    ("H", (0,)), ("RZ", (0,)), ("CZ", (0, 1)), ("RZ", (0,)), ("H", (0,)),
    ("H", (1,)),
)
_OBS_PAIR = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def pair_observable(mode: str, angles, errs=None) -> np.ndarray:
    """W = V'.O.V for one pair, V its slice of the test circuit.

    ``angles`` holds the pair's two RZ angles (parametrized mode only);
    ``errs`` is one error angle per template op, or None for noiseless.
    """
    templates = _PERFECT_PAIR_OPS if mode == "perfect" else _PARAM_PAIR_OPS
    v = np.eye(4, dtype=complex)
    slot = 0
    local = {0: 0, 1: 1}
    for idx, (kind, qubits) in enumerate(templates):
        if kind == "RZ":
            op = GateOp(kind, qubits, angle=float(angles[slot]))
            slot += 1
        else:
            op = GateOp(kind, qubits)
        v = _local_matrix(op, local) @ v
        if errs is not None:
            err = error_gate_for(op, float(errs[idx]))
            v = _local_matrix(err, local) @ v
    return v.conj().T @ _OBS_PAIR @ v


def pair_observables(
    config: SwapTestConfig, error_angles: Optional[np.ndarray] = None
) -> list:
    """One conjugated observable per pair, noise realization folded in."""
    n = config.num_data_qubits
    per_pair = 2 if config.mode == "perfect" else 6
    out = []
    for i in range(n):
        errs = (
            None
            if error_angles is None
            else error_angles[per_pair * i : per_pair * (i + 1)]
        )
        out.append(
            pair_observable(config.mode, config.theta_d[2 * i : 2 * i + 2], errs)
        )
    return out


def reduced_observable(
    real: StateVector,
    config: SwapTestConfig,
    noise=None,
    rng: Optional[np.random.Generator] = None,
    error_angles: Optional[np.ndarray] = None,
) -> np.ndarray:
    """M with discriminator_score(real, gen) == Re <gen|M|gen> (exact mode)."""
    n = config.num_data_qubits
    if real.num_qubits != n:
        raise SimulationError("state size does not match the test config")
    if error_angles is None and noise is not None and noise.enabled:
        circuit, _ = _test_circuit(config)
        error_angles = sample_error_angles(circuit, noise, rng)
    ws = pair_observables(config, error_angles)
    return reduce_pairs(real_density(real), ws)


def real_density(real: StateVector) -> np.ndarray:
    """rho[r, r'] = conj(real[r]) * real[r'], the input to reduce_pairs."""
    return np.outer(real.amplitudes.conj(), real.amplitudes)


def reduce_pairs(rho: np.ndarray, ws: list) -> np.ndarray:
    """Contract the real-state density against the pair observables."""
    return _pair_reduce(rho, ws, len(ws))


def _pair_reduce(rho: np.ndarray, ws: list, n: int) -> np.ndarray:
    # Interleave (r, r') bits into base-4 digits, apply each pair's map as a
    # 4x4 matrix on its digit, and de-interleave into (g, g') indices.
    t = rho.reshape((2,) * (2 * n))
    perm = []
    for j in range(n):
        perm += [n + j, j]
    v = t.transpose(perm).reshape(4**n)
    for i, w in enumerate(ws):
        k = w.reshape(2, 2, 2, 2).transpose(2, 0, 3, 1).reshape(4, 4)
        tv = v.reshape((4,) * n)
        axis = n - 1 - i
        tv = np.moveaxis(tv, axis, 0).reshape(4, -1)
        tv = k @ tv
        tv = np.moveaxis(tv.reshape((4,) + (4,) * (n - 1)), 0, axis)
        v = tv.reshape(4**n)
    t = v.reshape((2,) * (2 * n)).transpose(np.argsort(perm))
    return t.reshape(2**n, 2**n)


def score_from_reduced(gen_amps: np.ndarray, reduced: np.ndarray) -> np.ndarray:
    """Scores for a batch of generated states against one reduced observable."""
    gen_amps = np.atleast_2d(gen_amps)
    return np.sum(gen_amps.conj() * (gen_amps @ reduced.T), axis=1).real
