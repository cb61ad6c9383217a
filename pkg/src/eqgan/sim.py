"""Dense statevector simulator for small circuits.

Conventions (fixed once, used everywhere):

* Little-endian qubit ordering: bit k of a basis index is qubit k.
* Rotations are RP(theta) = exp(-i * theta * P / 2) for P in {X, Y, Z}.
* Two-qubit gate matrices are indexed by 2*b_first + b_second, where
  ``first`` is qubits[0] of the gate (the control for CNOT/PCNOT).
* Parametrized entanglers are one-parameter groups reducing to their
  fixed counterparts at the nominal angle:
  PCZ(pi) = CZ, PCNOT(pi) = CNOT, PISWAP(pi/2) = ISWAP.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

MAX_QUBITS = 13

FIXED_GATES = frozenset({"H", "CNOT", "CZ", "ISWAP"})
ROTATION_GATES = frozenset({"RX", "RY", "RZ"})
PARAM_ENTANGLERS = frozenset({"PCNOT", "PCZ", "PISWAP"})
PARAM_GATES = ROTATION_GATES | PARAM_ENTANGLERS
TWO_QUBIT_GATES = frozenset({"CNOT", "CZ", "ISWAP", "PCNOT", "PCZ", "PISWAP"})

#: nominal angle at which each parametrized entangler equals its fixed gate
NOMINAL_ANGLE = {"PCNOT": np.pi, "PCZ": np.pi, "PISWAP": np.pi / 2}


class SimulationError(ValueError):
    """Raised on malformed circuits, states or bindings."""


@dataclass(frozen=True)
class StateVector:
    """Pure state of ``num_qubits`` qubits as 2**n complex amplitudes."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise SimulationError(
                f"qubit count must be in [1, {MAX_QUBITS}], got {self.num_qubits}"
            )
        if amps.shape != (2**self.num_qubits,):
            raise SimulationError(
                f"expected {2**self.num_qubits} amplitudes, got {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class GateOp:
    """One gate application: fixed, fixed-angle, or bound to a symbolic slot."""

    kind: str
    qubits: tuple
    angle: Optional[float] = None
    slot: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if self.kind in FIXED_GATES:
            expected = 2 if self.kind in TWO_QUBIT_GATES else 1
            if self.angle is not None or self.slot is not None:
                raise SimulationError(f"{self.kind} carries no parameter")
        elif self.kind in PARAM_GATES:
            expected = 2 if self.kind in TWO_QUBIT_GATES else 1
            if (self.angle is None) == (self.slot is None):
                raise SimulationError(
                    f"{self.kind} needs exactly one of angle or slot"
                )
        else:
            raise SimulationError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != expected:
            raise SimulationError(
                f"{self.kind} acts on {expected} qubit(s), got {self.qubits}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise SimulationError(f"duplicate qubit indices in {self.qubits}")


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list with ``param_count`` symbolic parameter slots."""

    num_qubits: int
    ops: tuple
    param_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            for q in op.qubits:
                if not 0 <= q < self.num_qubits:
                    raise SimulationError(
                        f"qubit index {q} out of range for {self.num_qubits} qubits"
                    )
            if op.slot is not None and not 0 <= op.slot < self.param_count:
                raise SimulationError(
                    f"slot {op.slot} out of range for param_count {self.param_count}"
                )


# ---------------------------------------------------------------------------
# gate matrices

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_ISWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def gate_matrix(kind: str, angle: Optional[float] = None) -> np.ndarray:
    """Unitary matrix of a gate kind, with ``angle`` bound if parametrized."""
    if kind in FIXED_GATES:
        if angle is not None:
            raise SimulationError(f"{kind} takes no angle")
        return {"H": _H, "CNOT": _CNOT, "CZ": _CZ, "ISWAP": _ISWAP}[kind]
    if angle is None:
        raise SimulationError(f"{kind} needs an angle")
    return gate_matrices(kind, np.array([angle]))[0]


def gate_matrices(kind: str, angles: np.ndarray) -> np.ndarray:
    """Batch of matrices, shape (len(angles), d, d), for one parametrized kind."""
    angles = np.asarray(angles, dtype=float)
    b = angles.shape[0]
    half = angles / 2
    c, s = np.cos(half), np.sin(half)
    if kind == "RX":
        out = np.zeros((b, 2, 2), dtype=complex)
        out[:, 0, 0] = out[:, 1, 1] = c
        out[:, 0, 1] = out[:, 1, 0] = -1j * s
        return out
    if kind == "RY":
        out = np.zeros((b, 2, 2), dtype=complex)
        out[:, 0, 0] = out[:, 1, 1] = c
        out[:, 0, 1] = -s
        out[:, 1, 0] = s
        return out
    if kind == "RZ":
        out = np.zeros((b, 2, 2), dtype=complex)
        out[:, 0, 0] = np.exp(-1j * half)
        out[:, 1, 1] = np.exp(1j * half)
        return out
    if kind == "PCZ":
        out = np.tile(np.eye(4, dtype=complex), (b, 1, 1))
        out[:, 3, 3] = np.exp(1j * angles)
        return out
    if kind == "PCNOT":
        # exp(i*theta*Q) with Q the projector |1><1| (x) (I-X)/2
        out = np.tile(np.eye(4, dtype=complex), (b, 1, 1))
        e = np.exp(1j * angles)
        out[:, 2, 2] = out[:, 3, 3] = (1 + e) / 2
        out[:, 2, 3] = out[:, 3, 2] = (1 - e) / 2
        return out
    if kind == "PISWAP":
        # exp(i*theta*(XX+YY)/2), acts on the single-excitation block
        out = np.tile(np.eye(4, dtype=complex), (b, 1, 1))
        out[:, 1, 1] = out[:, 2, 2] = np.cos(angles)
        out[:, 1, 2] = out[:, 2, 1] = 1j * np.sin(angles)
        return out
    raise SimulationError(f"unknown parametrized gate kind {kind!r}")


# ---------------------------------------------------------------------------
# state evolution

def _apply_matrix(amps: np.ndarray, mats: np.ndarray, qubits, n: int) -> np.ndarray:
    """Apply a k-qubit matrix to amplitudes of shape (B, 2**n).

    ``mats`` is (d, d) (shared) or (B, d, d) (one matrix per batch row).
    """
    b = amps.shape[0]
    k = len(qubits)
    if k == 1:
        q = qubits[0]
        t = amps.reshape(b, 2 ** (n - 1 - q), 2, 2**q)
        a0, a1 = t[:, :, 0, :], t[:, :, 1, :]
        if mats.ndim == 3:
            m = mats[:, :, :, None, None]
            m00, m01, m10, m11 = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
        else:
            m00, m01, m10, m11 = mats[0, 0], mats[0, 1], mats[1, 0], mats[1, 1]
        out = np.empty_like(t)
        out[:, :, 0, :] = m00 * a0 + m01 * a1
        out[:, :, 1, :] = m10 * a0 + m11 * a1
        return out.reshape(b, 2**n)
    if k == 2:
        qa, qb = max(qubits), min(qubits)
        t = amps.reshape(b, 2 ** (n - 1 - qa), 2, 2 ** (qa - qb - 1), 2, 2**qb)
        blocks = [[t[:, :, i, :, j, :] for j in (0, 1)] for i in (0, 1)]
        first_is_high = qubits[0] == qa
        shared = mats.ndim == 2

        def midx(hi_bit, lo_bit):
            # matrix index is 2*b_first + b_second
            return (
                2 * hi_bit + lo_bit if first_is_high else 2 * lo_bit + hi_bit
            )

        out = np.empty_like(t)
        for i in (0, 1):
            for j in (0, 1):
                acc = None
                for p in (0, 1):
                    for q in (0, 1):
                        m = mats[..., midx(i, j), midx(p, q)]
                        if shared:
                            if m == 0:
                                continue
                            term = m * blocks[p][q]
                        else:
                            if not np.any(m):
                                continue
                            term = m[:, None, None, None] * blocks[p][q]
                        acc = term if acc is None else acc + term
                out[:, :, i, :, j, :] = 0.0 if acc is None else acc
        return out.reshape(b, 2**n)
    t = amps.reshape((b,) + (2,) * n)
    axes = [1 + (n - 1 - q) for q in qubits]
    t = np.moveaxis(t, axes, range(1, 1 + k))
    moved_shape = t.shape
    t = t.reshape(b, 2**k, -1)
    t = np.matmul(mats, t)
    t = t.reshape(moved_shape)
    t = np.moveaxis(t, range(1, 1 + k), axes)
    return t.reshape(b, 2**n)


def _apply_diag_rz(amps: np.ndarray, angles, q: int, n: int) -> np.ndarray:
    """RZ is diagonal: scale the two half-spaces of qubit q in place."""
    b = amps.shape[0]
    t = amps.reshape(b, 2 ** (n - 1 - q), 2, 2**q)
    half = np.asarray(angles) / 2
    lo = np.exp(-1j * half)
    hi = np.exp(1j * half)
    if np.ndim(half) > 0:
        lo, hi = lo[:, None, None], hi[:, None, None]
    t[:, :, 0, :] *= lo
    t[:, :, 1, :] *= hi
    return amps


def _apply_diag_cphase(amps: np.ndarray, phases, qubits, n: int) -> np.ndarray:
    """CZ/PCZ scale only the |11> block of the gate's qubit pair, in place."""
    b = amps.shape[0]
    qa, qb = max(qubits), min(qubits)
    t = amps.reshape(
        b, 2 ** (n - 1 - qa), 2, 2 ** (qa - qb - 1), 2, 2**qb
    )
    p = np.asarray(phases)
    if p.ndim > 0:
        p = p[:, None, None, None]
    t[:, :, 1, :, 1, :] *= p
    return amps


def init_zero(num_qubits: int) -> StateVector:
    """The all-zeros computational basis state."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise SimulationError(
            f"qubit count must be in [1, {MAX_QUBITS}], got {num_qubits}"
        )
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def basis_state(num_qubits: int, index: int) -> StateVector:
    if not 0 <= index < 2**num_qubits:
        raise SimulationError(f"basis index {index} out of range")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def _op_matrix(op: GateOp, angle_binding: Optional[float]) -> np.ndarray:
    if op.kind in FIXED_GATES:
        if angle_binding is not None:
            raise SimulationError(f"{op.kind} takes no angle binding")
        return gate_matrix(op.kind)
    if op.angle is not None:
        if angle_binding is not None:
            raise SimulationError(f"{op.kind} already carries a fixed angle")
        return gate_matrix(op.kind, op.angle)
    if angle_binding is None:
        raise SimulationError(f"symbolic {op.kind} needs an angle binding")
    return gate_matrix(op.kind, angle_binding)


def apply_gate(
    state: StateVector, gate: GateOp, angle_binding: Optional[float] = None
) -> StateVector:
    """Apply one gate, binding ``angle_binding`` if the gate is symbolic."""
    for q in gate.qubits:
        if not 0 <= q < state.num_qubits:
            raise SimulationError(f"qubit index {q} out of range")
    mat = _op_matrix(gate, angle_binding)
    amps = _apply_matrix(
        state.amplitudes[None, :], mat, gate.qubits, state.num_qubits
    )[0]
    return StateVector(state.num_qubits, amps)


def _bind(op: GateOp, params: np.ndarray) -> Optional[float]:
    if op.slot is not None:
        return float(params[op.slot])
    return None


def apply_circuit(
    state: StateVector,
    circuit: Circuit,
    params: Sequence[float] = (),
    noise=None,
    rng: Optional[np.random.Generator] = None,
) -> StateVector:
    """Evolve ``state`` through ``circuit``; appends sampled error gates if noisy."""
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.param_count,):
        raise SimulationError(
            f"expected {circuit.param_count} parameters, got {params.shape}"
        )
    if state.num_qubits != circuit.num_qubits:
        raise SimulationError("state/circuit qubit count mismatch")
    noisy = noise is not None and noise.enabled
    if noisy and rng is None:
        raise SimulationError("noise requires an rng")
    amps = state.amplitudes[None, :].copy()
    n = circuit.num_qubits
    for op in circuit.ops:
        mat = _op_matrix(op, _bind(op, params))
        amps = _apply_matrix(amps, mat, op.qubits, n)
        if noisy:
            from .noise import sample_error_gate  # circular at module load

            err = sample_error_gate(op, noise, rng)
            amps = _apply_matrix(amps, _op_matrix(err, None), err.qubits, n)
    return StateVector(n, amps[0])


def run_circuit(
    circuit: Circuit,
    params: Sequence[float] = (),
    noise=None,
    rng: Optional[np.random.Generator] = None,
) -> StateVector:
    """Run ``circuit`` on the all-zeros input state."""
    return apply_circuit(init_zero(circuit.num_qubits), circuit, params, noise, rng)


def run_circuit_batch(
    circuit: Circuit,
    params_matrix: np.ndarray,
    error_angles: Optional[np.ndarray] = None,
    initial: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Run the same circuit for many parameter vectors at once.

    ``params_matrix`` is (B, param_count). ``error_angles`` is one angle per op
    (a frozen noise realization shared by all rows) or None. Returns (B, 2**n).
    """
    params_matrix = np.asarray(params_matrix, dtype=float)
    b = params_matrix.shape[0]
    if params_matrix.shape != (b, circuit.param_count):
        raise SimulationError("params_matrix shape mismatch")
    n = circuit.num_qubits
    if initial is None:
        amps = np.zeros((b, 2**n), dtype=complex)
        amps[:, 0] = 1.0
    else:
        amps = np.tile(np.asarray(initial, dtype=complex), (b, 1))
    if error_angles is not None and len(error_angles) != len(circuit.ops):
        raise SimulationError("one error angle per op required")
    param_equiv = {"CNOT": "PCNOT", "CZ": "PCZ", "ISWAP": "PISWAP"}
    # Consecutive single-qubit gates on one qubit are fused into a single
    # 2x2 matrix before touching the (large) amplitude array.
    pending = {}

    def flush(amps, q):
        m = pending.pop(q, None)
        if m is not None:
            amps = _apply_matrix(amps, m, (q,), n)
        return amps

    for i, op in enumerate(circuit.ops):
        eps = None if error_angles is None else float(error_angles[i])
        kind = op.kind
        # Error gates commute with the gate they follow whenever they rotate
        # about the gate's own axis, so fold them into the angle; H's RZ
        # error is fused into the pending single-qubit matrix instead.
        if op.slot is not None:
            ang = params_matrix[:, op.slot]
            if eps is not None:
                ang = ang + eps
                eps = None
        elif op.angle is not None:
            ang = float(op.angle)
            if eps is not None:
                ang += eps
                eps = None
        elif kind in param_equiv and eps is not None:
            kind = param_equiv[kind]
            ang = NOMINAL_ANGLE[kind] + eps
            eps = None
        else:
            ang = None
        if kind not in TWO_QUBIT_GATES:
            if ang is None:
                mats = gate_matrix(kind)
            elif np.ndim(ang) > 0:
                mats = gate_matrices(kind, np.asarray(ang, dtype=float))
            else:
                mats = gate_matrix(kind, float(ang))
            if eps is not None:
                from .noise import error_gate_for

                err = error_gate_for(op, eps)
                mats = gate_matrix(err.kind, float(err.angle)) @ mats
                eps = None
            q = op.qubits[0]
            cur = pending.get(q)
            pending[q] = mats if cur is None else np.matmul(mats, cur)
            continue
        for q in op.qubits:
            amps = flush(amps, q)
        if ang is None:
            if kind == "CZ":
                _apply_diag_cphase(amps, -1.0, op.qubits, n)
            else:
                amps = _apply_matrix(amps, _op_matrix(op, None), op.qubits, n)
        elif kind == "PCZ":
            _apply_diag_cphase(amps, np.exp(1j * np.asarray(ang)), op.qubits, n)
        else:
            if np.ndim(ang) > 0:
                mats = gate_matrices(kind, np.asarray(ang, dtype=float))
            else:
                mats = gate_matrix(kind, float(ang))
            amps = _apply_matrix(amps, mats, op.qubits, n)
        if eps is not None:
            from .noise import error_gate_for

            err = error_gate_for(op, eps)
            amps = _apply_matrix(amps, _op_matrix(err, None), err.qubits, n)
    for q in sorted(pending):
        m = pending[q]
        amps = _apply_matrix(amps, m, (q,), n)
    return amps


def circuit_unitary(circuit: Circuit, params: Sequence[float] = ()) -> np.ndarray:
    """Dense unitary of a (small) circuit, columns = images of basis states."""
    n = circuit.num_qubits
    params = np.asarray(params, dtype=float)
    cols = np.eye(2**n, dtype=complex)
    for op in circuit.ops:
        mat = _op_matrix(op, _bind(op, params))
        cols = _apply_matrix(cols, mat, op.qubits, n)
    # row b of cols is the image of basis state b, so transpose to get U
    return cols.T


# ---------------------------------------------------------------------------
# inner products

def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> of two equal-size states."""
    if a.num_qubits != b.num_qubits:
        raise SimulationError("qubit count mismatch")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, symmetric and global-phase invariant."""
    return float(abs(inner_product(a, b)) ** 2)
