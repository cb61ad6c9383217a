"""Real-data sources: fixed circuits, parameter-perturbed circuit families,
and Haar-random states with coefficient-perturbed training pools.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ansatz import AnsatzConfig, param_count
from .sim import (
    Circuit,
    SimulationError,
    StateVector,
    apply_circuit,
    basis_state,
)

KINDS = ("fixed_circuit", "param_family", "state_family")


def sample_haar_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-uniform pure state: normalized i.i.d. complex Gaussian amplitudes."""
    dim = 2**num_qubits
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(num_qubits, amps / np.linalg.norm(amps))


def random_circuit_params(config: AnsatzConfig, rng: np.random.Generator) -> np.ndarray:
    """Random predefined rotation angles theta*, uniform in [0, 2*pi)."""
    return rng.uniform(0.0, 2.0 * np.pi, size=param_count(config))


def perturb_state(
    base: StateVector, sigma: float, rng: np.random.Generator
) -> StateVector:
    """Gaussian-perturb real and imaginary parts of each amplitude, renormalize."""
    amps = (
        base.amplitudes
        + rng.normal(0.0, sigma, size=base.amplitudes.shape)
        + 1j * rng.normal(0.0, sigma, size=base.amplitudes.shape)
    )
    return StateVector(base.num_qubits, amps / np.linalg.norm(amps))


@dataclass
class RealSource:
    """Immutable pool-backed source of "real" training states.

    * fixed_circuit: every draw re-runs the base circuit at theta* (fresh
      noise per draw when a noise model is attached).
    * param_family: a pool of states from theta* + N(0, sigma^2) per angle.
    * state_family: a pool of coefficient-perturbed copies of a base state.

    Batches sample uniformly from the pool (with replacement).
    """

    kind: str
    num_qubits: int
    base_state: StateVector
    circuit: Optional[Circuit] = None
    theta_star: Optional[np.ndarray] = None
    perturbation_sigma: float = 0.01
    pool_size: int = 100
    input_index: int = 0
    noise: object = None
    pool: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.perturbation_sigma < 0:
            raise ValueError("perturbation sigma must be >= 0")
        if self.pool_size < 1:
            raise ValueError("pool size must be >= 1")

    def draw(self, rng: np.random.Generator) -> StateVector:
        return draw_real(self, rng)


def _run_base(
    circuit: Circuit,
    theta: np.ndarray,
    input_index: int,
    noise=None,
    rng=None,
) -> StateVector:
    state = basis_state(circuit.num_qubits, input_index)
    return apply_circuit(state, circuit, theta, noise, rng)


def fixed_circuit_source(
    circuit: Circuit, theta_star, noise=None, input_index: int = 0
) -> RealSource:
    theta_star = np.asarray(theta_star, dtype=float)
    base = _run_base(circuit, theta_star, input_index)
    return RealSource(
        "fixed_circuit",
        circuit.num_qubits,
        base,
        circuit=circuit,
        theta_star=theta_star,
        input_index=input_index,
        noise=noise,
    )


def param_family_source(
    circuit: Circuit,
    theta_star,
    rng: np.random.Generator,
    sigma: float = 0.01,
    pool_size: int = 100,
    noise=None,
    input_index: int = 0,
) -> RealSource:
    theta_star = np.asarray(theta_star, dtype=float)
    base = _run_base(circuit, theta_star, input_index)
    pool = []
    for _ in range(pool_size):
        theta = theta_star + rng.normal(0.0, sigma, size=theta_star.shape)
        pool.append(_run_base(circuit, theta, input_index, noise, rng))
    return RealSource(
        "param_family",
        circuit.num_qubits,
        base,
        circuit=circuit,
        theta_star=theta_star,
        perturbation_sigma=sigma,
        pool_size=pool_size,
        input_index=input_index,
        noise=noise,
        pool=pool,
    )


def state_family_source(
    base: StateVector,
    rng: np.random.Generator,
    sigma: float = 0.01,
    pool_size: int = 100,
) -> RealSource:
    pool = [perturb_state(base, sigma, rng) for _ in range(pool_size)]
    return RealSource(
        "state_family",
        base.num_qubits,
        base,
        perturbation_sigma=sigma,
        pool_size=pool_size,
        pool=pool,
    )


def draw_real(source: RealSource, rng: np.random.Generator) -> StateVector:
    if source.kind == "fixed_circuit":
        noisy = source.noise is not None and source.noise.enabled
        return _run_base(
            source.circuit,
            source.theta_star,
            source.input_index,
            source.noise if noisy else None,
            rng if noisy else None,
        )
    return source.pool[int(rng.integers(len(source.pool)))]


def load_state_json(source) -> StateVector:
    """Target state file: { "num_qubits": n, "amplitudes": [[re, im], ...] }."""
    if isinstance(source, dict):
        data = source
    elif hasattr(source, "read"):
        data = json.load(source)
    else:
        with open(source) as fh:
            data = json.load(fh)
    n = int(data["num_qubits"])
    pairs = data["amplitudes"]
    if len(pairs) != 2**n:
        raise SimulationError(f"expected {2**n} amplitudes, got {len(pairs)}")
    amps = np.array([complex(re, im) for re, im in pairs])
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > 1e-6:
        warnings.warn(f"state norm {norm} deviates from 1; renormalizing")
    return StateVector(n, amps / norm)
