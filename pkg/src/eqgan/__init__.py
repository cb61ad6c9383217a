"""Entangling quantum GAN toolkit: statevector simulation, SWAP-test
discriminators, minimax training, SSVQE, and the experiment harness.
"""

from .sim import (
    Circuit,
    GateOp,
    SimulationError,
    StateVector,
    apply_circuit,
    apply_gate,
    fidelity,
    init_zero,
    inner_product,
    run_circuit,
)
from .ansatz import AnsatzConfig, build_generator, init_params, param_count
from .noise import NoiseModel, sample_error_gate
from .swaptest import (
    SwapTestConfig,
    build_parametrized_swap,
    build_perfect_swap,
    discriminator_score,
    estimate_overlap_from_bits,
)
from .pauli import PauliSum, exact_spectrum, expectation, load_hamiltonian
from .ssvqe import SSVQEConfig, ssvqe_objective, ssvqe_train
from .sources import (
    RealSource,
    draw_real,
    fixed_circuit_source,
    load_state_json,
    param_family_source,
    random_circuit_params,
    sample_haar_state,
    state_family_source,
)
from .training import (
    AdamState,
    TrainConfig,
    TrainRecord,
    adam_step,
    cost,
    gradient,
    train_eqgan,
)
from .experiments import SummaryStats, resolve_spec, summarize

__all__ = [
    "AdamState",
    "AnsatzConfig",
    "Circuit",
    "GateOp",
    "NoiseModel",
    "PauliSum",
    "RealSource",
    "SSVQEConfig",
    "SimulationError",
    "StateVector",
    "SummaryStats",
    "SwapTestConfig",
    "TrainConfig",
    "TrainRecord",
    "adam_step",
    "apply_circuit",
    "apply_gate",
    "build_generator",
    "build_parametrized_swap",
    "build_perfect_swap",
    "cost",
    "discriminator_score",
    "draw_real",
    "estimate_overlap_from_bits",
    "exact_spectrum",
    "expectation",
    "fidelity",
    "fixed_circuit_source",
    "gradient",
    "init_params",
    "init_zero",
    "inner_product",
    "load_hamiltonian",
    "load_state_json",
    "param_count",
    "param_family_source",
    "random_circuit_params",
    "resolve_spec",
    "run_circuit",
    "sample_error_gate",
    "sample_haar_state",
    "ssvqe_objective",
    "ssvqe_train",
    "state_family_source",
    "summarize",
    "train_eqgan",
]

__version__ = "0.1.0"
