"""Minimax training loop: Adam, parameter-shift/finite-difference gradients,
and alternating discriminator/generator updates on the cost V = 1 - D.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .ansatz import AnsatzConfig, build_generator, init_params
from .noise import sample_error_angles
from .sim import (
    Circuit,
    SimulationError,
    StateVector,
    fidelity,
    run_circuit,
    run_circuit_batch,
)
from .swaptest import (
    SwapTestConfig,
    discriminator_score,
    pair_observable,
    pair_observables,
    real_density,
    reduce_pairs,
    reduced_observable,
    score_from_reduced,
)

#: slot kinds whose +-pi/2 shift with prefactor 1/2 gives the exact derivative
SHIFT_KINDS = frozenset({"RX", "RY", "RZ", "PCZ"})
FD_STEP = 1e-4


@dataclass(frozen=True)
class TrainConfig:
    episodes: int = 80
    batch_size: int = 4
    lr_generator: float = 0.01
    lr_discriminator: float = 0.01
    discriminator_mode: str = "perfect"
    seed: int = 0
    gradient_mode: str = "parameter_shift"
    disc_steps: int = 1  # discriminator steps per generator step

    def __post_init__(self):
        if self.episodes < 1 or self.batch_size < 1 or self.disc_steps < 1:
            raise ValueError("episodes, batch_size and disc_steps must be >= 1")
        if self.lr_generator <= 0 or self.lr_discriminator <= 0:
            raise ValueError("learning rates must be > 0")
        if self.discriminator_mode not in ("perfect", "adversarial"):
            raise ValueError(f"unknown discriminator mode {self.discriminator_mode!r}")
        if self.gradient_mode not in ("parameter_shift", "finite_difference"):
            raise ValueError(f"unknown gradient mode {self.gradient_mode!r}")


@dataclass(frozen=True)
class AdamState:
    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def zeros(cls, dim: int) -> "AdamState":
        return cls(np.zeros(dim), np.zeros(dim))


@dataclass
class TrainRecord:
    costs: list
    fidelities: list
    final_theta_g: np.ndarray
    final_theta_d: np.ndarray
    best_fidelity: float
    best_theta_g: np.ndarray

    def to_dict(self) -> dict:
        return {
            "costs": [float(c) for c in self.costs],
            "fidelities": [float(f) for f in self.fidelities],
            "final_theta_g": [float(x) for x in self.final_theta_g],
            "final_theta_d": [float(x) for x in self.final_theta_d],
            "best_fidelity": float(self.best_fidelity),
            "best_theta_g": [float(x) for x in self.best_theta_g],
        }


def adam_step(
    params: np.ndarray,
    grads: np.ndarray,
    state: AdamState,
    lr: float,
    direction: str = "descend",
):
    """One bias-corrected Adam update; ``ascend`` negates the gradient."""
    params = np.asarray(params, dtype=float)
    grads = np.asarray(grads, dtype=float)
    if params.shape != grads.shape or params.shape != state.first_moment.shape:
        raise ValueError("parameter/gradient/state length mismatch")
    if direction not in ("descend", "ascend"):
        raise ValueError(f"unknown direction {direction!r}")
    g = grads if direction == "descend" else -grads
    t = state.step_count + 1
    m = state.beta1 * state.first_moment + (1 - state.beta1) * g
    v = state.beta2 * state.second_moment + (1 - state.beta2) * g**2
    m_hat = m / (1 - state.beta1**t)
    v_hat = v / (1 - state.beta2**t)
    new_params = params - lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return new_params, replace(state, first_moment=m, second_moment=v, step_count=t)


def shiftable_slots(circuit: Circuit) -> np.ndarray:
    """Per-slot mask: True where the parameter-shift rule applies exactly."""
    ok = np.ones(circuit.param_count, dtype=bool)
    for op in circuit.ops:
        if op.slot is not None and op.kind not in SHIFT_KINDS:
            ok[op.slot] = False
    return ok


def gradient(
    cost_fn: Callable[[np.ndarray], float],
    params: np.ndarray,
    mode: str = "parameter_shift",
    shiftable: Optional[np.ndarray] = None,
    h: float = FD_STEP,
) -> np.ndarray:
    """Gradient of a scalar cost over angle parameters.

    In parameter_shift mode, slots flagged False in ``shiftable`` (PCNOT and
    PISWAP slots) fall back to central finite differences. Callers that
    evaluate under noise must freeze the noise realization inside ``cost_fn``
    so both shifted evaluations of one partial see the same errors.
    """
    if mode not in ("parameter_shift", "finite_difference"):
        raise ValueError(f"unknown gradient mode {mode!r}")
    params = np.asarray(params, dtype=float)
    grad = np.zeros_like(params)
    for j in range(len(params)):
        use_shift = mode == "parameter_shift" and (
            shiftable is None or bool(shiftable[j])
        )
        step = np.pi / 2 if use_shift else h
        pref = 0.5 if use_shift else 0.5 / h
        e = np.zeros_like(params)
        e[j] = step
        grad[j] = pref * (cost_fn(params + e) - cost_fn(params - e))
    return grad


def _disc_config(mode: str, n: int, theta_d: np.ndarray) -> SwapTestConfig:
    if mode in ("perfect",):
        return SwapTestConfig(n, "perfect")
    return SwapTestConfig(n, "parametrized", theta_d)


def raw_cost(
    theta_g,
    theta_d,
    real_source,
    generator: Circuit,
    disc_config: SwapTestConfig,
    noise=None,
    rng=None,
) -> float:
    """V = 1 - D without the reporting clamp (what the gradients see)."""
    real = real_source if isinstance(real_source, StateVector) else real_source.draw(rng)
    gen_state = run_circuit(generator, theta_g, noise, rng)
    cfg = _disc_config(
        "perfect" if disc_config.mode == "perfect" else "adversarial",
        disc_config.num_data_qubits,
        np.asarray(theta_d, dtype=float),
    )
    return 1.0 - discriminator_score(real, gen_state, cfg, noise, rng)


def cost(
    theta_g,
    theta_d,
    real_source,
    generator: Circuit,
    disc_config: SwapTestConfig,
    noise=None,
    rng=None,
) -> float:
    """Eq. V = 1 - D with the score clamped to [0, 1] before subtraction."""
    v = raw_cost(theta_g, theta_d, real_source, generator, disc_config, noise, rng)
    d = 1.0 - v
    return 1.0 - min(max(d, 0.0), 1.0)


# ---------------------------------------------------------------------------
# trainer internals

def _shift_rows(theta: np.ndarray, steps: np.ndarray) -> np.ndarray:
    """Rows: base, then (+step_j, -step_j) per coordinate."""
    p = len(theta)
    rows = np.tile(theta, (2 * p + 1, 1))
    for j in range(p):
        rows[2 * j + 1, j] += steps[j]
        rows[2 * j + 2, j] -= steps[j]
    return rows


def _grad_steps(mask: np.ndarray, mode: str):
    if mode == "finite_difference":
        mask = np.zeros_like(mask)
    steps = np.where(mask, np.pi / 2, FD_STEP)
    prefs = np.where(mask, 0.5, 0.5 / FD_STEP)
    return steps, prefs


def train_eqgan(
    real_source,
    gen_config: AnsatzConfig,
    train_config: TrainConfig,
    noise=None,
) -> TrainRecord:
    """Alternating minimax training of generator (and optionally discriminator).

    Per batch item in adversarial mode: ``disc_steps`` Adam ascent steps on
    theta_d, then one descent step on theta_g; perfect mode skips the
    discriminator updates. Noise is resampled per gradient evaluation and
    frozen across its shifted circuit runs.
    """
    n = gen_config.num_qubits
    if real_source.num_qubits != n:
        raise SimulationError("real source and generator qubit counts differ")
    rng = np.random.default_rng(train_config.seed)
    generator = build_generator(gen_config)
    adversarial = train_config.discriminator_mode == "adversarial"
    noisy = noise is not None and noise.enabled

    theta_g = init_params(gen_config, rng)
    theta_d = np.zeros(2 * n)
    adam_g = AdamState.zeros(len(theta_g))
    adam_d = AdamState.zeros(len(theta_d))
    g_steps, g_prefs = _grad_steps(shiftable_slots(generator), train_config.gradient_mode)
    d_steps, d_prefs = _grad_steps(
        np.ones(2 * n, dtype=bool), train_config.gradient_mode
    )
    disc_circuit = (
        _disc_config("adversarial" if adversarial else "perfect", n, theta_d)
    )
    from .swaptest import _test_circuit  # noise realization needs the op list

    test_circuit, _ = _test_circuit(disc_circuit)

    costs, fids = [], []
    best_fid, best_theta = -1.0, theta_g.copy()
    for _ in range(train_config.episodes):
        ep_cost = 0.0
        for _ in range(train_config.batch_size):
            real = real_source.draw(rng)
            if adversarial:
                # The discriminator maximizes its classification margin
                # D(real, real') - D(real, gen): reject the generated state
                # while still accepting real data. Ascending 1 - D alone has a
                # degenerate optimum (a test that rejects everything,
                # including identical states) that destroys the generator's
                # training signal.
                for _ in range(train_config.disc_steps):
                    real2 = real_source.draw(rng)
                    gen_err = (
                        sample_error_angles(generator, noise, rng) if noisy else None
                    )
                    disc_err = (
                        sample_error_angles(test_circuit, noise, rng) if noisy else None
                    )
                    gen_amps = run_circuit_batch(generator, theta_g[None], gen_err)
                    both = np.vstack([gen_amps, real2.amplitudes[None]])
                    rho = real_density(real)
                    base_ws = pair_observables(
                        SwapTestConfig(n, "parametrized", theta_d), disc_err
                    )

                    def d_margin(slot, delta):
                        i = slot // 2
                        pair = theta_d[2 * i : 2 * i + 2].copy()
                        pair[slot % 2] += delta
                        errs = (
                            None if disc_err is None else disc_err[6 * i : 6 * i + 6]
                        )
                        ws = list(base_ws)
                        ws[i] = pair_observable("parametrized", pair, errs)
                        s = score_from_reduced(both, reduce_pairs(rho, ws))
                        return s[1] - s[0]

                    grad_d = np.array(
                        [
                            d_prefs[j]
                            * (d_margin(j, d_steps[j]) - d_margin(j, -d_steps[j]))
                            for j in range(2 * n)
                        ]
                    )
                    theta_d, adam_d = adam_step(
                        theta_d, grad_d, adam_d, train_config.lr_discriminator, "ascend"
                    )
            gen_err = sample_error_angles(generator, noise, rng) if noisy else None
            disc_err = sample_error_angles(test_circuit, noise, rng) if noisy else None
            cfg = _disc_config("adversarial" if adversarial else "perfect", n, theta_d)
            reduced = reduced_observable(real, cfg, error_angles=disc_err)
            rows = _shift_rows(theta_g, g_steps)
            states = run_circuit_batch(generator, rows, gen_err)
            scores = score_from_reduced(states, reduced)
            grad_v_g = -g_prefs * (scores[1::2] - scores[2::2])
            theta_g, adam_g = adam_step(
                theta_g, grad_v_g, adam_g, train_config.lr_generator, "descend"
            )
            ep_cost += 1.0 - min(max(float(scores[0]), 0.0), 1.0)
        costs.append(ep_cost / train_config.batch_size)
        fid = fidelity(run_circuit(generator, theta_g), real_source.base_state)
        fids.append(fid)
        if fid > best_fid:
            best_fid, best_theta = fid, theta_g.copy()
    return TrainRecord(costs, fids, theta_g, theta_d, best_fid, best_theta)
