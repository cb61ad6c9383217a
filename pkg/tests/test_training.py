"""Minimax training: cost, gradients, Adam, and the full loop."""

import numpy as np
import pytest

from eqgan.ansatz import AnsatzConfig, build_generator, init_params
from eqgan.noise import NoiseModel
from eqgan.sim import GateOp, Circuit, fidelity, run_circuit
from eqgan.sources import (
    fixed_circuit_source,
    random_circuit_params,
    sample_haar_state,
    state_family_source,
)
from eqgan.swaptest import SwapTestConfig
from eqgan.training import (
    AdamState,
    TrainConfig,
    adam_step,
    cost,
    gradient,
    raw_cost,
    shiftable_slots,
    train_eqgan,
)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(episodes=0)
    with pytest.raises(ValueError):
        TrainConfig(batch_size=0)
    with pytest.raises(ValueError):
        TrainConfig(lr_generator=0.0)
    with pytest.raises(ValueError):
        TrainConfig(discriminator_mode="hybrid")
    with pytest.raises(ValueError):
        TrainConfig(gradient_mode="autodiff")


def test_cost_identical_states_is_zero():
    config = AnsatzConfig(2, 1, "CZ")
    circuit = build_generator(config)
    theta = random_circuit_params(config, np.random.default_rng(0))
    source = fixed_circuit_source(circuit, theta)
    v = cost(theta, np.zeros(0), source, circuit, SwapTestConfig(2, "perfect"))
    assert v == pytest.approx(0.0, abs=1e-10)


def test_cost_orthogonal_states_is_one():
    c = Circuit(1, (GateOp("RY", (0,), slot=0),), param_count=1)
    source = fixed_circuit_source(c, [0.0])  # real = |0>
    v = cost([np.pi], np.zeros(0), source, c, SwapTestConfig(1, "perfect"))
    assert v == pytest.approx(1.0, abs=1e-10)


def test_cost_is_one_minus_fidelity_in_perfect_mode():
    rng = np.random.default_rng(1)
    config = AnsatzConfig(2, 1, "CZ")
    circuit = build_generator(config)
    for _ in range(10):
        theta_star = random_circuit_params(config, rng)
        theta_g = random_circuit_params(config, rng)
        source = fixed_circuit_source(circuit, theta_star)
        v = cost(theta_g, np.zeros(0), source, circuit, SwapTestConfig(2, "perfect"))
        f = fidelity(run_circuit(circuit, theta_g), source.base_state)
        assert v == pytest.approx(1.0 - f, abs=1e-9)


def test_cost_is_clamped():
    rng = np.random.default_rng(2)
    theta_d = rng.uniform(-np.pi, np.pi, 4)
    config = AnsatzConfig(2, 1, "CZ")
    circuit = build_generator(config)
    source = fixed_circuit_source(circuit, random_circuit_params(config, rng))
    for _ in range(20):
        theta_g = random_circuit_params(config, rng)
        v = cost(
            theta_g, theta_d, source, circuit,
            SwapTestConfig(2, "parametrized", theta_d),
        )
        assert 0.0 <= v <= 1.0


def test_adam_zero_gradient():
    state = AdamState.zeros(3)
    params = np.array([1.0, -2.0, 0.5])
    new, state = adam_step(params, np.zeros(3), state, 0.01)
    assert np.array_equal(new, params)
    assert state.step_count == 1


def test_adam_first_step_magnitude():
    state = AdamState.zeros(2)
    new, _ = adam_step(np.zeros(2), np.array([3.0, -0.2]), state, 0.01)
    # bias-corrected first step moves by ~lr against the gradient sign
    np.testing.assert_allclose(new, [-0.01, 0.01], rtol=1e-6)


def test_adam_descends_quadratic():
    theta = np.array([1.0])
    state = AdamState.zeros(1)
    for _ in range(300):
        theta, state = adam_step(theta, 2 * theta, state, 0.01)
    assert abs(theta[0]) < 0.01


def test_adam_ascend_descend_symmetry():
    grads = np.array([0.7, -1.3])
    up, _ = adam_step(np.zeros(2), grads, AdamState.zeros(2), 0.05, "ascend")
    down, _ = adam_step(np.zeros(2), -grads, AdamState.zeros(2), 0.05, "descend")
    assert np.array_equal(up, down)


def test_adam_length_mismatch():
    with pytest.raises(ValueError):
        adam_step(np.zeros(2), np.zeros(3), AdamState.zeros(2), 0.01)


def test_gradient_of_expectation_after_ry():
    # <Z> after RY(theta)|0> is cos(theta); derivative -sin(theta)
    def z_expectation(t):
        c = Circuit(1, (GateOp("RY", (0,), slot=0),), param_count=1)
        amps = run_circuit(c, t).amplitudes
        return float(abs(amps[0]) ** 2 - abs(amps[1]) ** 2)

    g0 = gradient(z_expectation, np.array([0.0]), "parameter_shift")
    assert g0[0] == pytest.approx(0.0, abs=1e-10)
    g1 = gradient(z_expectation, np.array([np.pi / 2]), "parameter_shift")
    assert g1[0] == pytest.approx(-1.0, abs=1e-10)


def test_parameter_shift_matches_finite_difference():
    rng = np.random.default_rng(3)
    config = AnsatzConfig(2, 1, "CZ", True)
    circuit = build_generator(config)
    source = fixed_circuit_source(circuit, random_circuit_params(config, rng))
    mask = shiftable_slots(circuit)
    theta_g = random_circuit_params(config, rng)

    def cost_fn(t):
        return raw_cost(
            t, np.zeros(0), source.base_state, circuit, SwapTestConfig(2, "perfect")
        )

    shift = gradient(cost_fn, theta_g, "parameter_shift", mask)
    fd = gradient(cost_fn, theta_g, "finite_difference", mask)
    np.testing.assert_allclose(shift, fd, atol=1e-5)


def test_shiftable_slots_mask():
    circuit = build_generator(AnsatzConfig(3, 1, "ISWAP", True))
    mask = shiftable_slots(circuit)
    assert mask[:9].all()  # Euler rotations use the exact shift rule
    assert not mask[9:].any()  # PISWAP slots fall back to finite differences


def test_gradient_mode_validation():
    with pytest.raises(ValueError):
        gradient(lambda t: 0.0, np.zeros(1), "autodiff")


def test_train_record_shapes_and_best():
    config = AnsatzConfig(2, 1, "CZ")
    circuit = build_generator(config)
    theta = random_circuit_params(config, np.random.default_rng(4))
    source = fixed_circuit_source(circuit, theta)
    record = train_eqgan(
        source, config, TrainConfig(episodes=10, batch_size=2, seed=1)
    )
    assert len(record.costs) == 10
    assert len(record.fidelities) == 10
    assert record.best_fidelity >= record.fidelities[-1]
    assert record.final_theta_g.shape == theta.shape
    assert all(0.0 <= c <= 1.0 for c in record.costs)


def test_train_deterministic_per_seed():
    config = AnsatzConfig(2, 1, "CZ")
    circuit = build_generator(config)
    theta = random_circuit_params(config, np.random.default_rng(5))
    source = fixed_circuit_source(circuit, theta, noise=NoiseModel())
    tc = TrainConfig(episodes=4, batch_size=2, seed=9,
                     discriminator_mode="adversarial")
    a = train_eqgan(source, config, tc, NoiseModel())
    b = train_eqgan(source, config, tc, NoiseModel())
    assert a.fidelities == b.fidelities
    assert np.array_equal(a.final_theta_g, b.final_theta_g)
    assert np.array_equal(a.final_theta_d, b.final_theta_d)


def test_noiseless_one_qubit_convergence():
    c = Circuit(1, (GateOp("RY", (0,), slot=0),), param_count=1)
    source = fixed_circuit_source(c, [0.7])
    record = train_eqgan(
        source,
        AnsatzConfig(1, 1, "CNOT"),  # entangler unused at one qubit
        TrainConfig(episodes=200, batch_size=1, seed=1),
    )
    assert record.best_fidelity >= 0.999


def test_adversarial_updates_discriminator():
    rng = np.random.default_rng(6)
    source = state_family_source(sample_haar_state(2, rng), rng)
    record = train_eqgan(
        source,
        AnsatzConfig(2, 1, "CZ"),
        TrainConfig(episodes=5, batch_size=2, seed=7,
                    discriminator_mode="adversarial"),
        NoiseModel(),
    )
    assert record.final_theta_d.shape == (4,)
    assert np.any(record.final_theta_d != 0)


def test_perfect_mode_leaves_discriminator_untouched():
    rng = np.random.default_rng(7)
    source = state_family_source(sample_haar_state(2, rng), rng)
    record = train_eqgan(
        source, AnsatzConfig(2, 1, "CZ"), TrainConfig(episodes=3, seed=8)
    )
    assert np.all(record.final_theta_d == 0)


def test_train_qubit_mismatch():
    rng = np.random.default_rng(8)
    source = state_family_source(sample_haar_state(3, rng), rng)
    with pytest.raises(Exception):
        train_eqgan(source, AnsatzConfig(2, 1, "CZ"), TrainConfig(episodes=1))
