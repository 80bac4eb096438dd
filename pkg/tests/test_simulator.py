import itertools
import math

import numpy as np
import pytest

from conftest import random_weighted_model
from rqaoa import analytic
from rqaoa.errors import ConfigError, RegistrationError, SizeLimitError
from rqaoa.ising import IsingModel, SpinAssignment, brute_force_max, complete_model, energy, maxcut_model
from rqaoa.simulator import (
    SIM_CAP,
    OptimizerConfig,
    ParameterSchedule,
    QAOACircuit,
    Statevector,
    apply_mixer_layer,
    apply_phase_layer,
    basis_state,
    correlation,
    correlations,
    expectation_energy,
    optimize_schedule,
    plus_state,
    qaoa_state,
)


def random_state(rng, n, order=None):
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return Statevector(amps / np.linalg.norm(amps), tuple(range(n)) if order is None else order)


def all_correlations(state, vertices):
    return [correlation(state, i, j) for i, j in itertools.combinations(vertices, 2)]


class TestPlusState:
    def test_one_qubit(self):
        np.testing.assert_allclose(plus_state(1).amplitudes, [2**-0.5, 2**-0.5])

    def test_two_qubits(self):
        np.testing.assert_allclose(plus_state(2).amplitudes, [0.5] * 4)

    def test_norm_20(self):
        assert abs(plus_state(20).norm() - 1) <= 1e-12

    def test_cap(self):
        with pytest.raises(SizeLimitError):
            plus_state(SIM_CAP + 1)


class TestLayers:
    def test_phase_gamma_zero(self, rng):
        model = complete_model(3)
        s = random_state(rng, 3)
        np.testing.assert_array_equal(apply_phase_layer(s, model, 0.0).amplitudes, s.amplitudes)

    def test_phase_single_edge(self):
        model = maxcut_model([(0, 1)])
        gamma = 0.37
        # |01>: qubit 0 in bit 0 -> spin +1, qubit 1 -> spin -1
        s = basis_state({0: 1, 1: -1}, (0, 1))
        out = apply_phase_layer(s, model, gamma)
        assert out.amplitudes[0b10] == pytest.approx(np.exp(-1j * gamma * 0.5), abs=1e-15)

    def test_phase_preserves_norm(self, rng):
        model, _ = random_weighted_model(rng, 8)
        s = random_state(rng, 8)
        assert abs(apply_phase_layer(s, model, 1.234).norm() - 1) <= 1e-12

    def test_phase_register_mismatch(self):
        with pytest.raises(RegistrationError):
            apply_phase_layer(plus_state(3, (0, 1, 5)), complete_model(3), 0.1)

    def test_mixer_zero(self, rng):
        s = random_state(rng, 4)
        np.testing.assert_allclose(apply_mixer_layer(s, 0.0).amplitudes, s.amplitudes, atol=1e-15)

    def test_mixer_half_pi(self):
        s = Statevector(np.array([1, 0], dtype=complex), (0,))
        np.testing.assert_allclose(apply_mixer_layer(s, math.pi / 2).amplitudes, [0, -1j], atol=1e-15)

    @pytest.mark.parametrize("beta", [0.1, 0.7, 2.9, -1.3])
    def test_mixer_plus_eigenstate(self, beta):
        out = apply_mixer_layer(plus_state(1), beta)
        np.testing.assert_allclose(out.amplitudes, np.exp(-1j * beta) * plus_state(1).amplitudes, atol=1e-15)

    def test_mixer_matches_kron(self, rng):
        n, beta = 3, 0.41
        s = random_state(rng, n)
        u1 = np.array([[np.cos(beta), -1j * np.sin(beta)], [-1j * np.sin(beta), np.cos(beta)]])
        full = u1
        for _ in range(n - 1):
            full = np.kron(full, u1)
        np.testing.assert_allclose(apply_mixer_layer(s, beta).amplitudes, full @ s.amplitudes, atol=1e-14)

    def test_norm_preserved_everywhere(self, rng):
        model, _ = random_weighted_model(rng, 7)
        s = random_state(rng, 7)
        for g, b in rng.uniform(-4, 4, size=(20, 2)):
            s = apply_mixer_layer(apply_phase_layer(s, model, g), b)
            assert abs(s.norm() - 1) <= 1e-12


class TestQaoaState:
    def test_zero_schedule_is_plus(self):
        s = qaoa_state(complete_model(4), ParameterSchedule((0.0,), (0.0,)))
        np.testing.assert_allclose(s.amplitudes, plus_state(4).amplitudes, atol=1e-15)

    def test_k4_correlations_equal(self, rng):
        model = complete_model(4)
        for g, b in rng.uniform(0, 3, size=(5, 2)):
            c = all_correlations(qaoa_state(model, ParameterSchedule((g,), (b,))), model.vertices)
            assert max(c) - min(c) <= 1e-12

    def test_identity_layers(self):
        model = complete_model(5)
        a = qaoa_state(model, ParameterSchedule((0.3,), (0.8,)))
        b = qaoa_state(model, ParameterSchedule((0.3, 0.0), (0.8, 0.0)))
        np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-14)

    def test_fast_path_matches_reference(self, rng):
        model, _ = random_weighted_model(rng, 6)
        sched = ParameterSchedule((0.2, 1.1), (0.5, -0.3))
        np.testing.assert_allclose(
            QAOACircuit(model).amplitudes(sched), qaoa_state(model, sched).amplitudes, atol=1e-13
        )

    @pytest.mark.parametrize("m,p", [(4, 1), (5, 2), (6, 1), (6, 2)])
    def test_permutation_equivariance(self, rng, m, p):
        model = complete_model(m)
        for _ in range(3):
            sched = ParameterSchedule(tuple(rng.uniform(0, 6, p)), tuple(rng.uniform(0, 3, p)))
            c = all_correlations(qaoa_state(model, sched), model.vertices)
            assert max(abs(v - c[0]) for v in c) <= 1e-10


class TestExpectation:
    def test_plus_gives_offset(self, rng):
        model, _ = random_weighted_model(rng, 6)
        assert expectation_energy(plus_state(6), model) == pytest.approx(model.offset, abs=1e-12)

    def test_basis_states(self, rng):
        for seed in range(3):
            model, _ = random_weighted_model(np.random.default_rng(seed), 7)
            for _ in range(100):
                x = SpinAssignment.from_sequence(model.vertices, rng.choice([-1, 1], 7))
                s = basis_state(x, model.vertices)
                assert expectation_energy(s, model) == pytest.approx(energy(model, x), abs=1e-12)

    def test_k4_grid_matches_closed_form(self):
        model = complete_model(4)
        for g in np.linspace(0, 2 * math.pi, 11):
            for b in np.linspace(0, math.pi, 11):
                s = qaoa_state(model, ParameterSchedule((g,), (b,)))
                assert abs(expectation_energy(s, model) - 6 * analytic.expected_edge_cost(2, g, b)) <= 1e-10

    def test_partitioning_deterministic(self, rng):
        model, _ = random_weighted_model(rng, 10)
        s = qaoa_state(model, ParameterSchedule((0.4,), (0.9,)))
        ref = expectation_energy(s, model)
        for parts in (2, 3, 7, 64):
            assert abs(expectation_energy(s, model, partitions=parts) - ref) <= 1e-12

    def test_registration(self):
        with pytest.raises(RegistrationError):
            expectation_energy(plus_state(2), complete_model(3))


class TestCorrelation:
    def test_plus_zero(self):
        assert correlation(plus_state(3), 0, 2) == pytest.approx(0.0, abs=1e-15)

    def test_basis_aligned(self):
        s = basis_state({0: -1, 1: 1, 2: -1}, (0, 1, 2))
        assert correlation(s, 0, 2) == 1.0
        assert correlation(s, 0, 1) == -1.0

    def test_unknown_vertex(self):
        with pytest.raises(RegistrationError):
            correlation(plus_state(2), 0, 7)
        with pytest.raises(RegistrationError):
            correlation(plus_state(2), 1, 1)

    def test_batch_matches_single(self, rng):
        s = random_state(rng, 5, (2, 4, 6, 8, 10))
        pairs = [(2, 8), (4, 10), (6, 2)]
        batch = correlations(s, pairs)
        for p in pairs:
            assert batch[p] == pytest.approx(correlation(s, *p), abs=1e-15)

    def test_k6_optimum_negative_and_equal(self):
        model = complete_model(6)
        rep = optimize_schedule(model, 1)
        c = all_correlations(qaoa_state(model, rep.best_schedule), model.vertices)
        assert len(c) == 15
        assert max(c) - min(c) <= 1e-10
        assert max(c) < 0


class TestOptimize:
    def test_single_edge_solved(self):
        model = complete_model(2)
        # oracle: dense parameter grid at resolution 1e-3 over one period
        circuit = QAOACircuit(model)
        betas = np.arange(0, math.pi, 1e-3)
        grid_best = max(circuit.values_over_betas(g, betas).max() for g in np.arange(0, 2 * math.pi, 1e-3))
        assert grid_best >= 1 - 2e-6
        rep = optimize_schedule(model, 1)
        assert abs(rep.best_value - 1) <= 1e-6
        assert rep.best_value >= grid_best - 1e-12

    def test_k4_below_one_and_matches_closed_form(self):
        rep = optimize_schedule(complete_model(4), 1)
        ratio = rep.best_value / 4
        assert ratio < 1
        assert abs(ratio - analytic.qaoa1_ratio(2)) <= 1e-6

    def test_report_value_consistent(self):
        model = complete_model(5)
        rep = optimize_schedule(model, 1)
        s = qaoa_state(model, rep.best_schedule)
        assert abs(rep.best_value - expectation_energy(s, model)) <= 1e-9
        assert rep.evaluations > 64 * 64
        assert rep.strategy.startswith("grid64x64")

    def test_at_least_offset(self, rng):
        for seed in range(4):
            model, _ = random_weighted_model(np.random.default_rng(seed), 6)
            rep = optimize_schedule(model, 1, OptimizerConfig(grid=64))
            assert rep.best_value >= model.offset - 1e-12

    def test_level_two_not_worse(self):
        model, _ = random_weighted_model(np.random.default_rng(5), 6)
        one = optimize_schedule(model, 1)
        two = optimize_schedule(model, 2, OptimizerConfig(multistart=3))
        assert two.best_schedule.level == 2
        assert two.best_value >= one.best_value - 1e-12
        assert two.best_value <= brute_force_max(model)[1] + 1e-9

    def test_deterministic(self):
        model, _ = random_weighted_model(np.random.default_rng(6), 5)
        cfg = OptimizerConfig(multistart=2, seed=4)
        assert optimize_schedule(model, 2, cfg) == optimize_schedule(model, 2, cfg)

    def test_bad_level(self):
        with pytest.raises(ConfigError):
            optimize_schedule(complete_model(3), 0)

    def test_schedule_validation(self):
        with pytest.raises(ConfigError):
            ParameterSchedule((0.1, 0.2), (0.3,))
