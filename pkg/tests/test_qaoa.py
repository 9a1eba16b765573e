import numpy as np
import pytest

from graphsim import graphs, qaoa
from graphsim.evolution import dense_expm_oracle
from graphsim.hamiltonians import CostDiagonal, build_cost_diagonal, build_mixer
from graphsim.qaoa import (
    QaoaParams,
    compute_metrics,
    cost_distribution,
    evolve,
    evolve_npo,
    expectation,
    initial_state,
    sample,
)


def make_diag(values, mode="edge_difference", **kw):
    values = np.asarray(values, dtype=float)
    return CostDiagonal(values, int(np.log2(values.size)), mode, **kw)


def problem(v=3, seed=0, mode="edge_difference", deformation="add_remove"):
    g1 = graphs.erdos_renyi(v, True, seed)
    g2 = graphs.deform(g1, deformation, seed + 1)
    diag = build_cost_diagonal(g1, g2, mode)
    return diag, build_mixer(diag.q), graphs.brute_force_best(g1, g2)[1]


class TestQaoaParams:
    def test_vector_round_trip(self):
        params = QaoaParams.from_vector(np.array([0.1, 0.2, 0.3, 0.4]))
        assert params.p == 2
        assert list(params.gammas) == [0.1, 0.2]
        assert list(params.betas) == [0.3, 0.4]

    def test_rejects_mismatch(self):
        with pytest.raises(ValueError):
            QaoaParams([0.1, 0.2], [0.3])
        with pytest.raises(ValueError):
            QaoaParams.from_vector(np.array([0.1, 0.2, 0.3]))


class TestInitialState:
    def test_q1(self):
        np.testing.assert_allclose(initial_state(1), [1 / np.sqrt(2), 1 / np.sqrt(2)])

    def test_q4(self):
        psi = initial_state(4)
        assert psi.shape == (16,)
        assert np.all(psi == psi[0])
        assert abs(np.linalg.norm(psi) - 1.0) < 1e-12

    def test_expectation_is_mean(self):
        rng = np.random.default_rng(0)
        diag = make_diag(rng.uniform(0, 9, size=16))
        assert expectation(initial_state(4), diag) == pytest.approx(diag.values.mean(), abs=1e-12)

    def test_rejects_q0(self):
        with pytest.raises(ValueError):
            initial_state(0)


class TestEvolve:
    def test_zero_parameters_give_initial_state(self):
        diag, mixer, _ = problem()
        psi = evolve(QaoaParams([0.0], [0.0]), diag, mixer)
        np.testing.assert_array_equal(psi, initial_state(diag.q))

    def test_q1_hand_product(self):
        # one layer on q=1: X-rotation times diagonal phase on the uniform state
        diag = make_diag([0.0, 1.0])
        mixer = build_mixer(1)
        gamma, beta = 0.9, 0.4
        psi = evolve(QaoaParams([gamma], [beta]), diag, mixer)
        phase = np.diag([1.0, np.exp(-1j * gamma)])
        rotation = np.array(
            [[np.cos(beta), -1j * np.sin(beta)], [-1j * np.sin(beta), np.cos(beta)]]
        )
        expected = rotation @ phase @ initial_state(1)
        np.testing.assert_allclose(psi, expected, atol=1e-14)

    def test_zero_padded_layer_is_exact_nesting(self):
        diag, mixer, _ = problem(seed=3)
        shallow = evolve(QaoaParams([0.7], [1.1]), diag, mixer)
        padded = evolve(QaoaParams([0.7, 0.0], [1.1, 0.0]), diag, mixer)
        np.testing.assert_array_equal(shallow, padded)

    def test_norm_preserved(self):
        rng = np.random.default_rng(1)
        for seed in range(5):
            diag, mixer, _ = problem(v=4, seed=seed)
            p = int(rng.integers(1, 7))
            params = QaoaParams(rng.uniform(0, 2 * np.pi, p), rng.uniform(0, 2 * np.pi, p))
            assert abs(np.linalg.norm(evolve(params, diag, mixer)) - 1.0) < 1e-9

    def test_rejects_extra_beta(self):
        diag, mixer, _ = problem()
        with pytest.raises(ValueError):
            evolve(QaoaParams([0.1], [0.2], extra_beta=0.3), diag, mixer)

    def test_dimension_mismatch(self):
        diag, _, _ = problem(v=3)
        with pytest.raises(ValueError):
            evolve(QaoaParams([0.1], [0.2]), diag, build_mixer(2))


class TestEvolveNpo:
    def test_zero_parameters_give_initial_state(self):
        diag, _, _ = problem()
        mixer = build_mixer(diag.q, mask=lambda i: i < 6)
        psi = evolve_npo(QaoaParams([0.0], [0.0], extra_beta=0.0), diag, mixer)
        np.testing.assert_array_equal(psi, initial_state(diag.q))

    def test_matches_evolve_when_only_mixers_act(self):
        # with gamma = 0 and extra_beta = 0 only a single mixer acts, so the
        # reversed layer order coincides with the standard iteration
        diag, _, _ = problem(seed=5)
        mixer = build_mixer(diag.q, mask=lambda i: True)
        beta = 1.3
        ours = evolve_npo(QaoaParams([0.0], [beta], extra_beta=0.0), diag, mixer)
        standard = evolve(QaoaParams([0.0], [beta]), diag, mixer)
        np.testing.assert_allclose(ours, standard, atol=1e-14)

    def test_masked_q2_matches_dense_composition(self):
        diag = make_diag([0.0, 2.0, 1.0, 4.0])
        mixer = build_mixer(2, mask=lambda i: i != 3)
        gamma, beta, extra = 0.8, 0.5, 1.1
        psi = evolve_npo(QaoaParams([gamma], [beta], extra_beta=extra), diag, mixer)
        u_b = dense_expm_oracle(-1j * beta * mixer.to_dense())
        u_b_extra = dense_expm_oracle(-1j * extra * mixer.to_dense())
        u_c = np.diag(np.exp(-1j * gamma * diag.values))
        expected = u_b_extra @ u_c @ u_b @ initial_state(2)
        np.testing.assert_allclose(psi, expected, atol=1e-10)

    def test_requires_extra_beta(self):
        diag, mixer, _ = problem()
        with pytest.raises(ValueError):
            evolve_npo(QaoaParams([0.1], [0.2]), diag, mixer)


class TestExpectation:
    def test_uniform_state(self):
        diag = make_diag([0.0, 1.0, 2.0, 3.0])
        assert expectation(initial_state(2), diag) == pytest.approx(1.5, abs=1e-14)

    def test_basis_state(self):
        diag = make_diag([0.0, 1.0, 2.0, 3.0])
        for k in range(4):
            basis = np.zeros(4, dtype=complex)
            basis[k] = 1.0
            assert expectation(basis, diag) == diag.values[k]

    def test_matches_triple_product(self):
        rng = np.random.default_rng(2)
        diag = make_diag(rng.uniform(0, 9, size=8))
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi /= np.linalg.norm(psi)
        dense = np.conj(psi) @ np.diag(diag.values) @ psi
        assert expectation(psi, diag) == pytest.approx(float(dense.real), abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            expectation(np.zeros(4, dtype=complex), make_diag([0.0, 1.0]))


class TestSample:
    def test_basis_state(self):
        basis = np.zeros(8, dtype=complex)
        basis[5] = 1.0
        assert np.all(sample(basis, 100, 0) == 5)

    def test_uniform_frequencies(self):
        draws = sample(initial_state(2), 100_000, 31)
        counts = np.bincount(draws, minlength=4)
        np.testing.assert_allclose(counts / draws.size, 0.25, atol=0.01)

    def test_deterministic(self):
        psi = evolve(QaoaParams([0.4], [0.9]), *problem(seed=8)[:2])
        np.testing.assert_array_equal(sample(psi, 50, 7), sample(psi, 50, 7))

    def test_rejects_zero_samples(self):
        with pytest.raises(ValueError):
            sample(initial_state(1), 0, 0)


class TestCostDistribution:
    def test_basis_state(self):
        diag = make_diag([0.0, 1.0, 2.0, 3.0])
        basis = np.zeros(4, dtype=complex)
        basis[2] = 1.0
        assert cost_distribution(basis, diag) == {2.0: 1.0}

    def test_uniform_with_repeated_costs(self):
        diag = make_diag([0.0, 0.0, 1.0, 1.0])
        dist = cost_distribution(initial_state(2), diag)
        assert dist[0.0] == pytest.approx(0.5, abs=1e-12)
        assert dist[1.0] == pytest.approx(0.5, abs=1e-12)

    def test_totals_and_expectation_identity(self):
        diag, mixer, _ = problem(v=4, seed=9)
        psi = evolve(QaoaParams([0.6, 0.2], [0.3, 0.8]), diag, mixer)
        dist = cost_distribution(psi, diag)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)
        recomputed = sum(cost * weight for cost, weight in dist.items())
        assert recomputed == pytest.approx(expectation(psi, diag), abs=1e-12)

    def test_feasible_key_count_bounded(self):
        diag, mixer, _ = problem(v=4, seed=10)
        psi = evolve(QaoaParams([0.5], [0.5]), diag, mixer)
        keys = set(cost_distribution(psi, diag))
        # distinct feasible costs cannot outnumber N_slots + 1 values
        assert len(keys) <= diag.num_slots + 1


class TestMetrics:
    def test_static_optimizer_has_zero_improvement(self):
        diag, mixer, d_min = problem(seed=11)
        x = np.array([0.8, 0.3])
        psi = evolve(QaoaParams.from_vector(x), diag, mixer)
        f = expectation(psi, diag)
        metrics = compute_metrics(diag, psi, d_min, evaluations=1, f_initial=f, num_samples=9, seed=1)
        assert metrics.expectation_improvement == 0.0

    def test_optimal_basis_state(self):
        diag, mixer, d_min = problem(seed=12)
        best_index = int(np.argmin(diag.minimization_values()[:6]))
        basis = np.zeros(len(diag), dtype=complex)
        basis[best_index] = 1.0
        metrics = compute_metrics(diag, basis, d_min, evaluations=5, f_initial=3.0, num_samples=9, seed=2)
        assert metrics.sample_error == 0.0
        assert metrics.expectation_error == 0.0
        assert metrics.infeasible_sample_fraction == 0.0

    def test_uniform_final_state_matches_classical(self):
        diag, mixer, d_min = problem(seed=13)
        uniform = qaoa.initial_state(diag.q)
        metrics = compute_metrics(diag, uniform, d_min, evaluations=2, f_initial=1.0, num_samples=9, seed=3)
        assert metrics.classical_comparison == 0.0

    def test_all_tail_samples_fall_back(self):
        diag, mixer, d_min = problem(seed=14)
        tail_state = np.zeros(len(diag), dtype=complex)
        tail_state[7] = 1.0  # index >= 3! is infeasible
        metrics = compute_metrics(diag, tail_state, d_min, evaluations=3, f_initial=1.0, num_samples=9, seed=4)
        assert metrics.infeasible_sample_fraction == 1.0
        assert metrics.sample_error == diag.num_slots - d_min

    def test_alternate_mode_scores_on_minimization_scale(self):
        diag, mixer, d_min = problem(seed=15, mode="alternate_penalty")
        best_index = int(np.argmin(diag.minimization_values()[:6]))
        basis = np.zeros(len(diag), dtype=complex)
        basis[best_index] = 1.0
        metrics = compute_metrics(diag, basis, d_min, evaluations=4, f_initial=9.0, num_samples=9, seed=5)
        assert metrics.sample_error == 0.0
        assert metrics.expectation_error == 0.0

    def test_requires_provenance(self):
        bare = make_diag([0.0, 1.0])
        with pytest.raises(ValueError):
            compute_metrics(bare, initial_state(1), 0, evaluations=1, f_initial=0.0, num_samples=4, seed=0)

    def test_metrics_validation(self):
        with pytest.raises(ValueError):
            qaoa.Metrics(0, 0.0, 0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            qaoa.Metrics(1, 0.0, 0.0, 0.0, 0.0, 1.5)
