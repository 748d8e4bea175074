"""Frequency correction, simplex projection, and the error budget."""

import math

import numpy as np
import pytest

from qreadout.distances import DistanceBound
from qreadout.errors import OutOfRangeError, SumViolationError
from qreadout.mitigation import (
    ErrorBudget,
    assess,
    correct,
    delta_bound,
    mitigate,
    project_to_simplex,
    statistical_epsilon,
)
from qreadout.noise import correction_matrix, single_qubit_stochastic


class TestCorrect:
    def test_hand_inverted_2x2(self):
        # inv([[0.9, 0.2], [0.1, 0.8]]) has determinant 0.7, and applying
        # it to [0.6, 0.4] lands on [4/7, 3/7].
        c = correction_matrix(np.array([[0.9, 0.2], [0.1, 0.8]]))
        out = correct(np.array([0.6, 0.4]), c)
        assert out == pytest.approx([4.0 / 7.0, 3.0 / 7.0], abs=1e-14)

    def test_accepts_plain_matrix(self):
        out = correct(np.array([0.5, 0.5]), np.eye(2))
        assert out == pytest.approx([0.5, 0.5])

    def test_roundtrip_with_noise_matrix(self, rng):
        lam = single_qubit_stochastic(0.08, 0.21)
        c = correction_matrix(lam)
        for _ in range(20):
            p = rng.dirichlet(np.ones(2))
            assert correct(lam @ p, c) == pytest.approx(p, abs=1e-12)


class TestSimplexProjection:
    def test_two_entry_example(self):
        projected, alpha = project_to_simplex(np.array([1.2, -0.2]))
        assert projected == pytest.approx([1.0, 0.0], abs=1e-15)
        assert alpha == pytest.approx(0.2)

    def test_three_entry_example(self):
        projected, alpha = project_to_simplex(np.array([0.7, 0.5, -0.2]))
        assert projected == pytest.approx([0.6, 0.4, 0.0], abs=1e-15)
        assert alpha == pytest.approx(0.2)

    def test_interior_point_untouched(self):
        v = np.array([0.3, 0.3, 0.4])
        projected, alpha = project_to_simplex(v)
        assert np.array_equal(projected, v)
        assert alpha == 0.0

    def test_alpha_is_tv_moved(self, rng):
        for _ in range(50):
            v = rng.dirichlet(np.ones(6))
            noise = rng.normal(scale=0.1, size=6)
            noise -= noise.mean()
            quasi = v + noise
            projected, alpha = project_to_simplex(quasi)
            assert alpha == pytest.approx(0.5 * np.abs(projected - quasi).sum(),
                                          abs=1e-12)
            assert projected.min() >= 0.0
            assert projected.sum() == pytest.approx(1.0, abs=1e-9)

    def test_rejects_wrong_sum(self):
        with pytest.raises(SumViolationError):
            project_to_simplex(np.array([0.2, 0.2]))

    def test_idempotent(self, rng):
        v = rng.dirichlet(np.ones(4)) + np.array([0.3, -0.1, -0.1, -0.1])
        projected, _ = project_to_simplex(v)
        again, alpha = project_to_simplex(projected)
        assert np.allclose(again, projected, atol=1e-12)
        assert alpha <= 1e-12


class TestStatisticalEpsilon:
    def test_headline_value(self):
        # sqrt((log(2^2 - 2) - log 0.01) / (2 * 8192))
        expected = math.sqrt((math.log(2.0) - math.log(0.01)) / 16384.0)
        eps = statistical_epsilon(8192, 2, 0.01)
        assert eps == pytest.approx(expected, rel=1e-15)
        assert eps == pytest.approx(0.0180, abs=5e-4)

    def test_decreases_with_shots(self):
        assert statistical_epsilon(100_000, 2) < statistical_epsilon(1000, 2)

    def test_grows_with_outcomes(self):
        assert statistical_epsilon(8192, 4) > statistical_epsilon(8192, 2)

    def test_rejects_bad_arguments(self):
        with pytest.raises(OutOfRangeError):
            statistical_epsilon(0, 2)
        with pytest.raises(OutOfRangeError):
            statistical_epsilon(8192, 1)
        with pytest.raises(OutOfRangeError):
            statistical_epsilon(8192, 2, pr_err=0.0)


class TestBudget:
    def test_delta_arithmetic(self):
        assert delta_bound(1.5, 0.01, 0.02) == pytest.approx(0.045)

    def test_fixture_q0_budget(self):
        # Frozen from the bundled ibm_q0 numbers: norm 1.331719128329298,
        # coherent residual 0.004, eps at (8192, 2, 0.01).
        norm = (1.0 + abs(0.037 - 0.137)) / abs(1.0 - 0.037 - 0.137)
        eps = statistical_epsilon(8192, 2, 0.01)
        delta = delta_bound(norm, 0.004, eps)
        assert delta == pytest.approx(norm * (eps + 0.004), rel=1e-15)
        assert delta == pytest.approx(0.0293, abs=2e-4)

    def test_total_includes_alpha(self):
        budget = ErrorBudget(epsilon=0.01, norm_1to1=1.2, coherent_distance=0.0,
                             delta=0.012, alpha=0.005, shots=1000, pr_err=0.01)
        assert budget.total == pytest.approx(0.017)


class TestAssess:
    def test_strict_inequality(self):
        reference = DistanceBound(lower=0.1, upper=0.1, method="exact")
        good = ErrorBudget(epsilon=0.01, norm_1to1=1.0, coherent_distance=0.0,
                           delta=0.05, alpha=0.0, shots=100, pr_err=0.01)
        ok, rhs = assess(good, reference)
        assert ok
        assert rhs == pytest.approx(0.11)

    def test_tie_fails(self):
        reference = DistanceBound(lower=0.1, upper=0.1, method="exact")
        tie = ErrorBudget(epsilon=0.01, norm_1to1=1.0, coherent_distance=0.0,
                          delta=0.11, alpha=0.0, shots=100, pr_err=0.01)
        ok, _ = assess(tie, reference)
        assert not ok


class TestMitigate:
    def test_exact_probabilities_recover_ideal(self, rng):
        lam = single_qubit_stochastic(0.05, 0.15)
        c = correction_matrix(lam)
        reference = DistanceBound(lower=0.15, upper=0.15, method="exact")
        p_ideal = rng.dirichlet(np.ones(2))
        report = mitigate(lam @ p_ideal, c, coherent_distance=0.0,
                          reference=reference, shots=None)
        assert report.corrected == pytest.approx(p_ideal, abs=1e-12)
        assert report.budget.alpha == 0.0
        assert report.budget.epsilon == 0.0
        assert report.successful

    def test_projection_engages_on_noisy_input(self):
        lam = single_qubit_stochastic(0.3, 0.02)
        c = correction_matrix(lam)
        reference = DistanceBound(lower=0.3, upper=0.3, method="exact")
        freqs = np.array([0.99, 0.01])  # outside the corrected simplex
        report = mitigate(freqs, c, coherent_distance=0.0, reference=reference,
                          shots=8192)
        assert report.projection_applied
        assert report.budget.alpha > 0.0
        assert report.corrected.min() >= 0.0

    def test_margin_sign_matches_verdict(self):
        lam = single_qubit_stochastic(0.05, 0.1)
        c = correction_matrix(lam)
        reference = DistanceBound(lower=0.1, upper=0.1, method="exact")
        report = mitigate(np.array([0.7, 0.3]), c, coherent_distance=0.0,
                          reference=reference, shots=10_000)
        assert report.successful == (report.margin > 0.0)
