"""Stochastic noise extraction, correction matrices, and their norms."""

import numpy as np
import pytest

from qreadout.errors import (
    ColumnSumViolationError,
    OutOfRangeError,
    SingularMatrixError,
)
from qreadout.fixtures import FIXTURE_NAMES, device_povm
from qreadout.noise import (
    check_stochastic,
    classical_part,
    correction_matrix,
    one_to_one_norm,
    product_stochastic,
    single_qubit_stochastic,
)
from qreadout.povm import diagonal_projective, tensor_povm


class TestStochastic:
    def test_single_qubit_layout(self):
        lam = single_qubit_stochastic(0.037, 0.137)
        assert np.allclose(lam, [[0.963, 0.137], [0.037, 0.863]])

    def test_rejects_bad_rates(self):
        with pytest.raises(OutOfRangeError):
            single_qubit_stochastic(-0.1, 0.2)
        with pytest.raises(OutOfRangeError):
            single_qubit_stochastic(0.3, 1.2)

    def test_check_rejects_negative_entry(self):
        with pytest.raises(Exception):
            check_stochastic(np.array([[1.1, 0.0], [-0.1, 1.0]]))

    def test_check_rejects_column_sum(self):
        with pytest.raises(Exception):
            check_stochastic(np.array([[0.9, 0.0], [0.2, 1.0]]))

    def test_product_is_kron(self):
        a = single_qubit_stochastic(0.1, 0.2)
        b = single_qubit_stochastic(0.05, 0.3)
        assert np.allclose(product_stochastic([a, b]), np.kron(a, b))


class TestNorms:
    def test_max_column_sum(self):
        m = np.array([[1.0, -1.0], [2.0, 3.0]])
        assert one_to_one_norm(m) == pytest.approx(4.0)

    def test_correction_norm_closed_form(self):
        # For the 2x2 case the inverse's column sums work out to
        # (1 + |p - q|) / |1 - p - q|.
        for p, q in [(0.037, 0.137), (0.01, 0.37), (0.2, 0.05), (0.0, 0.0)]:
            if p == q == 0.0:
                expected = 1.0
            else:
                expected = (1.0 + abs(p - q)) / abs(1.0 - p - q)
            c = correction_matrix(single_qubit_stochastic(p, q))
            assert c.norm_1to1 == pytest.approx(expected, rel=1e-12)

    def test_norm_multiplicative_over_kron(self):
        a = single_qubit_stochastic(0.037, 0.137)
        b = single_qubit_stochastic(0.01, 0.37)
        ca = correction_matrix(a)
        cb = correction_matrix(b)
        cab = correction_matrix(product_stochastic([a, b]))
        assert cab.norm_1to1 == pytest.approx(ca.norm_1to1 * cb.norm_1to1, rel=1e-10)


class TestCorrectionMatrix:
    def test_inverse_is_exact(self):
        lam = single_qubit_stochastic(0.1, 0.2)
        c = correction_matrix(lam)
        assert np.allclose(c.matrix @ lam, np.eye(2), atol=1e-14)

    def test_correction_columns_sum_to_one(self):
        # The inverse of a left-stochastic matrix keeps unit column sums
        # even though entries go negative.
        c = correction_matrix(single_qubit_stochastic(0.3, 0.4))
        assert np.allclose(c.matrix.sum(axis=0), 1.0)

    def test_singular_flagged(self):
        with pytest.raises(SingularMatrixError):
            correction_matrix(single_qubit_stochastic(0.5, 0.5))

    def test_condition_is_norm_product(self):
        lam = single_qubit_stochastic(0.037, 0.137)
        c = correction_matrix(lam)
        assert c.condition == pytest.approx(one_to_one_norm(lam) * c.norm_1to1)


class TestClassicalPart:
    def test_fixture_q0_decomposition(self):
        dec = classical_part(device_povm("ibm_q0"))
        assert np.allclose(dec.stochastic, [[0.963, 0.137], [0.037, 0.863]],
                           atol=1e-12)
        assert dec.coherent_distance == pytest.approx(0.004, abs=1e-12)
        assert dec.coherent_method == "exact"
        assert abs(dec.column_residual) < 1e-12

    def test_residuals_are_offdiagonal(self):
        for name in FIXTURE_NAMES:
            dec = classical_part(device_povm(name))
            for res in dec.residuals:
                assert abs(res[0, 0]) < 1e-12
                assert abs(res[1, 1]) < 1e-12

    def test_classical_effects_rebuild_stochastic(self):
        dec = classical_part(device_povm("rigetti_q4"))
        rebuilt = dec.classical_effects()
        idx = np.arange(2)
        assert np.allclose(rebuilt[:, idx, idx].real, dec.stochastic)

    def test_small_column_drift_renormalized(self):
        povm = device_povm("ibm_q2").copy()
        povm[0, 0, 0] += 3e-7
        dec = classical_part(povm)
        assert dec.column_residual == pytest.approx(3e-7, rel=1e-3)
        assert np.allclose(dec.stochastic.sum(axis=0), 1.0, atol=1e-15)

    def test_large_column_drift_rejected(self):
        povm = device_povm("ibm_q2").copy()
        povm[0, 0, 0] += 1e-3
        with pytest.raises(ColumnSumViolationError) as exc:
            classical_part(povm)
        assert exc.value.column == 0

    def test_explicit_ideal_matches_default(self):
        q3 = device_povm("ibm_q3")
        a = classical_part(q3)
        b = classical_part(q3, ideal=diagonal_projective(2))
        assert np.array_equal(a.stochastic, b.stochastic)
        assert a.coherent_distance == b.coherent_distance

    def test_two_qubit_coherent_distance_exact(self):
        pair = tensor_povm(device_povm("ibm_q0"), device_povm("ibm_q1"))
        dec = classical_part(pair)
        assert dec.coherent_method == "exact"
        assert 0.0 < dec.coherent_distance < 0.02
