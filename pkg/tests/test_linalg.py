"""Dense kernel contracts: conventions, rank handling, error mapping."""

import numpy as np
import pytest

from randsysid.errors import NumericalError
from randsysid.linalg import (
    EPS,
    MatrixNorms,
    SvdFactors,
    norms,
    orth,
    pinv,
    rank_cutoff,
    spectral_norm,
    svd,
    truncate,
)
from randsysid.rng import make_rng


def random_matrix(rows, cols, seed):
    return make_rng(seed).standard_normal((rows, cols))


def rank_deficient(rows, cols, rank, seed):
    rng = make_rng(seed)
    return rng.standard_normal((rows, rank)) @ rng.standard_normal((rank, cols))


class TestOrth:
    def test_orthonormal_columns(self):
        for seed in range(5):
            Q = orth(random_matrix(12, 7, seed))
            assert Q.shape == (12, 7)
            assert np.allclose(Q.T @ Q, np.eye(7), atol=1e-12)

    def test_projection_reproduces_input(self):
        A = random_matrix(10, 4, 3)
        Q = orth(A)
        assert np.allclose(Q @ (Q.T @ A), A, atol=1e-12)

    def test_rank_deficient_input_is_trimmed(self):
        A = rank_deficient(20, 8, 3, 11)
        Q = orth(A)
        assert Q.shape == (20, 3)
        assert np.allclose(Q @ (Q.T @ A), A, atol=1e-10)

    def test_zero_matrix_raises(self):
        with pytest.raises(NumericalError, match="zero range"):
            orth(np.zeros((4, 3)))

    def test_deterministic(self):
        A = random_matrix(9, 5, 7)
        assert np.array_equal(orth(A), orth(A.copy()))


class TestSvd:
    def test_diagonal_oracle(self):
        F = svd(np.diag([3.0, 2.0, 1.0]))
        assert np.allclose(F.S, [3.0, 2.0, 1.0])
        assert np.allclose(F.U, np.eye(3))
        assert np.allclose(F.V, np.eye(3))

    def test_negative_diagonal_sign_convention(self):
        # sign flips are pushed into V so U's largest entries stay nonnegative
        F = svd(np.diag([-3.0, 2.0]))
        assert np.allclose(F.U, np.eye(2))
        assert np.allclose(F.V, np.diag([-1.0, 1.0]))

    def test_reconstruction(self):
        for seed, (rows, cols) in enumerate([(8, 5), (5, 8), (6, 6)]):
            A = random_matrix(rows, cols, seed)
            F = svd(A)
            assert F.U.shape == (rows, min(rows, cols))
            assert F.V.shape == (cols, min(rows, cols))
            assert np.allclose((F.U * F.S) @ F.V.T, A, atol=1e-12)

    def test_orthonormal_factors(self):
        F = svd(random_matrix(7, 4, 2))
        assert np.allclose(F.U.T @ F.U, np.eye(4), atol=1e-12)
        assert np.allclose(F.V.T @ F.V, np.eye(4), atol=1e-12)

    def test_singular_values_sorted_nonnegative(self):
        F = svd(random_matrix(10, 6, 5))
        assert np.all(F.S[:-1] >= F.S[1:])
        assert np.all(F.S >= 0)

    def test_sign_convention_largest_entry(self):
        for seed in range(5):
            F = svd(random_matrix(9, 6, seed))
            lead = np.argmax(np.abs(F.U), axis=0)
            assert np.all(F.U[lead, np.arange(F.U.shape[1])] >= 0)

    def test_rank_bound_property(self):
        # upper bound only: the factor width, not the numerical rank
        assert svd(rank_deficient(10, 8, 3, 4)).rank_bound == 8
        assert svd(random_matrix(4, 9, 4)).rank_bound == 4


class TestSvdFactors:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            SvdFactors(U=np.eye(3), S=np.ones(2), V=np.eye(3))

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            SvdFactors(U=np.eye(3), S=np.ones(3), V=np.eye(4))


class TestTruncate:
    def test_diagonal_oracle(self):
        F = svd(np.diag([3.0, 2.0, 1.0]))
        assert np.allclose(truncate(F, 2), np.diag([3.0, 2.0, 0.0]))

    def test_truncation_error_is_next_singular_value(self):
        A = random_matrix(12, 9, 8)
        F = svd(A)
        for r in (1, 3, 5):
            err = np.linalg.svd(A - truncate(F, r), compute_uv=False)[0]
            assert err == pytest.approx(F.S[r], rel=1e-10)

    def test_rank_validation(self):
        F = svd(np.eye(3))
        with pytest.raises(ValueError):
            truncate(F, 0)
        with pytest.raises(ValueError):
            truncate(F, 4)


class TestPinv:
    def test_moore_penrose_identities(self):
        cases = [random_matrix(8, 5, 0), random_matrix(5, 8, 1), rank_deficient(9, 7, 3, 2)]
        for A in cases:
            P = pinv(A)
            assert np.allclose(A @ P @ A, A, atol=1e-10)
            assert np.allclose(P @ A @ P, P, atol=1e-10)
            assert np.allclose((A @ P).T, A @ P, atol=1e-10)
            assert np.allclose((P @ A).T, P @ A, atol=1e-10)

    def test_matches_reference(self):
        A = random_matrix(7, 4, 9)
        assert np.allclose(pinv(A), np.linalg.pinv(A), atol=1e-12)

    def test_zero_matrix(self):
        assert np.array_equal(pinv(np.zeros((3, 5))), np.zeros((5, 3)))


class TestNorms:
    def test_spectral_matches_svd_route(self):
        # two independent routes: power iteration vs LAPACK
        for seed in range(8):
            A = random_matrix(11, 7, seed)
            assert spectral_norm(A) == pytest.approx(float(svd(A).S[0]), rel=1e-8)

    def test_rank_one_analytic(self):
        u = np.array([3.0, 4.0])
        v = np.array([1.0, 2.0, 2.0])
        assert spectral_norm(np.outer(u, v)) == pytest.approx(15.0, rel=1e-10)

    def test_zero_matrix(self):
        assert spectral_norm(np.zeros((4, 4))) == 0.0
        assert norms(np.zeros((2, 3))) == MatrixNorms(0.0, 0.0)

    def test_frobenius(self):
        A = random_matrix(6, 6, 3)
        result = norms(A)
        assert result.frobenius == pytest.approx(float(np.linalg.norm(A)), rel=1e-14)
        assert result.spectral <= result.frobenius + 1e-12


def test_rank_cutoff_formula():
    assert rank_cutoff((3, 7), 2.0) == 7 * EPS * 2.0
    assert rank_cutoff((10, 4), 0.0) == 0.0
