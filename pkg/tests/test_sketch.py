"""Randomized factorization: sketches, range capture, printed error bounds."""

import math

import numpy as np
import pytest

from randsysid.errors import NumericalError
from randsysid.linalg import svd
from randsysid.rng import make_rng
from randsysid.sketch import (
    KINDS,
    RandomizedSVD,
    RsvdConfig,
    adaptive_range_finder,
    basis_error_bound,
    gaussian_test_matrix,
    range_finder,
    rsvd,
    srft_basis_bound,
    srft_test_matrix,
)
from randsysid.sketch import test_matrix as make_test_matrix


def low_rank(rows, cols, rank, seed, decay=1.0):
    rng = make_rng(seed)
    U = np.linalg.qr(rng.standard_normal((rows, rank)))[0]
    V = np.linalg.qr(rng.standard_normal((cols, rank)))[0]
    s = decay ** np.arange(rank)
    return (U * s) @ V.T


def true_residual(A, P):
    return float(np.linalg.svd(A - P @ (P.T @ A), compute_uv=False)[0])


class TestRsvdConfig:
    def test_defaults(self):
        cfg = RsvdConfig(rank=3)
        assert cfg.oversample == 10 and cfg.power == 0 and cfg.kind == "gaussian"

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(rank=0),
            dict(rank=2, oversample=0),
            dict(rank=2, power=-1),
            dict(rank=2, kind="hadamard"),
        ],
    )
    def test_rejects_bad_fields(self, kwargs):
        with pytest.raises(ValueError):
            RsvdConfig(**kwargs)

    def test_validate_for_window(self):
        cfg = RsvdConfig(rank=8, oversample=5)
        with pytest.raises(ValueError, match=r"rank\+oversample = 13 exceeds min\(10, 20\) = 10"):
            cfg.validate_for((10, 20))
        cfg.validate_for((13, 20))


class TestTestMatrices:
    def test_gaussian_shape_and_determinism(self):
        a = gaussian_test_matrix(20, 6, seed=3)
        assert a.shape == (20, 6)
        assert np.array_equal(a, gaussian_test_matrix(20, 6, seed=3))
        assert not np.array_equal(a, gaussian_test_matrix(20, 6, seed=4))

    def test_srft_shape(self):
        assert srft_test_matrix(16, 5, seed=0).shape == (16, 10)

    def test_srft_column_energy(self):
        # each complex column carries norm sqrt(n/w), split across its Re/Im halves
        n, w = 32, 8
        omega = srft_test_matrix(n, w, seed=1)
        energy = np.sum(omega[:, :w] ** 2, axis=0) + np.sum(omega[:, w:] ** 2, axis=0)
        assert np.allclose(energy, n / w, atol=1e-12)
        assert np.linalg.norm(omega) ** 2 == pytest.approx(n, rel=1e-12)

    def test_srft_full_width_is_orthogonal(self):
        omega = srft_test_matrix(8, 8, seed=2)
        assert np.allclose(omega @ omega.T, np.eye(8), atol=1e-12)

    def test_srft_width_limit(self):
        with pytest.raises(ValueError, match="w <= n"):
            srft_test_matrix(4, 5, seed=0)

    def test_dispatcher(self):
        assert np.array_equal(make_test_matrix(9, 4, "gaussian", 7), gaussian_test_matrix(9, 4, 7))
        assert make_test_matrix(9, 4, "srft", 7).shape == (9, 8)
        with pytest.raises(ValueError, match="kind"):
            make_test_matrix(9, 4, "sparse", 7)
        assert KINDS == ("gaussian", "srft")


class TestRangeFinder:
    def test_captures_exact_low_rank(self):
        A = low_rank(30, 20, 4, seed=5)
        P = range_finder(A, RsvdConfig(rank=4, oversample=4, seed=0))
        assert np.allclose(P.T @ P, np.eye(P.shape[1]), atol=1e-12)
        assert true_residual(A, P) < 1e-10

    def test_basis_width_trims_to_numerical_rank(self):
        A = low_rank(25, 15, 3, seed=6)
        P = range_finder(A, RsvdConfig(rank=5, oversample=5, seed=0))
        assert P.shape == (25, 3)

    def test_stabilized_power_matches_plain_on_easy_data(self):
        A = low_rank(30, 20, 4, seed=7)
        plain = range_finder(A, RsvdConfig(rank=4, oversample=4, power=2, seed=1))
        stab = range_finder(A, RsvdConfig(rank=4, oversample=4, power=2, seed=1, stabilized=True))
        assert true_residual(A, plain) < 1e-9
        assert true_residual(A, stab) < 1e-9

    def test_window_validation(self):
        with pytest.raises(ValueError, match="exceeds"):
            range_finder(np.eye(6), RsvdConfig(rank=4, oversample=4))


class TestRsvd:
    def test_diagonal_example(self):
        A = np.diag([3.0, 2.0, 1.0, 0.0])
        F = rsvd(A, RsvdConfig(rank=3, oversample=1, seed=0))
        assert np.allclose(F.S, [3.0, 2.0, 1.0], atol=1e-10)
        assert np.allclose((F.U * F.S) @ F.V.T, A, atol=1e-10)

    def test_exact_on_low_rank(self):
        A = low_rank(40, 25, 5, seed=8, decay=0.5)
        F = rsvd(A, RsvdConfig(rank=5, oversample=8, seed=2))
        ref = np.linalg.svd(A, compute_uv=False)[:5]
        assert np.allclose(F.S, ref, rtol=1e-10)
        assert np.linalg.norm((F.U * F.S) @ F.V.T - A) < 1e-10

    def test_cannot_beat_optimal_truncation(self):
        A = make_rng(9).standard_normal((30, 30))
        sigma = np.linalg.svd(A, compute_uv=False)
        F = rsvd(A, RsvdConfig(rank=4, oversample=6, seed=3))
        err = np.linalg.svd(A - (F.U * F.S) @ F.V.T, compute_uv=False)[0]
        assert err >= sigma[4] * (1.0 - 1e-12)

    def test_width_capped_by_numerical_rank(self):
        A = low_rank(20, 12, 2, seed=10)
        F = rsvd(A, RsvdConfig(rank=4, oversample=4, seed=0))
        assert F.S.shape == (2,)

    def test_power_iteration_reduces_error(self):
        # slow spectral decay is where plain sketching struggles
        rng = make_rng(11)
        U = np.linalg.qr(rng.standard_normal((60, 60)))[0]
        V = np.linalg.qr(rng.standard_normal((40, 40)))[0]
        s = 0.92 ** np.arange(40)
        A = (U[:, :40] * s) @ V.T
        errs = {q: [] for q in (0, 2)}
        for seed in range(10):
            for q in (0, 2):
                cfg = RsvdConfig(rank=5, oversample=5, power=q, seed=seed)
                F = rsvd(A, cfg)
                errs[q].append(np.linalg.svd(A - (F.U * F.S) @ F.V.T, compute_uv=False)[0])
        assert np.mean(errs[2]) < np.mean(errs[0])

    def test_srft_kind(self):
        A = low_rank(24, 18, 3, seed=12)
        F = rsvd(A, RsvdConfig(rank=3, oversample=5, kind="srft", seed=4))
        assert np.linalg.norm((F.U * F.S) @ F.V.T - A) < 1e-9


class TestAdaptiveRangeFinder:
    def test_certifies_residual(self):
        A = low_rank(30, 20, 4, seed=13)
        A = A + 1e-12 * make_rng(14).standard_normal(A.shape)
        P = adaptive_range_finder(A, eps=1e-6, seed=0)
        assert np.allclose(P.T @ P, np.eye(P.shape[1]), atol=1e-10)
        assert true_residual(A, P) <= 1e-6

    def test_zero_matrix_needs_no_basis(self):
        P = adaptive_range_finder(np.zeros((7, 5)), eps=1e-8)
        assert P.shape == (7, 0)

    def test_unreachable_tolerance(self):
        with pytest.raises(NumericalError, match="tolerance unreachable") as info:
            adaptive_range_finder(np.eye(10), eps=1e-17, seed=0)
        assert info.value.iterations == 10

    def test_probe_minimum(self):
        with pytest.raises(ValueError):
            adaptive_range_finder(np.eye(4), eps=0.1, probes=4)

    def test_eps_validation(self):
        with pytest.raises(ValueError, match="eps"):
            adaptive_range_finder(np.eye(4), eps=0.0)


class TestBasisErrorBound:
    def test_frozen_values(self):
        assert basis_error_bound(2, 2, 0, 4, 4, 1.0) == pytest.approx(
            6.258444590532212, rel=1e-15
        )
        assert basis_error_bound(10, 10, 1, 200, 100, 2.0**-11) == pytest.approx(
            0.0011651333199488199, rel=1e-15
        )
        assert basis_error_bound(3, 4, 2, 9, 16, 0.5) == pytest.approx(
            0.7248729532031201, rel=1e-15
        )

    def test_scales_linearly_in_sigma(self):
        one = basis_error_bound(4, 6, 1, 50, 40, 1.0)
        assert basis_error_bound(4, 6, 1, 50, 40, 0.25) == pytest.approx(one / 4)
        assert basis_error_bound(4, 6, 1, 50, 40, 0.0) == 0.0

    def test_power_flattens_the_bracket(self):
        vals = [basis_error_bound(5, 5, q, 80, 60, 1.0) for q in range(5)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] > 1.0  # bracket root never dips below sigma_next

    @pytest.mark.parametrize(
        "args",
        [(1, 2, 0, 9, 9, 1.0), (2, 1, 0, 9, 9, 1.0), (5, 5, 0, 9, 9, 1.0), (2, 2, 0, 9, 9, -1.0)],
    )
    def test_preconditions(self, args):
        with pytest.raises(ValueError):
            basis_error_bound(*args)


class TestSrftBasisBound:
    def test_frozen_value(self):
        # 1 + sqrt(1 + 700/20) = 7, times sigma
        assert srft_basis_bound(10, 10, 100, 2.0**-11) == 7.0 * 2.0**-11

    def test_hand_formula(self):
        assert srft_basis_bound(1, 1, 2, 1.0) == pytest.approx(1.0 + math.sqrt(8.0), rel=1e-15)

    def test_sigma_validation(self):
        with pytest.raises(ValueError):
            srft_basis_bound(2, 2, 8, -0.5)


class TestRandomizedSVDEstimator:
    def test_fit_attributes(self):
        X = low_rank(30, 12, 3, seed=15)
        est = RandomizedSVD(rank=3, oversample=5, seed=0).fit(X)
        assert est.components_.shape == (3, 12)
        assert est.singular_values_.shape == (3,)
        assert est.U_.shape == (30, 3)

    def test_fit_transform_matches_scores(self):
        X = low_rank(20, 10, 2, seed=16)
        est = RandomizedSVD(rank=2, oversample=5, seed=1)
        scores = est.fit_transform(X)
        assert np.allclose(scores, est.U_ * est.singular_values_)
        assert np.allclose(scores, est.transform(X), atol=1e-10)

    def test_inverse_transform_reconstructs(self):
        X = low_rank(20, 10, 2, seed=17)
        est = RandomizedSVD(rank=2, oversample=5, seed=2).fit(X)
        assert np.allclose(est.inverse_transform(est.transform(X)), X, atol=1e-10)

    def test_not_fitted(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            RandomizedSVD().transform(np.eye(3))

    def test_get_set_params(self):
        est = RandomizedSVD(rank=4, power=1)
        params = est.get_params()
        assert params["rank"] == 4 and params["power"] == 1
        est.set_params(rank=2, test_matrix="srft")
        assert est.rank == 2 and est.test_matrix == "srft"
