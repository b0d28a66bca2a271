"""Seeded stream derivation and the validation helpers."""

import numpy as np
import pytest

from randsysid._validate import as_matrix, check_count, check_nonneg
from randsysid.rng import make_rng, spawn_rngs


class TestMakeRng:
    def test_deterministic(self):
        assert np.array_equal(
            make_rng(42).standard_normal(16), make_rng(42).standard_normal(16)
        )

    def test_tuple_components_separate_streams(self):
        # (s, 0) collides with plain s by SeedSequence's entropy rules;
        # what matters is that sibling sub-streams never collide
        draws = [make_rng((5, k)).standard_normal(16) for k in range(3)]
        assert not np.array_equal(draws[0], draws[1])
        assert not np.array_equal(draws[1], draws[2])
        assert not np.array_equal(draws[0], draws[2])

    def test_tuple_order_matters(self):
        assert not np.array_equal(
            make_rng((1, 2)).standard_normal(8), make_rng((2, 1)).standard_normal(8)
        )

    def test_accepts_seed_sequence(self):
        ss = np.random.SeedSequence(7)
        assert np.array_equal(
            make_rng(ss).standard_normal(8),
            make_rng(np.random.SeedSequence(7)).standard_normal(8),
        )


class TestSpawnRngs:
    def test_count_and_independence(self):
        streams = spawn_rngs(3, 4)
        assert len(streams) == 4
        draws = [rng.standard_normal(8) for rng in streams]
        for i in range(4):
            for j in range(i + 1, 4):
                assert not np.array_equal(draws[i], draws[j])

    def test_stable_across_calls(self):
        a = [rng.standard_normal(4) for rng in spawn_rngs(9, 3)]
        b = [rng.standard_normal(4) for rng in spawn_rngs(9, 3)]
        for x, y in zip(a, b):
            assert np.array_equal(x, y)

    def test_prefix_stability(self):
        # asking for more streams never changes the earlier ones
        a = spawn_rngs(11, 2)[0].standard_normal(4)
        b = spawn_rngs(11, 5)[0].standard_normal(4)
        assert np.array_equal(a, b)


class TestValidators:
    def test_as_matrix_column_promotion(self):
        A = as_matrix([1.0, 2.0])
        assert A.shape == (2, 1)

    @pytest.mark.parametrize("bad", [np.empty((0, 3)), np.ones((2, 2, 2)), [[np.nan]]])
    def test_as_matrix_rejects(self, bad):
        with pytest.raises(ValueError):
            as_matrix(bad)

    def test_check_count(self):
        assert check_count(3.0, "k") == 3
        with pytest.raises(ValueError, match="k must be"):
            check_count(2.5, "k")
        with pytest.raises(ValueError):
            check_count(0, "k")
        assert check_count(0, "k", minimum=0) == 0

    def test_check_nonneg(self):
        assert check_nonneg(0.0, "x") == 0.0
        with pytest.raises(ValueError):
            check_nonneg(-1e-9, "x")
        with pytest.raises(ValueError):
            check_nonneg(float("nan"), "x")
