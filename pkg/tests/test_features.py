"""Tests for the graded-lexicographic polynomial feature expansion."""

import math

import numpy as np
import pytest

from qdiscord.features import (
    degree_for_dim,
    enumerate_multi_indices,
    feature_dim,
    feature_map,
    feature_matrix,
)


class TestFeatureDim:
    def test_closed_form(self):
        assert feature_dim(2, 2) == 6
        assert feature_dim(7, 6) == 1716
        assert feature_dim(9, 6) == 5005

    def test_full_tables(self):
        seven = [feature_dim(7, L) for L in range(1, 10)]
        nine = [feature_dim(9, L) for L in range(1, 10)]
        assert seven == [8, 36, 120, 330, 792, 1716, 3432, 6435, 11440]
        assert nine == [10, 55, 220, 715, 2002, 5005, 11440, 24310, 48620]

    def test_matches_enumeration(self):
        for n in (1, 2, 3, 5):
            for L in (1, 2, 4):
                assert feature_dim(n, L) == len(enumerate_multi_indices(n, L))

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            feature_dim(0, 3)
        with pytest.raises(ValueError):
            feature_dim(3, 0)

    def test_exact_at_large_size(self):
        # python integers are exact at any size, so no overflow is possible
        assert feature_dim(40, 40) == math.comb(80, 40)

    def test_inverse_lookup(self):
        assert degree_for_dim(7, 1716) == 6
        assert degree_for_dim(9, 5005) == 6
        with pytest.raises(ValueError):
            degree_for_dim(7, 1717)


class TestOrdering:
    def test_two_variable_degree_one(self):
        assert enumerate_multi_indices(2, 1) == [(0, 0), (0, 1), (1, 0)]

    def test_graded_then_lexicographic(self):
        indices = enumerate_multi_indices(3, 4)
        degrees = [sum(i) for i in indices]
        assert degrees == sorted(degrees)
        for d in range(5):
            block = [i for i in indices if sum(i) == d]
            assert block == sorted(block)

    def test_unique_and_complete(self):
        indices = enumerate_multi_indices(4, 3)
        assert len(set(indices)) == len(indices) == feature_dim(4, 3)
        assert all(sum(i) <= 3 for i in indices)

    def test_leading_monomial_is_constant(self):
        assert enumerate_multi_indices(5, 2)[0] == (0, 0, 0, 0, 0)


class TestFeatureMap:
    def test_two_variable_example(self):
        # order: 1, y, x, y^2, xy, x^2 for (x, y) with degree 2
        out = feature_map(np.array([2.0, 3.0]), 2)
        np.testing.assert_allclose(out, [1.0, 3.0, 2.0, 9.0, 6.0, 4.0])

    def test_zero_input_keeps_constant(self):
        out = feature_map(np.zeros(3), 4)
        assert out[0] == 1.0
        assert np.all(out[1:] == 0.0)

    def test_matches_direct_monomials(self, rng):
        for n, L in ((2, 3), (4, 4), (7, 3)):
            x = rng.uniform(-1.5, 1.5, size=n)
            out = feature_map(x, L)
            for j, idx in enumerate(enumerate_multi_indices(n, L)):
                direct = float(np.prod([x[i] ** e for i, e in enumerate(idx)]))
                assert out[j] == pytest.approx(direct, rel=1e-12, abs=1e-300)

    def test_batch_matches_single(self, rng):
        X = rng.uniform(0, 1, size=(10, 5))
        batch = feature_matrix(X, 3)
        assert batch.shape == (10, feature_dim(5, 3))
        for i in range(10):
            np.testing.assert_array_equal(batch[i], feature_map(X[i], 3))

    def test_degree_homogeneity(self, rng):
        # scaling x by t scales a degree-d monomial by t^d
        x = rng.uniform(0.2, 1.0, size=3)
        t = 1.7
        base = feature_map(x, 4)
        scaled = feature_map(t * x, 4)
        for j, idx in enumerate(enumerate_multi_indices(3, 4)):
            assert scaled[j] == pytest.approx(t ** sum(idx) * base[j], rel=1e-12)

    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            feature_map(np.zeros((2, 2)), 2)
        with pytest.raises(ValueError):
            feature_matrix(np.zeros(3), 2)
