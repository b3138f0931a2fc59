import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gramentropy import (
    GaussianKernel,
    GramMatrix,
    InputError,
    NumericError,
    ProductKernel,
    SymMatrix,
    eigh,
    entrywise_power,
    gram,
    kernel_from_distance,
    median_heuristic,
    neg_log_transform,
    normalize_diagonal,
    semi_metric_sq,
    to_density,
)
from gramentropy._accel import pairwise_sq_dists


class TestKernelSpecs:
    def test_sigma_must_be_positive(self):
        with pytest.raises(InputError):
            GaussianKernel(0.0)

    def test_product_needs_two_components(self):
        with pytest.raises(InputError):
            ProductKernel((GaussianKernel(1.0),), (1,))

    def test_product_dims_must_match(self):
        with pytest.raises(InputError):
            ProductKernel((GaussianKernel(1.0), GaussianKernel(2.0)), (1,))


class TestGram:
    def test_identical_points(self):
        g = gram(np.zeros((2, 1)), GaussianKernel(1.0))
        assert np.array_equal(g.values, np.ones((2, 2)))

    def test_gaussian_decay(self):
        g = gram(np.array([[0.0], [1e6]]), GaussianKernel(1.0))
        assert g.values[0, 1] == 0.0

    def test_single_evaluation(self):
        g = gram(np.array([[0.0], [1.0]]), GaussianKernel(1.0))
        assert g.values[0, 1] == pytest.approx(math.exp(-0.5), abs=1e-15)

    def test_unit_diagonal_exact(self, rng):
        g = gram(rng.standard_normal((10, 3)), GaussianKernel(0.7))
        assert np.array_equal(np.diag(g.values), np.ones(10))

    def test_entries_in_unit_interval(self, rng):
        g = gram(rng.standard_normal((20, 2)), GaussianKernel(1.3))
        assert np.all(g.values >= 0.0) and np.all(g.values <= 1.0)

    def test_product_kernel_is_blockwise_hadamard(self, rng):
        x = rng.standard_normal((12, 3))
        spec = ProductKernel((GaussianKernel(1.0), GaussianKernel(2.0)), (1, 2))
        g = gram(x, spec)
        gx = gram(x[:, :1], GaussianKernel(1.0))
        gy = gram(x[:, 1:], GaussianKernel(2.0))
        assert np.max(np.abs(g.values - gx.values * gy.values)) == 0.0

    def test_rejects_nonfinite_data(self):
        with pytest.raises(InputError):
            gram(np.array([[0.0], [np.inf]]), GaussianKernel(1.0))

    def test_gram_matrix_requires_unit_diagonal(self):
        with pytest.raises(InputError):
            GramMatrix(SymMatrix(np.diag([1.0, 2.0])))


class TestMedianHeuristic:
    def test_two_points(self):
        assert median_heuristic(np.array([[0.0], [3.0]])) == pytest.approx(3.0)

    def test_degenerate_data(self):
        with pytest.raises(NumericError):
            median_heuristic(np.zeros((5, 2)))


class TestNormalizeDiagonal:
    def test_idempotent_on_unit_diagonal(self, rng):
        g = gram(rng.standard_normal((6, 2)), GaussianKernel(1.0))
        out = normalize_diagonal(g.matrix)
        assert np.max(np.abs(out.values - g.values)) <= 1e-15

    def test_diagonal_input_maps_to_identity(self):
        out = normalize_diagonal(SymMatrix(np.diag([4.0, 9.0])))
        assert np.array_equal(out.values, np.eye(2))

    def test_worked_example(self):
        out = normalize_diagonal(SymMatrix([[4.0, 2.0], [2.0, 9.0]]))
        assert out.values[0, 1] == pytest.approx(2.0 / 6.0, abs=1e-15)
        assert np.array_equal(np.diag(out.values), np.ones(2))

    def test_nonpositive_diagonal_rejected(self):
        with pytest.raises(InputError):
            normalize_diagonal(SymMatrix(np.diag([1.0, 0.0])))

    def test_psd_preserved(self, rng):
        a = rng.standard_normal((8, 8))
        spd = SymMatrix(a @ a.T + 8 * np.eye(8))
        assert eigh(normalize_diagonal(spd)).eigenvalues[-1] >= -1e-9


class TestToDensity:
    def test_identity_gives_flat_spectrum(self):
        d = to_density(GramMatrix(SymMatrix(np.eye(4))))
        assert np.allclose(d.spectrum.eigenvalues, 0.25)

    def test_all_ones_is_rank_one(self):
        d = to_density(GramMatrix(SymMatrix(np.ones((4, 4)))))
        assert np.allclose(d.spectrum.eigenvalues, [1.0, 0.0, 0.0, 0.0], atol=1e-12)

    def test_spectrum_matches_gram_spectrum_over_n(self, rng):
        g = gram(rng.standard_normal((8, 2)), GaussianKernel(1.0))
        lhs = to_density(g).spectrum.eigenvalues
        rhs = eigh(g.matrix).eigenvalues / 8.0
        assert np.max(np.abs(lhs - rhs)) <= 1e-10

    def test_unit_trace(self, rng):
        d = to_density(gram(rng.standard_normal((7, 2)), GaussianKernel(1.0)))
        assert d.matrix.trace == pytest.approx(1.0, abs=1e-12)


class TestSemiMetric:
    def test_self_distance_zero(self):
        assert semi_metric_sq([1.0, 2.0], [1.0, 2.0], GaussianKernel(1.0)) == 0.0

    def test_unit_diagonal_identity(self, rng):
        k = GaussianKernel(0.9)
        for _ in range(20):
            x, y = rng.standard_normal(3), rng.standard_normal(3)
            kxy = math.exp(-float(np.sum((x - y) ** 2)) / (2 * 0.9**2))
            assert semi_metric_sq(x, y, k) == pytest.approx(2 - 2 * kxy, abs=1e-14)

    def test_worked_value(self):
        expected = 2 - 2 * math.exp(-0.5)
        assert semi_metric_sq([0.0], [1.0], GaussianKernel(1.0)) == pytest.approx(
            expected, abs=1e-14
        )

    @given(
        st.lists(st.floats(-5, 5), min_size=2, max_size=2),
        st.lists(st.floats(-5, 5), min_size=2, max_size=2),
        st.lists(st.floats(-5, 5), min_size=2, max_size=2),
    )
    @settings(max_examples=300, deadline=None)
    def test_triangle_inequality(self, xs, ys, zs):
        k = GaussianKernel(1.0)
        dxy = math.sqrt(semi_metric_sq(xs, ys, k))
        dxz = math.sqrt(semi_metric_sq(xs, zs, k))
        dzy = math.sqrt(semi_metric_sq(zs, ys, k))
        assert dxy <= dxz + dzy + 1e-12

    def test_triangle_inequality_random_triples(self, rng):
        k = GaussianKernel(1.4)
        pts = rng.standard_normal((1000, 3, 2))
        for x, y, z in pts:
            dxy = math.sqrt(semi_metric_sq(x, y, k))
            dxz = math.sqrt(semi_metric_sq(x, z, k))
            dzy = math.sqrt(semi_metric_sq(z, y, k))
            assert dxy <= dxz + dzy + 1e-12


class TestNegLogTransform:
    def test_all_ones_gives_zero_matrix(self):
        out = neg_log_transform(SymMatrix(np.ones((3, 3))))
        assert np.array_equal(out.values, np.zeros((3, 3)))

    def test_recovers_scaled_squared_distances(self, rng):
        x = rng.standard_normal((10, 2))
        sigma = 1.7
        g = gram(x, GaussianKernel(sigma))
        b = neg_log_transform(g.matrix)
        expected = pairwise_sq_dists(x) / (2 * sigma**2)
        assert np.max(np.abs(b.values - expected)) <= 1e-10

    def test_zero_diagonal_for_unit_diagonal_input(self, rng):
        g = gram(rng.standard_normal((6, 2)), GaussianKernel(1.0))
        assert np.array_equal(np.diag(neg_log_transform(g.matrix).values), np.zeros(6))

    def test_nonpositive_entries_rejected(self):
        with pytest.raises(InputError):
            neg_log_transform(SymMatrix(np.zeros((2, 2))))


class TestKernelFromDistance:
    def test_zero_distances_give_all_ones(self):
        out = kernel_from_distance(SymMatrix(np.zeros((3, 3))))
        assert np.array_equal(out.values, np.ones((3, 3)))

    def test_matches_gaussian_gram(self, rng):
        x = rng.standard_normal((9, 2))
        sigma = 0.8
        dist_sq = SymMatrix(pairwise_sq_dists(x) / (2 * sigma**2))
        out = kernel_from_distance(dist_sq)
        expected = gram(x, GaussianKernel(sigma))
        assert np.max(np.abs(out.values - expected.values)) <= 1e-12

    def test_unit_diagonal(self, rng):
        d = np.abs(rng.standard_normal((4, 4)))
        d = 0.5 * (d + d.T)
        np.fill_diagonal(d, 0.0)
        out = kernel_from_distance(SymMatrix(d))
        assert np.array_equal(np.diag(out.values), np.ones(4))

    def test_negative_distances_rejected(self):
        d = np.zeros((2, 2))
        d[0, 1] = d[1, 0] = -1.0
        with pytest.raises(InputError):
            kernel_from_distance(SymMatrix(d))

    def test_nonzero_diagonal_rejected(self):
        with pytest.raises(InputError):
            kernel_from_distance(SymMatrix(np.eye(2)))


class TestRoundTripAndDivisibility:
    def test_neg_log_round_trip(self, rng):
        g = gram(rng.standard_normal((12, 3)), GaussianKernel(1.1))
        back = kernel_from_distance(neg_log_transform(g.matrix))
        assert np.max(np.abs(back.values - g.values)) <= 1e-10

    @pytest.mark.parametrize("r", [0.1, 0.5, 1.5, 3.0])
    def test_infinite_divisibility(self, rng, r):
        g = gram(rng.standard_normal((64, 2)), GaussianKernel(1.0))
        powered = entrywise_power(g.matrix, r)
        assert eigh(powered).eigenvalues[-1] >= -1e-8

    def test_neg_log_is_negative_definite_on_zero_sum_subspace(self, rng):
        g = gram(rng.standard_normal((16, 2)), GaussianKernel(1.0))
        b = neg_log_transform(g.matrix).values
        for _ in range(500):
            alpha = rng.standard_normal(16)
            alpha -= alpha.mean()
            assert alpha @ b @ alpha <= 1e-9
