"""Tests for spectral module."""

import numpy as np
import pytest
from src.core import spectral
from src.core.generators import WeightLaw, generate_chain
from src.core.graph_core import DataGraph, Observation, clustered_signal
from src.core.spectral import (
    SpectralError,
    band_limited_signal,
    gft,
    gft_basis,
    inverse_gft,
    label_propagation,
    laplacian,
    quadratic_form,
    spectrum_table,
)


@pytest.fixture
def path5():
    """Unit-weight path on five nodes."""
    return DataGraph.from_edges(5, [(i, i + 1, 1.0) for i in range(4)])


@pytest.fixture
def long_chain():
    """100-node chain in two clusters of 50 joined by a weight-1/2 edge."""
    return generate_chain(100, 50, WeightLaw.constant(1.0), WeightLaw.constant(0.5))


class TestLaplacian:
    """Test suite for the graph Laplacian."""

    def test_laplacian_structure(self, two_triangles):
        """Test symmetry, zero row sums and off-diagonal weights."""
        g, _, _ = two_triangles
        lap = laplacian(g)
        np.testing.assert_allclose(lap, lap.T)
        np.testing.assert_allclose(lap.sum(axis=1), 0.0, atol=1e-12)
        assert lap[1, 2] == -4.0
        assert lap[2, 2] == 6.0

    def test_quadratic_form_matches_matrix(self, two_triangles):
        """Test x^T L x against the edge sum."""
        g, _, _ = two_triangles
        x = np.array([0.3, -1.0, 2.0, 0.5, 0.0, 1.5])
        assert quadratic_form(g, x) == pytest.approx(x @ laplacian(g) @ x)

    def test_size_guard(self, two_triangles, mocker):
        """Test that dense routines refuse graphs above the limit."""
        g, _, _ = two_triangles
        mocker.patch.object(spectral.config, "get", return_value=3)
        with pytest.raises(SpectralError):
            laplacian(g)

    def test_quadratic_form_on_weighted_path(self):
        """Test 2 * 1^2 + 3 * 2^2 = 14 on a path with weights 2 and 3."""
        g = DataGraph.from_edges(3, [(0, 1, 2.0), (1, 2, 3.0)])
        assert quadratic_form(g, np.array([0.0, 1.0, -1.0])) == pytest.approx(14.0)

    def test_positive_semidefinite(self, random_instance):
        """Test x^T L x >= 0 for 1000 random signals."""
        rng = np.random.default_rng(5)
        for _ in range(100):
            g, _, _ = random_instance(rng)
            lap = laplacian(g)
            for x in rng.normal(scale=5.0, size=(10, g.node_count)):
                assert x @ lap @ x >= -1e-9
                assert quadratic_form(g, x) >= -1e-9


class TestGraphFourierTransform:
    """Test suite for the GFT basis and transforms."""

    def test_basis_is_sorted_and_orthonormal(self, two_triangles):
        """Test ascending eigenvalues and orthonormal eigenvectors."""
        g, _, _ = two_triangles
        basis = gft_basis(g)
        assert basis.size == 6
        assert np.all(np.diff(basis.eigenvalues) >= 0)
        assert basis.eigenvalues[0] == pytest.approx(0.0, abs=1e-10)
        np.testing.assert_allclose(
            basis.eigenvectors.T @ basis.eigenvectors, np.eye(6), atol=1e-10
        )

    def test_sign_convention(self, two_triangles):
        """Test each eigenvector's largest-magnitude entry is positive."""
        g, _, _ = two_triangles
        vectors = gft_basis(g).eigenvectors
        pivots = np.argmax(np.abs(vectors), axis=0)
        assert np.all(vectors[pivots, np.arange(6)] > 0)

    def test_inverse_recovers_signal(self, two_triangles):
        """Test that the inverse transform undoes the transform."""
        g, _, _ = two_triangles
        basis = gft_basis(g)
        x = np.array([1.0, 2.0, 3.0, -1.0, 0.0, 4.0])
        np.testing.assert_allclose(inverse_gft(basis, gft(basis, x)), x, atol=1e-10)

    def test_dimension_mismatch(self, two_triangles):
        """Test transforms reject signals of the wrong length."""
        g, _, _ = two_triangles
        basis = gft_basis(g)
        with pytest.raises(SpectralError):
            gft(basis, np.zeros(5))
        with pytest.raises(SpectralError):
            inverse_gft(basis, np.zeros(7))

    def test_lowest_frequency_is_constant(self, path5):
        """Test that u_1 of a connected graph is the positive constant vector."""
        x = band_limited_signal(gft_basis(path5), [1])
        np.testing.assert_allclose(x, np.full(5, 1 / np.sqrt(5)), atol=1e-10)

    def test_band_limited_index_range(self, path5):
        """Test that frequency indices are 1-based."""
        basis = gft_basis(path5)
        with pytest.raises(SpectralError):
            band_limited_signal(basis, [0])
        with pytest.raises(SpectralError):
            band_limited_signal(basis, [6])

    def test_band_limited_spectrum(self, path5):
        """Test that a band-limited signal has unit coefficients on its band only."""
        basis = gft_basis(path5)
        rows = spectrum_table(basis, band_limited_signal(basis, [1, 2]))
        assert [r[0] for r in rows] == [1, 2, 3, 4, 5]
        coeffs = np.array([r[2] for r in rows])
        np.testing.assert_allclose(coeffs, [1.0, 1.0, 0.0, 0.0, 0.0], atol=1e-10)

    def test_parseval(self, random_instance):
        """Test the transform preserves the squared norm."""
        rng = np.random.default_rng(9)
        for _ in range(50):
            g, _, _ = random_instance(rng)
            x = rng.normal(size=g.node_count)
            coeffs = gft(gft_basis(g), x)
            assert np.sum(coeffs**2) == pytest.approx(np.sum(x**2), rel=1e-8)

    def test_clustered_signal_spreads_over_spectrum(self, long_chain):
        """Test a two-level chain signal has many non-negligible coefficients."""
        g, p = long_chain
        coeffs = np.abs(gft(gft_basis(g), clustered_signal(p, [0.0, 2.0])))
        assert np.count_nonzero(coeffs > 0.01 * coeffs.max()) > 0.2 * g.node_count

    def test_smooth_signal_varies_on_most_edges(self, long_chain):
        """Test the two lowest frequencies give nonzero differences on over 90% of edges."""
        g, _ = long_chain
        x = band_limited_signal(gft_basis(g), [1, 2])
        diffs = np.abs(x[g.targets] - x[g.sources])
        assert np.count_nonzero(diffs > 1e-6) > 0.9 * g.edge_count


class TestLabelPropagation:
    """Test suite for label propagation."""

    def test_converges_to_harmonic_interpolation(self, path5):
        """Test that sweeps converge to linear interpolation on a path."""
        obs = Observation(np.array([0, 4]), np.array([0.0, 4.0]))
        x = label_propagation(path5, obs, 200)
        np.testing.assert_allclose(x, [0.0, 1.0, 2.0, 3.0, 4.0], atol=1e-8)

    def test_single_sweep_is_gauss_seidel(self, path5):
        """Test that one sweep uses values updated earlier in the same sweep."""
        obs = Observation(np.array([0, 4]), np.array([2.0, 4.0]))
        seen = []
        label_propagation(path5, obs, 1, callback=lambda k, x: seen.append((k, x)))
        assert seen[0][0] == 1
        np.testing.assert_allclose(seen[0][1], [2.0, 1.0, 0.5, 2.25, 4.0])

    def test_samples_stay_clamped(self, two_triangles):
        """Test that observed nodes keep their values."""
        g, _, m = two_triangles
        obs = Observation(m, np.array([1.0, 3.0]))
        x = label_propagation(g, obs, 50)
        assert x[1] == 1.0
        assert x[4] == 3.0

    def test_isolated_node_stays_zero(self):
        """Test that unsampled nodes without neighbours keep the value 0."""
        g = DataGraph.from_edges(3, [(0, 1, 1.0)])
        x = label_propagation(g, Observation(np.array([0]), np.array([5.0])), 3)
        np.testing.assert_allclose(x, [5.0, 5.0, 0.0])

    def test_empty_sampling_set(self, path5):
        """Test that propagation needs at least one sample."""
        obs = Observation(np.array([], dtype=np.int64), np.array([]))
        with pytest.raises(SpectralError):
            label_propagation(path5, obs, 1)

    def test_sweeps_never_raise_quadratic_form(self, random_instance):
        """Test the Laplacian quadratic form is non-increasing across sweeps."""
        rng = np.random.default_rng(13)
        for _ in range(50):
            g, _, m = random_instance(rng)
            obs = Observation(m, rng.normal(scale=3.0, size=m.size))
            start = np.zeros(g.node_count)
            start[m] = obs.y
            energies = [quadratic_form(g, start)]
            label_propagation(
                g, obs, 20, callback=lambda k, x: energies.append(quadratic_form(g, x))
            )
            assert np.all(np.diff(energies) <= 1e-9)
