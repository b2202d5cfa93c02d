"""Tests for sampling set construction."""

import numpy as np
import pytest
from src.core.certify import resolves
from src.core.sampling import (
    SamplerMode,
    SamplingError,
    sample_boundary_guided,
    sample_uniform,
)
from src.utils.validators import ValidationError


class TestUniformSampling:
    """Test suite for uniform sampling."""

    def test_size_and_distinct(self, small_chain):
        """Test the set has the requested number of distinct sorted nodes."""
        g, _ = small_chain
        result = sample_uniform(g, 4, seed=3)
        assert result.size == 4
        assert np.unique(result.nodes).size == 4
        assert np.all(np.diff(result.nodes) > 0)
        assert result.mode == "uniform"

    def test_budget_capped_at_node_count(self, small_chain):
        """Test budgets above N return every node."""
        g, _ = small_chain
        assert sample_uniform(g, 50, seed=0).nodes.tolist() == list(range(10))

    def test_seeded(self, small_chain):
        """Test the same seed gives the same set."""
        g, _ = small_chain
        a = sample_uniform(g, 5, seed=9).nodes
        b = sample_uniform(g, 5, seed=9).nodes
        np.testing.assert_array_equal(a, b)

    def test_read_only(self, small_chain):
        """Test returned node arrays cannot be modified."""
        g, _ = small_chain
        with pytest.raises(ValueError):
            sample_uniform(g, 3, seed=1).nodes[0] = 7

    def test_negative_budget(self, small_chain):
        """Test negative budgets are rejected."""
        g, _ = small_chain
        with pytest.raises(ValidationError):
            sample_uniform(g, -1)


class TestBoundaryGuidedSampling:
    """Test suite for boundary-guided sampling."""

    def test_lemma1_picks_heavy_neighbours(self, two_triangles):
        """Test each boundary endpoint gets its heavy same-cluster neighbour."""
        g, p, m = two_triangles
        result = sample_boundary_guided(g, p, 2, L=2.0)
        assert result.nodes.tolist() == m.tolist()
        assert not result.partial_coverage
        assert result.mode == "lemma1"
        assert resolves(g, p, result.nodes, 1.0, 2.0).resolved

    def test_lemma1_falls_back_to_endpoint(self, two_triangles):
        """Test endpoints without a heavy enough neighbour are sampled themselves."""
        g, p, _ = two_triangles
        result = sample_boundary_guided(g, p, 2, L=5.0)
        assert result.nodes.tolist() == [2, 3]

    def test_partial_coverage(self, two_triangles):
        """Test the flag when the budget runs out first."""
        g, p, _ = two_triangles
        result = sample_boundary_guided(g, p, 1, L=2.0)
        assert result.partial_coverage
        assert result.nodes.tolist() == [1]

    def test_fill_uniform(self, two_triangles):
        """Test leftover budget is filled with distinct random nodes."""
        g, p, m = two_triangles
        result = sample_boundary_guided(g, p, 4, seed=5, L=2.0)
        assert result.size == 4
        assert set(m.tolist()) <= set(result.nodes.tolist())

    def test_edge_sorted(self, small_chain):
        """Test the lightest edge is scanned first."""
        g, p = small_chain
        result = sample_boundary_guided(g, p, 2, SamplerMode.EDGE_SORTED)
        assert result.nodes.tolist() == [3, 4]
        assert not result.partial_coverage
        assert result.mode == "edge_sorted"

    def test_mode_by_name(self, small_chain):
        """Test modes can be given as strings."""
        g, p = small_chain
        assert sample_boundary_guided(g, p, 2, "edge_sorted").mode == "edge_sorted"

    def test_unknown_mode(self, small_chain):
        """Test unknown modes raise SamplingError."""
        g, p = small_chain
        with pytest.raises(SamplingError):
            sample_boundary_guided(g, p, 2, "random_walk")

    def test_full_budget(self, small_chain):
        """Test budgets of N or more return every node."""
        g, p = small_chain
        assert sample_boundary_guided(g, p, 10, seed=1).size == 10
