"""Tests for synthetic graph generators."""

import numpy as np
import pytest
from src.core.generators import (
    GeneratorError,
    WeightKind,
    WeightLaw,
    chain_signal,
    generate_chain,
    generate_planted_partition,
    planted_signal,
)
from src.core.graph_core import boundary_edges, components_without


class TestWeightLaw:
    """Test suite for edge weight distributions."""

    def test_constant(self):
        """Test constant weights."""
        draws = WeightLaw.constant(0.5).draw(np.random.default_rng(0), 4)
        assert draws.tolist() == [0.5] * 4

    def test_abs_normal_is_positive(self):
        """Test |N(mean, variance)| draws are strictly positive."""
        draws = WeightLaw.abs_normal(0.0, 1.0).draw(np.random.default_rng(1), 1000)
        assert np.all(draws > 0)

    def test_uniform_range(self):
        """Test uniform draws stay inside their range."""
        draws = WeightLaw.uniform(0.5, 2.0).draw(np.random.default_rng(2), 500)
        assert draws.min() >= 0.5
        assert draws.max() < 2.0

    def test_invalid_uniform(self):
        """Test uniform laws need 0 < low < high."""
        with pytest.raises(GeneratorError):
            WeightLaw.uniform(2.0, 1.0)

    def test_dict_form(self):
        """Test weight laws survive their dict form."""
        law = WeightLaw.abs_normal(2.0, 0.25)
        payload = law.to_dict()
        assert payload["kind"] == "abs_normal"
        assert WeightLaw.from_dict(payload) == law
        with pytest.raises(GeneratorError):
            WeightLaw.from_dict({"kind": "cauchy"})


class TestChain:
    """Test suite for chain graphs."""

    def test_structure(self, small_chain):
        """Test the ten-node chain with two clusters."""
        g, p = small_chain
        assert g.node_count == 10
        assert g.edge_count == 9
        assert p.cluster_count == 2
        assert boundary_edges(g, p).tolist() == [4]
        assert g.weight(4, 5) == 0.5
        assert g.weight(3, 4) == 1.0

    def test_seeded(self):
        """Test the same seed gives the same weights."""
        a, _ = generate_chain(100, 10, seed=5)
        b, _ = generate_chain(100, 10, seed=5)
        np.testing.assert_array_equal(a.weights, b.weights)

    def test_divisibility(self):
        """Test the cluster size must divide the node count."""
        with pytest.raises(GeneratorError):
            generate_chain(10, 3)

    def test_signal_alternates(self, small_chain):
        """Test the chain signal cycles through its values."""
        _, p = small_chain
        x = chain_signal(p)
        assert x.tolist() == [1.0] * 5 + [5.0] * 5


class TestPlantedPartition:
    """Test suite for planted-partition graphs."""

    @pytest.fixture
    def planted(self):
        """Small planted-partition graph."""
        return generate_planted_partition(300, 6, avg_degree=8.0, mixing=0.1, seed=11)

    def test_connected_and_simple(self, planted):
        """Test the graph is connected."""
        g, _ = planted
        count, _ = components_without(g, np.empty(0, dtype=np.int64))
        assert count == 1

    def test_communities(self, planted):
        """Test community count and minimum size."""
        _, p = planted
        assert p.cluster_count == 6
        assert p.cluster_sizes().min() >= 2
        assert p.cluster_sizes().sum() == 300

    def test_mixing(self, planted):
        """Test most edges stay inside communities."""
        g, p = planted
        share = boundary_edges(g, p).size / g.edge_count
        assert share < 0.3

    def test_average_degree(self, planted):
        """Test the average degree is near the target."""
        g, _ = planted
        assert 4.0 < 2 * g.edge_count / g.node_count < 10.0

    def test_weights_by_law(self):
        """Test intra and inter edges use their own laws."""
        g, p = generate_planted_partition(
            100,
            4,
            avg_degree=6.0,
            intra=WeightLaw.constant(3.0),
            inter=WeightLaw.constant(1.0),
            seed=2,
        )
        crossing = p.cluster_of[g.sources] != p.cluster_of[g.targets]
        assert np.all(g.weights[crossing] == 1.0)
        assert np.all(g.weights[~crossing] == 3.0)

    def test_too_many_communities(self):
        """Test every community needs at least two nodes."""
        with pytest.raises(GeneratorError):
            generate_planted_partition(10, 6)

    def test_signal(self, planted):
        """Test the planted signal is constant on communities."""
        _, p = planted
        x = planted_signal(p, seed=4)
        for c in range(p.cluster_count):
            values = x[p.members(c)]
            assert np.all(values == values[0])
            assert 1.0 <= values[0] < 50.0

    def test_vanishing_mixing_keeps_edges_inside(self):
        """Test almost no edges cross communities when mixing is tiny."""
        g, p = generate_planted_partition(2000, 20, avg_degree=10.0, mixing=0.001, seed=3)
        assert boundary_edges(g, p).size < 0.01 * g.edge_count

    @pytest.mark.slow
    def test_community_sizes_follow_power_law(self):
        """Test the log-log slope of the pooled size histogram is near -size_exponent."""
        sizes = np.concatenate(
            [
                generate_planted_partition(
                    20000, 280, size_exponent=2.0, avg_degree=4.0, seed=s
                )[1].cluster_sizes()
                for s in range(10)
            ]
        )
        edges = np.geomspace(sizes.min(), sizes.max() + 1, 9)
        counts, _ = np.histogram(sizes, bins=edges)
        density = counts / np.diff(edges)
        centers = np.sqrt(edges[:-1] * edges[1:])
        keep = counts > 0
        slope = np.polyfit(np.log(centers[keep]), np.log(density[keep]), 1)[0]
        assert abs(slope + 2.0) <= 0.3

    def test_weight_kind_values(self):
        """Test weight kinds serialise by name."""
        assert WeightKind("uniform") is WeightKind.UNIFORM
