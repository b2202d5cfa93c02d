"""
Graph core module for netlasso.

Data graphs, graph signals, partitions, observations, the total variation
seminorm and the clustered signal model shared by every other module.
"""

from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from src.utils.logger import get_logger
from src.utils.validators import Validators

logger = get_logger("graph_core")

# Graph signals are plain float64 arrays of length N indexed by node id.
GraphSignal = np.ndarray

EdgeSubset = Union[np.ndarray, Sequence[int], Sequence[Tuple[int, int]]]

EXACT_TOL = 1e-9


class GraphError(Exception):
    """Custom exception for graph, signal and partition errors."""

    pass


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DataGraph:
    """
    Undirected weighted graph G = (V, E, W).

    Each undirected edge is stored once with i < j, edges sorted ascending by (i, j).
    Edge k connects ``sources[k]`` and ``targets[k]`` with weight ``weights[k]``.
    """

    node_count: int
    sources: np.ndarray
    targets: np.ndarray
    weights: np.ndarray
    _adjacency: sp.csr_matrix = field(init=False, repr=False, compare=False)
    _incidence_ptr: np.ndarray = field(init=False, repr=False, compare=False)
    _incidence_edges: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = self.node_count
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise GraphError(f"node_count must be a positive integer, got {n}")

        src = np.asarray(self.sources, dtype=np.int64).copy()
        dst = np.asarray(self.targets, dtype=np.int64).copy()
        w = np.asarray(self.weights, dtype=np.float64).copy()
        if not (src.shape == dst.shape == w.shape) or src.ndim != 1:
            raise GraphError("sources, targets and weights must be 1-D arrays of equal length")
        if src.size:
            if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
                raise GraphError(f"Edge endpoint out of range [0, {n})")
            if np.any(src == dst):
                raise GraphError("Self-loops are not allowed")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise GraphError("Edge weights must be finite and strictly positive")

        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        keys = lo * n + hi
        if keys.size > 1 and np.any(keys[1:] == keys[:-1]):
            raise GraphError("Duplicate edges are not allowed")

        object.__setattr__(self, "node_count", int(n))
        object.__setattr__(self, "sources", _frozen(lo))
        object.__setattr__(self, "targets", _frozen(hi))
        object.__setattr__(self, "weights", _frozen(w))

        adjacency = sp.coo_matrix(
            (np.concatenate([w, w]), (np.concatenate([lo, hi]), np.concatenate([hi, lo]))),
            shape=(n, n),
        ).tocsr()
        adjacency.sort_indices()
        object.__setattr__(self, "_adjacency", adjacency)

        # per-node incident edge ids, ordered by node then edge id
        ends = np.concatenate([lo, hi])
        edge_ids = np.concatenate([np.arange(lo.size), np.arange(lo.size)])
        inc_order = np.lexsort((edge_ids, ends))
        counts = np.bincount(ends, minlength=n)
        ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        object.__setattr__(self, "_incidence_ptr", _frozen(ptr))
        object.__setattr__(self, "_incidence_edges", _frozen(edge_ids[inc_order]))

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[Tuple[int, int, float]]) -> "DataGraph":
        """
        Build a graph from (i, j, w) triples with 0-based ids.

        Args:
            node_count: Number of nodes N
            edges: Iterable of (i, j, w) triples, any orientation

        Returns:
            DataGraph instance
        """
        triples = list(edges)
        if not triples:
            return cls(node_count, np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0))
        arr = np.asarray(triples, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise GraphError("Edges must be (i, j, w) triples")
        if np.any(arr[:, :2] != np.round(arr[:, :2])):
            raise GraphError("Edge endpoints must be integers")
        return cls(node_count, arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2])

    @property
    def edge_count(self) -> int:
        return int(self.sources.size)

    @property
    def edges(self) -> Iterator[Tuple[int, int, float]]:
        """Iterate over (i, j, w) with i < j in ascending order."""
        for i, j, w in zip(self.sources.tolist(), self.targets.tolist(), self.weights.tolist()):
            yield i, j, w

    def adjacency(self) -> sp.csr_matrix:
        """Symmetric weighted adjacency matrix in CSR form."""
        return self._adjacency.copy()

    def neighbors(self, i: int) -> np.ndarray:
        """Neighbour ids N(i) in ascending order."""
        a = self._adjacency
        return a.indices[a.indptr[i] : a.indptr[i + 1]]

    def neighbor_weights(self, i: int) -> np.ndarray:
        """Weights W_{i,j} aligned with :meth:`neighbors`."""
        a = self._adjacency
        return a.data[a.indptr[i] : a.indptr[i + 1]]

    def incident_edges(self, i: int) -> np.ndarray:
        """Ids of the edges touching node ``i``."""
        return self._incidence_edges[self._incidence_ptr[i] : self._incidence_ptr[i + 1]]

    def degrees(self) -> np.ndarray:
        """Number of neighbours per node."""
        return np.diff(self._adjacency.indptr)

    def weighted_degrees(self) -> np.ndarray:
        """Sum of incident edge weights per node."""
        return np.asarray(self._adjacency.sum(axis=1)).ravel()

    def weight(self, i: int, j: int) -> float:
        """Weight of edge {i, j}; 0.0 when absent."""
        return float(self._adjacency[i, j])

    def edge_ids(self, pairs: Iterable[Tuple[int, int]]) -> np.ndarray:
        """
        Map undirected node pairs to edge ids.

        Raises:
            GraphError: If a pair is not an edge of the graph
        """
        arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        keys = self.sources * self.node_count + self.targets
        wanted = lo * self.node_count + hi
        pos = np.searchsorted(keys, wanted)
        found = np.zeros(wanted.size, dtype=bool)
        inside = pos < keys.size
        found[inside] = keys[pos[inside]] == wanted[inside]
        if not np.all(found):
            bad = arr[np.argmin(found)]
            raise GraphError(f"Edge {{{int(bad[0])}, {int(bad[1])}}} is not in the graph")
        return pos


@dataclass(frozen=True, eq=False)
class Partition:
    """Disjoint clusters covering V, stored as a node -> cluster index map."""

    cluster_of: np.ndarray
    cluster_count: int = field(init=False)

    def __post_init__(self) -> None:
        labels = np.asarray(self.cluster_of, dtype=np.int64).copy()
        if labels.ndim != 1 or labels.size == 0:
            raise GraphError("cluster_of must be a non-empty 1-D array")
        if labels.min() < 0:
            raise GraphError("Cluster indices must be nonnegative")
        count = int(labels.max()) + 1
        sizes = np.bincount(labels, minlength=count)
        if np.any(sizes == 0):
            empty = int(np.argmin(sizes))
            raise GraphError(f"Cluster {empty} is empty; clusters must be indexed 0..|F|-1")
        object.__setattr__(self, "cluster_of", _frozen(labels))
        object.__setattr__(self, "cluster_count", count)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        """Relabel arbitrary cluster labels to dense indices in sorted label order."""
        _, dense = np.unique(np.asarray(labels), return_inverse=True)
        return cls(dense.astype(np.int64))

    @classmethod
    def single(cls, node_count: int) -> "Partition":
        return cls(np.zeros(node_count, dtype=np.int64))

    @property
    def node_count(self) -> int:
        return int(self.cluster_of.size)

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.cluster_of, minlength=self.cluster_count)

    def members(self, cluster: int) -> np.ndarray:
        """Node ids of cluster ``cluster`` in ascending order."""
        return np.flatnonzero(self.cluster_of == cluster)

    def check_graph(self, g: DataGraph) -> None:
        if self.node_count != g.node_count:
            raise GraphError(
                f"Partition covers {self.node_count} nodes but graph has {g.node_count}"
            )


@dataclass(frozen=True, eq=False)
class Observation:
    """
    Noisy samples y[i] = x[i] + e[i] over the sampling set M.

    ``sampled_nodes``, ``y`` and the optional ``noise`` are aligned arrays.
    """

    sampled_nodes: np.ndarray
    y: np.ndarray
    noise: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        nodes = np.asarray(self.sampled_nodes, dtype=np.int64).copy().ravel()
        y = np.asarray(self.y, dtype=np.float64).copy().ravel()
        if nodes.shape != y.shape:
            raise GraphError("y must be defined exactly on the sampled nodes")
        if nodes.size and nodes.min() < 0:
            raise GraphError("Sampled node ids must be nonnegative")
        if np.unique(nodes).size != nodes.size:
            raise GraphError("Sampled nodes must be distinct")
        Validators.validate_finite_array(y, "y")
        object.__setattr__(self, "sampled_nodes", _frozen(nodes))
        object.__setattr__(self, "y", _frozen(y))
        if self.noise is not None:
            e = np.asarray(self.noise, dtype=np.float64).copy().ravel()
            if e.shape != nodes.shape:
                raise GraphError("noise must be aligned with the sampled nodes")
            Validators.validate_finite_array(e, "noise")
            object.__setattr__(self, "noise", _frozen(e))

    @property
    def size(self) -> int:
        return int(self.sampled_nodes.size)

    def check_graph(self, g: DataGraph) -> None:
        if self.size and self.sampled_nodes.max() >= g.node_count:
            raise GraphError(
                f"Sampled node {int(self.sampled_nodes.max())} "
                f"outside graph of {g.node_count} nodes"
            )

    def true_values(self) -> np.ndarray:
        """Ground-truth signal values y[i] - e[i] on the sampled nodes."""
        if self.noise is None:
            raise GraphError("Observation carries no ground-truth noise")
        return self.y - self.noise

    def noise_l1(self) -> float:
        """Sum of |e[i]| over the sampling set."""
        if self.noise is None:
            raise GraphError("Observation carries no ground-truth noise")
        return float(np.sum(np.abs(self.noise)))

    def restricted_to(self, nodes: Iterable[int]) -> "Observation":
        """Observation keeping only the samples at ``nodes``."""
        keep = np.isin(self.sampled_nodes, np.fromiter(nodes, dtype=np.int64))
        noise = None if self.noise is None else self.noise[keep]
        return Observation(self.sampled_nodes[keep], self.y[keep], noise)


def as_signal(g: DataGraph, x: Sequence[float]) -> GraphSignal:
    """
    Coerce ``x`` to a float64 signal on ``g``.

    Raises:
        GraphError: On dimension mismatch or non-finite values
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != g.node_count:
        raise GraphError(
            f"Signal of shape {arr.shape} does not match graph with {g.node_count} nodes"
        )
    if not np.all(np.isfinite(arr)):
        raise GraphError("Signal contains non-finite values")
    return arr


def _edge_ids(g: DataGraph, s: EdgeSubset) -> np.ndarray:
    arr = np.asarray(s)
    if arr.size == 0:
        return np.empty(0, dtype=np.int64)
    if arr.ndim == 2 and arr.shape[1] == 2:
        return g.edge_ids(arr.tolist())
    ids = arr.astype(np.int64).ravel()
    if ids.min() < 0 or ids.max() >= g.edge_count:
        raise GraphError(f"Edge id out of range [0, {g.edge_count})")
    return ids


def total_variation(g: DataGraph, x: GraphSignal) -> float:
    """
    Total variation ||x||_TV = sum over edges of W_{i,j} |x[j] - x[i]|.

    Summation runs in ascending (i, j) order.
    """
    x = as_signal(g, x)
    return float(np.sum(g.weights * np.abs(x[g.targets] - x[g.sources])))


def tv_restricted(g: DataGraph, x: GraphSignal, s: EdgeSubset) -> float:
    """
    Total variation restricted to the edge subset ``s``.

    Args:
        g: Data graph
        x: Graph signal
        s: Edge ids, or (i, j) node pairs

    Returns:
        sum over {i,j} in s of W_{i,j} |x[j] - x[i]|

    Raises:
        GraphError: If ``s`` names an edge not in ``g``
    """
    x = as_signal(g, x)
    ids = np.sort(_edge_ids(g, s))
    if ids.size == 0:
        return 0.0
    diffs = np.abs(x[g.targets[ids]] - x[g.sources[ids]])
    return float(np.sum(g.weights[ids] * diffs))


def boundary_edges(g: DataGraph, p: Partition) -> np.ndarray:
    """Ids of edges whose endpoints lie in different clusters, ascending."""
    p.check_graph(g)
    labels = p.cluster_of
    return np.flatnonzero(labels[g.sources] != labels[g.targets])


def interior_edges(g: DataGraph, p: Partition) -> np.ndarray:
    """Ids of edges inside a single cluster (E minus the boundary)."""
    p.check_graph(g)
    labels = p.cluster_of
    return np.flatnonzero(labels[g.sources] == labels[g.targets])


def clustered_signal(p: Partition, coeffs: Sequence[float]) -> GraphSignal:
    """
    Piecewise-constant signal x[i] = a_{cluster_of[i]}.

    Raises:
        GraphError: If the number of coefficients differs from the cluster count
    """
    a = np.asarray(coeffs, dtype=np.float64).ravel()
    if a.size != p.cluster_count:
        raise GraphError(f"Expected {p.cluster_count} coefficients, got {a.size}")
    return a[p.cluster_of]


def tv_upper_bound(p: Partition, coeffs: Sequence[float], g: DataGraph) -> float:
    """Upper bound 2 max_l |a_l| sum_{boundary} W_{i,j} on the TV of a clustered signal."""
    a = np.asarray(coeffs, dtype=np.float64).ravel()
    if a.size != p.cluster_count:
        raise GraphError(f"Expected {p.cluster_count} coefficients, got {a.size}")
    boundary = boundary_edges(g, p)
    if boundary.size == 0:
        return 0.0
    return float(2.0 * np.max(np.abs(a)) * np.sum(g.weights[boundary]))


def empirical_error(obs: Observation, x: GraphSignal) -> float:
    """Training error sum over i in M of |x[i] - y[i]| (l1, not squared)."""
    x = np.asarray(x, dtype=np.float64)
    if obs.size and obs.sampled_nodes.max() >= x.size:
        raise GraphError("Observation refers to nodes outside the signal")
    return float(np.sum(np.abs(x[obs.sampled_nodes] - obs.y)))


def nmse(x_hat: GraphSignal, x_true: GraphSignal) -> float:
    """
    Normalized squared error sum (x_hat - x)^2 / sum x^2.

    Raises:
        GraphError: If the signals differ in length or x_true is identically zero
    """
    x_hat = np.asarray(x_hat, dtype=np.float64)
    x_true = np.asarray(x_true, dtype=np.float64)
    if x_hat.shape != x_true.shape:
        raise GraphError(f"Shape mismatch: {x_hat.shape} vs {x_true.shape}")
    denom = float(np.sum(x_true**2))
    if denom == 0.0:
        raise GraphError("NMSE undefined for an identically zero reference signal")
    return float(np.sum((x_hat - x_true) ** 2)) / denom


def make_observation(
    x_true: GraphSignal,
    sampled_nodes: Sequence[int],
    noise_sigma: float = 0.0,
    seed: Optional[int] = None,
) -> Observation:
    """
    Sample y[i] = x[i] + e[i] with e[i] ~ N(0, sigma^2) i.i.d. on the sampled nodes.

    Args:
        x_true: Ground-truth signal
        sampled_nodes: Sampling set M
        noise_sigma: Noise standard deviation (0 for noiseless samples)
        seed: Seed for the noise generator

    Returns:
        Observation carrying the drawn noise
    """
    Validators.validate_nonnegative(noise_sigma, "noise_sigma")
    x_true = np.asarray(x_true, dtype=np.float64)
    nodes = np.asarray(sampled_nodes, dtype=np.int64)
    Validators.validate_node_ids(nodes.tolist(), x_true.size)
    rng = np.random.default_rng(seed)
    if noise_sigma > 0:
        noise = rng.normal(0.0, noise_sigma, size=nodes.size)
    else:
        noise = np.zeros(nodes.size)
    return Observation(nodes, x_true[nodes] + noise, noise)


def components_without(g: DataGraph, removed: np.ndarray) -> Tuple[int, np.ndarray]:
    """
    Connected components of (V, E minus ``removed`` edge ids).

    Returns:
        (component count, component label per node)
    """
    keep = np.ones(g.edge_count, dtype=bool)
    keep[np.asarray(removed, dtype=np.int64)] = False
    src, dst = g.sources[keep], g.targets[keep]
    graph = sp.coo_matrix(
        (np.ones(src.size), (src, dst)), shape=(g.node_count, g.node_count)
    ).tocsr()
    count, labels = connected_components(graph, directed=False)
    return int(count), labels.astype(np.int64)


def edge_list(g: DataGraph, ids: np.ndarray) -> List[Tuple[int, int]]:
    """(i, j) pairs of the given edge ids."""
    return [(int(g.sources[k]), int(g.targets[k])) for k in np.asarray(ids, dtype=np.int64)]
