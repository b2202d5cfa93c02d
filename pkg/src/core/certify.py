"""
Certification module for netlasso.

Decides whether a sampling set resolves a partition by solving flow-with-demands
feasibility problems, evaluates the sufficient condition based on sampled
neighbours of boundary edges, and checks the network compatibility inequality.

With the boundary flows fixed by a sign pattern, the conservation and capacity
constraints only couple nodes of the same cluster, so every check runs cluster
by cluster on small networks.
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import scipy.sparse as sp
from networkx.algorithms.flow import preflow_push
from scipy.optimize import linprog

from src.core.graph_core import (
    DataGraph,
    GraphSignal,
    Partition,
    as_signal,
    boundary_edges,
    interior_edges,
    tv_restricted,
)
from src.utils.config import get_config
from src.utils.logger import get_logger, get_run_logger
from src.utils.validators import ValidationError, Validators

logger = get_logger("certify")
run_logger = get_run_logger()
config = get_config()

Pattern = Tuple[int, ...]

_SOURCE = "source"
_SINK = "sink"
_POOL = "pool"

# Net inflow d[i] per node; bounded by K on sampled nodes and zero elsewhere.
DemandVector = np.ndarray


class CertifyError(Exception):
    """Custom exception for certification errors."""

    pass


class BoundaryTooLargeError(CertifyError):
    """Raised when exhaustive pattern enumeration exceeds the configured guard."""

    pass


class Verdict(Enum):
    """Outcome of a resolving-set check."""

    RESOLVED = "resolved"
    NOT_RESOLVED = "not_resolved"


@dataclass(frozen=True, eq=False)
class FlowAssignment:
    """
    Flow on every directed edge of a data graph.

    ``forward[k]`` is h(i, j) and ``backward[k]`` is h(j, i) for edge k = {i, j}
    with i < j. Both values are nonnegative and independent.
    """

    graph: DataGraph
    forward: np.ndarray
    backward: np.ndarray

    def demands(self) -> DemandVector:
        """Net inflow d[i] = sum_j h(j, i) - h(i, j) at every node."""
        g = self.graph
        n = g.node_count
        inflow = np.bincount(g.targets, self.forward, n) + np.bincount(g.sources, self.backward, n)
        outflow = np.bincount(g.sources, self.forward, n) + np.bincount(g.targets, self.backward, n)
        return inflow - outflow

    def value(self, i: int, j: int) -> float:
        """Flow h(i, j) along the directed edge (i, j)."""
        k = int(self.graph.edge_ids([(i, j)])[0])
        return float(self.forward[k] if i < j else self.backward[k])


@dataclass(frozen=True)
class _ClusterView:
    """Nodes, interior edges and incident boundary edges of one cluster."""

    index: int
    nodes: np.ndarray
    interior: np.ndarray
    boundary: np.ndarray
    boundary_positions: np.ndarray


@dataclass
class _Layout:
    graph: DataGraph
    partition: Partition
    boundary: np.ndarray
    clusters: List[_ClusterView]
    sampled: np.ndarray


@dataclass
class ResolvingCertificate:
    """
    Result of checking every boundary sign pattern.

    Patterns are bit tuples over the boundary edges in ascending edge id order;
    bit 1 routes L * W_{i,j} from i to j (i < j), bit 0 from j to i.
    """

    K: float
    L: float
    verdict: Verdict
    boundary: np.ndarray
    failing_pattern: Optional[Pattern] = None
    reason: Optional[str] = None
    _layout: Optional[_Layout] = field(default=None, repr=False)
    _witnesses: Dict[Tuple[int, Pattern], Tuple[np.ndarray, np.ndarray]] = field(
        default_factory=dict, repr=False
    )

    @property
    def resolved(self) -> bool:
        return self.verdict is Verdict.RESOLVED

    @property
    def boundary_size(self) -> int:
        return int(self.boundary.size)

    def witness(self, pattern: Sequence[int]) -> FlowAssignment:
        """
        Assemble the witnessing flow for a full boundary pattern.

        Raises:
            CertifyError: If the certificate is not resolved or the pattern is malformed
        """
        if not self.resolved or self._layout is None:
            raise CertifyError("Witness flows exist only for resolved certificates")
        bits = _check_bits(pattern, self.boundary_size)
        layout = self._layout
        g = layout.graph
        forward = np.zeros(g.edge_count)
        backward = np.zeros(g.edge_count)
        _set_boundary_flows(g, layout.boundary, bits, self.L, forward, backward)
        for view in layout.clusters:
            local = tuple(bits[pos] for pos in view.boundary_positions)
            fwd, bwd = self._witnesses[(view.index, local)]
            forward[view.interior] = fwd
            backward[view.interior] = bwd
        return FlowAssignment(g, forward, backward)

    def patterns(self) -> List[Pattern]:
        """All full boundary patterns in lexicographic order."""
        return list(itertools.product((0, 1), repeat=self.boundary_size))


@dataclass(frozen=True)
class Lemma1Result:
    """Outcome of the sampled-neighbour sufficient condition."""

    applicable: bool
    L: float
    K: Optional[float] = None
    failing_edge: Optional[Tuple[int, int]] = None
    reason: str = ""


@dataclass(frozen=True)
class CompatibilityResult:
    """Both sides of K sum_M |z| + ||z||_{E minus boundary} >= L ||z||_boundary."""

    holds: bool
    slack: float
    lhs: float
    rhs: float


def _check_constants(K: float, L: float) -> None:
    try:
        Validators.validate_positive(K, "K")
        Validators.validate_positive(L, "L")
    except ValidationError as e:
        raise CertifyError(str(e)) from e


def _check_bits(pattern: Sequence[int], size: int) -> Pattern:
    bits = tuple(int(b) for b in pattern)
    if len(bits) != size:
        raise CertifyError(f"Pattern has {len(bits)} bits but the boundary has {size} edges")
    if any(b not in (0, 1) for b in bits):
        raise CertifyError("Pattern bits must be 0 or 1")
    return bits


def _sampled_mask(g: DataGraph, m: Sequence[int]) -> np.ndarray:
    nodes = np.asarray(m, dtype=np.int64).ravel()
    try:
        Validators.validate_node_ids(nodes.tolist(), g.node_count)
    except ValidationError as e:
        raise CertifyError(str(e)) from e
    mask = np.zeros(g.node_count, dtype=bool)
    mask[nodes] = True
    return mask


def _layout(g: DataGraph, p: Partition, m: Sequence[int]) -> _Layout:
    p.check_graph(g)
    labels = p.cluster_of
    boundary = boundary_edges(g, p)
    interior = interior_edges(g, p)

    interior_by_cluster = labels[g.sources[interior]]
    order = np.argsort(interior_by_cluster, kind="stable")
    interior_sorted = interior[order]
    splits = np.searchsorted(interior_by_cluster[order], np.arange(p.cluster_count + 1))

    incident: List[List[Tuple[int, int]]] = [[] for _ in range(p.cluster_count)]
    for pos, k in enumerate(boundary.tolist()):
        incident[labels[g.sources[k]]].append((pos, k))
        incident[labels[g.targets[k]]].append((pos, k))

    clusters = []
    for c in range(p.cluster_count):
        pairs = incident[c]
        clusters.append(
            _ClusterView(
                index=c,
                nodes=p.members(c),
                interior=interior_sorted[splits[c] : splits[c + 1]],
                boundary=np.asarray([k for _, k in pairs], dtype=np.int64),
                boundary_positions=np.asarray([pos for pos, _ in pairs], dtype=np.int64),
            )
        )
    return _Layout(g, p, boundary, clusters, _sampled_mask(g, m))


def _set_boundary_flows(
    g: DataGraph,
    boundary: np.ndarray,
    bits: Pattern,
    L: float,
    forward: np.ndarray,
    backward: np.ndarray,
) -> None:
    if boundary.size == 0:
        return
    b = np.asarray(bits, dtype=np.float64)
    flow = L * g.weights[boundary]
    forward[boundary] = b * flow
    backward[boundary] = (1.0 - b) * flow


def _boundary_inflow(
    g: DataGraph, view: _ClusterView, local_bits: Pattern, L: float
) -> Dict[int, float]:
    """Net inflow the fixed boundary flows deliver to each node of the cluster."""
    inflow: Dict[int, float] = {}
    for k, bit in zip(view.boundary.tolist(), local_bits):
        i, j = int(g.sources[k]), int(g.targets[k])
        amount = L * float(g.weights[k])
        # bit 1 sends i -> j
        delta_j = amount if bit else -amount
        inflow[j] = inflow.get(j, 0.0) + delta_j
        inflow[i] = inflow.get(i, 0.0) - delta_j
    members = set(view.nodes.tolist())
    return {v: b for v, b in inflow.items() if v in members}


def _solve_cluster(
    layout: _Layout, view: _ClusterView, local_bits: Pattern, K: float, L: float
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """
    Feasibility of one cluster's flow problem for a local pattern.

    Returns:
        (forward, backward) flows on the cluster's interior edges, or None if infeasible
    """
    g = layout.graph
    empty = (np.zeros(view.interior.size), np.zeros(view.interior.size))
    inflow = _boundary_inflow(g, view, local_bits, L)
    tol = float(config.get("certify.feasibility_tol", 1e-9))

    network = nx.DiGraph()
    network.add_nodes_from([_SOURCE, _SINK, _POOL])
    supply = 0.0
    for v, b in inflow.items():
        if b > 0:
            network.add_edge(_SOURCE, v, capacity=b)
            supply += b
        elif b < 0:
            network.add_edge(v, _SINK, capacity=-b)

    # sampled nodes exchange up to K with a shared pool; the pool takes the cluster imbalance
    imbalance = sum(inflow.values())
    if imbalance > 0:
        network.add_edge(_POOL, _SINK, capacity=imbalance)
    elif imbalance < 0:
        network.add_edge(_SOURCE, _POOL, capacity=-imbalance)
        supply -= imbalance

    if supply <= tol:
        return empty

    for v in view.nodes[layout.sampled[view.nodes]].tolist():
        network.add_edge(v, _POOL, capacity=K)
        network.add_edge(_POOL, v, capacity=K)
    for k in view.interior.tolist():
        i, j, w = int(g.sources[k]), int(g.targets[k]), float(g.weights[k])
        network.add_edge(i, j, capacity=w)
        network.add_edge(j, i, capacity=w)

    value, flows = nx.maximum_flow(network, _SOURCE, _SINK, flow_func=preflow_push)
    if value < supply - tol * max(1.0, supply):
        return None

    forward = np.empty(view.interior.size)
    backward = np.empty(view.interior.size)
    for pos, k in enumerate(view.interior.tolist()):
        i, j, w = int(g.sources[k]), int(g.targets[k]), float(g.weights[k])
        forward[pos] = min(max(flows[i].get(j, 0.0), 0.0), w)
        backward[pos] = min(max(flows[j].get(i, 0.0), 0.0), w)
    return forward, backward


def check_pattern(
    g: DataGraph,
    p: Partition,
    m: Sequence[int],
    K: float,
    L: float,
    b: Sequence[int],
) -> Optional[FlowAssignment]:
    """
    Search a flow with demands for one boundary sign pattern.

    Boundary edges carry exactly L * W_{i,j} in the direction given by ``b``,
    interior edges carry at most W_{i,j} in each direction, sampled nodes have
    |d[i]| <= K and all other nodes d[i] = 0.

    Args:
        g: Data graph
        p: Partition
        m: Sampling set (0-based node ids)
        K: Demand bound at sampled nodes
        L: Boundary flow multiplier
        b: One bit per boundary edge, ascending edge id order

    Returns:
        Witnessing FlowAssignment, or None if the pattern is infeasible

    Raises:
        CertifyError: If K or L is not positive or the pattern length is wrong
    """
    _check_constants(K, L)
    layout = _layout(g, p, m)
    bits = _check_bits(b, layout.boundary.size)

    forward = np.zeros(g.edge_count)
    backward = np.zeros(g.edge_count)
    _set_boundary_flows(g, layout.boundary, bits, L, forward, backward)
    for view in layout.clusters:
        local = tuple(bits[pos] for pos in view.boundary_positions)
        solved = _solve_cluster(layout, view, local, K, L)
        if solved is None:
            logger.debug(f"Pattern infeasible in cluster {view.index}")
            return None
        forward[view.interior], backward[view.interior] = solved
    return FlowAssignment(g, forward, backward)


def k_floor(g: DataGraph, p: Partition, L: float) -> float:
    """
    L times the largest boundary weight.

    This is the demand a sampled boundary endpoint takes when it has no other outlet.
    It is a scale for K, not a bound: endpoints with several sampled neighbours
    spread their boundary load and resolve with smaller K.
    """
    boundary = boundary_edges(g, p)
    if boundary.size == 0:
        return 0.0
    return float(L * np.max(g.weights[boundary]))


def _guard(layout: _Layout) -> None:
    limit = int(config.get("certify.max_pattern_boundary", 20))
    for view in layout.clusters:
        if view.boundary.size > limit:
            raise BoundaryTooLargeError(
                f"Cluster {view.index} touches {view.boundary.size} boundary edges; "
                f"exhaustive checking is limited to {limit}. Use lemma1_constants instead."
            )


def _cluster_results(
    layout: _Layout, view: _ClusterView, K: float, L: float
) -> Dict[Pattern, Optional[Tuple[np.ndarray, np.ndarray]]]:
    return {
        local: _solve_cluster(layout, view, local, K, L)
        for local in itertools.product((0, 1), repeat=int(view.boundary.size))
    }


def _first_failure(
    layout: _Layout, failures: List[Tuple[_ClusterView, Pattern]]
) -> Pattern:
    """Lexicographically smallest full pattern containing one of the failing local patterns."""
    candidates = []
    for view, local in failures:
        bits = [0] * layout.boundary.size
        for pos, bit in zip(view.boundary_positions.tolist(), local):
            bits[pos] = bit
        candidates.append(tuple(bits))
    return min(candidates)


def resolves(
    g: DataGraph,
    p: Partition,
    m: Sequence[int],
    K: float,
    L: float,
    workers: int = 1,
) -> ResolvingCertificate:
    """
    Check every boundary sign pattern for a witnessing flow.

    Each cluster is checked for the 2^(its boundary edges) local patterns; a full
    pattern is feasible exactly when all of its local patterns are.

    Args:
        g: Data graph
        p: Partition
        m: Sampling set (0-based node ids)
        K: Demand bound at sampled nodes
        L: Boundary flow multiplier
        workers: Threads used to check clusters concurrently

    Returns:
        ResolvingCertificate; the reported counterexample does not depend on ``workers``

    Raises:
        CertifyError: If K or L is not positive
        BoundaryTooLargeError: If a cluster touches more boundary edges than the guard allows
    """
    _check_constants(K, L)
    Validators.validate_count(workers, "workers", min_value=1)
    layout = _layout(g, p, m)
    _guard(layout)

    views = [v for v in layout.clusters if v.boundary.size > 0]
    if workers > 1 and len(views) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda v: _cluster_results(layout, v, K, L), views))
    else:
        results = [_cluster_results(layout, v, K, L) for v in views]

    witnesses: Dict[Tuple[int, Pattern], Tuple[np.ndarray, np.ndarray]] = {}
    failures: List[Tuple[_ClusterView, Pattern]] = []
    for view, per_pattern in zip(views, results):
        for local, solved in per_pattern.items():
            if solved is None:
                failures.append((view, local))
            else:
                witnesses[(view.index, local)] = solved
    for view in layout.clusters:
        if view.boundary.size == 0:
            zeros = np.zeros(view.interior.size)
            witnesses[(view.index, ())] = (zeros, zeros.copy())

    if failures:
        cert = ResolvingCertificate(
            K,
            L,
            Verdict.NOT_RESOLVED,
            layout.boundary,
            failing_pattern=_first_failure(layout, failures),
            reason="no feasible flow for pattern",
            _layout=layout,
        )
    else:
        cert = ResolvingCertificate(
            K, L, Verdict.RESOLVED, layout.boundary, _layout=layout, _witnesses=witnesses
        )
    _log_verdict(cert)
    return cert


def _log_verdict(cert: ResolvingCertificate) -> None:
    logger.info(
        f"Certificate K={cert.K:.6g} L={cert.L:.6g} boundary={cert.boundary_size}: "
        f"{cert.verdict.value}"
    )
    run_logger.info(
        f"CERTIFY verdict={cert.verdict.value} K={cert.K:.6g} L={cert.L:.6g} "
        f"boundary={cert.boundary_size} reason={cert.reason or '-'}"
    )


def lemma1_constants(g: DataGraph, p: Partition, m: Sequence[int], L: float) -> Lemma1Result:
    """
    Sufficient condition: every boundary endpoint is connected to a sampled node.

    Endpoint i of boundary edge {i, j} qualifies when it is sampled itself or has a
    sampled neighbour in its own cluster joined by weight >= L times the total
    weight of i's boundary edges (this is L * W_{i,j} when i touches one boundary
    edge). Each unsampled endpoint routes its boundary flow to its heaviest
    qualifying neighbour; the returned K covers both L * max_i |boundary edges at i|
    and the largest load collected at a sampled node.

    Args:
        g: Data graph
        p: Partition
        m: Sampling set (0-based node ids)
        L: Boundary flow multiplier

    Returns:
        Lemma1Result with K when applicable, otherwise the first failing boundary edge
    """
    Validators.validate_positive(L, "L")
    p.check_graph(g)
    sampled = _sampled_mask(g, m)
    boundary = boundary_edges(g, p)
    if boundary.size == 0:
        return Lemma1Result(False, L, reason="partition has no boundary edges")

    labels = p.cluster_of
    ends = np.concatenate([g.sources[boundary], g.targets[boundary]])
    boundary_weight = np.bincount(ends, np.tile(g.weights[boundary], 2), g.node_count)
    boundary_count = np.bincount(ends, minlength=g.node_count)
    load = np.zeros(g.node_count)
    routed: Dict[int, int] = {}

    for k in boundary.tolist():
        for v in (int(g.sources[k]), int(g.targets[k])):
            if v in routed:
                continue
            demand = L * float(boundary_weight[v])
            if sampled[v]:
                routed[v] = v
                load[v] += demand
                continue
            nbrs = g.neighbors(v)
            weights = g.neighbor_weights(v)
            ok = sampled[nbrs] & (labels[nbrs] == labels[v]) & (weights >= demand)
            if not np.any(ok):
                edge = (int(g.sources[k]), int(g.targets[k]))
                logger.debug(f"Sampled-neighbour condition fails at node {v} of edge {edge}")
                return Lemma1Result(
                    False,
                    L,
                    failing_edge=edge,
                    reason=f"node {v} has no qualifying sampled neighbour",
                )
            candidates = nbrs[ok]
            best = int(candidates[np.argmax(weights[ok])])
            routed[v] = best
            load[best] += demand

    K = max(L * float(boundary_count.max()), float(load.max()))
    logger.info(f"Sampled-neighbour condition holds with L={L:.6g}, K={K:.6g}")
    return Lemma1Result(True, L, K=K)


def compatibility_holds(
    g: DataGraph,
    p: Partition,
    m: Sequence[int],
    K: float,
    L: float,
    z: GraphSignal,
    tol: float = 1e-9,
) -> CompatibilityResult:
    """Evaluate the compatibility inequality for one signal ``z``."""
    z = as_signal(g, z)
    sampled = _sampled_mask(g, m)
    lhs = K * float(np.sum(np.abs(z[sampled]))) + tv_restricted(g, z, interior_edges(g, p))
    rhs = L * tv_restricted(g, z, boundary_edges(g, p))
    slack = lhs - rhs
    return CompatibilityResult(slack >= -tol, slack, lhs, rhs)


def min_feasible_K(
    g: DataGraph,
    p: Partition,
    m: Sequence[int],
    L: float,
    tol: Optional[float] = None,
    upper: Optional[float] = None,
) -> float:
    """
    Smallest K (up to ``tol``) for which ``m`` resolves ``p`` at the given L.

    Clusters are visited in order and bisected only when they fail at the best K
    found so far, so every cluster search starts from a value no cluster can beat.

    Returns:
        Minimal K, or ``math.inf`` if even ``upper`` does not resolve

    Raises:
        BoundaryTooLargeError: If a cluster exceeds the exhaustive guard
    """
    Validators.validate_positive(L, "L")
    tol = float(config.get("certify.bisection_tol", 1e-3)) if tol is None else tol
    upper = float(config.get("certify.k_upper", 1e6)) if upper is None else upper
    layout = _layout(g, p, m)
    _guard(layout)

    best = 0.0

    def cluster_ok(view: _ClusterView, K: float) -> bool:
        return all(
            _solve_cluster(layout, view, local, K, L) is not None
            for local in itertools.product((0, 1), repeat=int(view.boundary.size))
        )

    for view in layout.clusters:
        if view.boundary.size == 0 or cluster_ok(view, best):
            continue
        if not cluster_ok(view, upper):
            logger.warning(f"Cluster {view.index} is not resolved even at K={upper:.3g}")
            return math.inf
        lo, hi = best, upper
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if cluster_ok(view, mid):
                hi = mid
            else:
                lo = mid
        best = hi

    logger.info(f"Minimal K={best:.6g} at L={L:.6g}")
    return best


def flow_lp_feasible(
    g: DataGraph,
    p: Partition,
    m: Sequence[int],
    K: float,
    L: float,
    b: Sequence[int],
) -> bool:
    """
    Linear feasibility oracle for one boundary pattern.

    Variables are h(i, j), h(j, i) in [0, W_{i,j}] on interior edges and d[i] in
    [-K, K] on sampled nodes; one conservation equality per node. Used to
    cross-check the max-flow reduction on small graphs.

    Raises:
        CertifyError: If the graph exceeds the oracle size guard
    """
    _check_constants(K, L)
    max_nodes = int(config.get("oracle.max_nodes", 200))
    if g.node_count > max_nodes:
        raise CertifyError(f"LP oracle is limited to {max_nodes} nodes")
    layout = _layout(g, p, m)
    bits = _check_bits(b, layout.boundary.size)

    n = g.node_count
    interior = interior_edges(g, p)
    sampled_nodes = np.flatnonzero(layout.sampled)
    e = interior.size
    s = sampled_nodes.size

    rows, cols, vals = [], [], []
    for pos, k in enumerate(interior.tolist()):
        i, j = int(g.sources[k]), int(g.targets[k])
        # forward h(i, j): leaves i, enters j
        rows += [i, j, j, i]
        cols += [pos, pos, e + pos, e + pos]
        vals += [-1.0, 1.0, -1.0, 1.0]
    for pos, v in enumerate(sampled_nodes.tolist()):
        rows.append(v)
        cols.append(2 * e + pos)
        vals.append(-1.0)
    a_eq = sp.csr_matrix((vals, (rows, cols)), shape=(n, 2 * e + s))

    forward = np.zeros(g.edge_count)
    backward = np.zeros(g.edge_count)
    _set_boundary_flows(g, layout.boundary, bits, L, forward, backward)
    b_eq = -(
        np.bincount(g.targets, forward, n)
        + np.bincount(g.sources, backward, n)
        - np.bincount(g.sources, forward, n)
        - np.bincount(g.targets, backward, n)
    )

    w = g.weights[interior]
    bounds = [(0.0, float(c)) for c in np.concatenate([w, w])] + [(-K, K)] * s
    tol = float(config.get("oracle.pivot_tol", 1e-10))
    if a_eq.shape[1] == 0:
        return bool(np.all(np.abs(b_eq) <= 1e-9))
    result = linprog(
        np.zeros(a_eq.shape[1]),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs",
        options={"primal_feasibility_tolerance": tol, "dual_feasibility_tolerance": tol},
    )
    if result.status not in (0, 2):
        raise CertifyError(f"LP oracle failed: {result.message}")
    return bool(result.status == 0)


def certificate_to_dict(cert: ResolvingCertificate) -> Dict[str, Any]:
    """
    JSON-ready certificate with 1-based node ids.

    Witness flows are included for resolved certificates whose boundary is at
    most ``certify.witness_export_limit`` edges.
    """
    payload: Dict[str, Any] = {
        "verdict": cert.verdict.value,
        "K": cert.K,
        "L": cert.L,
        "boundary_size": cert.boundary_size,
    }
    layout = cert._layout
    if layout is not None:
        g = layout.graph
        payload["boundary_edges"] = [
            [int(g.sources[k]) + 1, int(g.targets[k]) + 1] for k in cert.boundary.tolist()
        ]
    if cert.failing_pattern is not None:
        payload["failing_pattern"] = list(cert.failing_pattern)
    if cert.reason:
        payload["reason"] = cert.reason

    limit = int(config.get("certify.witness_export_limit", 10))
    if cert.resolved and layout is not None and cert.boundary_size <= limit:
        g = layout.graph
        flows = []
        for pattern in cert.patterns():
            h = cert.witness(pattern)
            edges = [
                [int(i) + 1, int(j) + 1, float(f), float(bk)]
                for i, j, f, bk in zip(g.sources, g.targets, h.forward, h.backward)
                if f > 0 or bk > 0
            ]
            flows.append({"pattern": list(pattern), "flows": edges})
        payload["witness_flows"] = flows
    return payload
