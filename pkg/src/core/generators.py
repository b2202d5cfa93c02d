"""
Synthetic graph generators for netlasso.

Chain graphs split into equal consecutive clusters and planted-partition graphs
with power-law community sizes and degree propensities, both with random edge
weights that are heavier inside clusters than across them.
"""

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from src.core.graph_core import DataGraph, GraphSignal, Partition, clustered_signal
from src.utils.logger import get_logger
from src.utils.validators import Validators

logger = get_logger("generators")


class GeneratorError(Exception):
    """Custom exception for graph generation errors."""

    pass


class WeightKind(Enum):
    """Edge weight distributions."""

    ABS_NORMAL = "abs_normal"
    CONSTANT = "constant"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class WeightLaw:
    """
    Edge weight distribution.

    ``ABS_NORMAL`` draws |N(mean, variance)|, ``CONSTANT`` always returns ``mean``,
    ``UNIFORM`` draws from [low, high).
    """

    kind: WeightKind = WeightKind.ABS_NORMAL
    mean: float = 1.0
    variance: float = 0.25
    low: float = 0.0
    high: float = 1.0

    def __post_init__(self) -> None:
        if self.kind is WeightKind.ABS_NORMAL:
            Validators.validate_nonnegative(self.variance, "variance")
        elif self.kind is WeightKind.CONSTANT:
            Validators.validate_positive(self.mean, "mean")
        elif not 0.0 < self.low < self.high:
            raise GeneratorError(
                f"Uniform weights need 0 < low < high, got [{self.low}, {self.high})"
            )

    @classmethod
    def abs_normal(cls, mean: float, variance: float) -> "WeightLaw":
        return cls(WeightKind.ABS_NORMAL, mean=mean, variance=variance)

    @classmethod
    def constant(cls, value: float) -> "WeightLaw":
        return cls(WeightKind.CONSTANT, mean=value)

    @classmethod
    def uniform(cls, low: float, high: float) -> "WeightLaw":
        return cls(WeightKind.UNIFORM, low=low, high=high)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` strictly positive weights."""
        if self.kind is WeightKind.CONSTANT:
            return np.full(size, float(self.mean))
        if self.kind is WeightKind.UNIFORM:
            return rng.uniform(self.low, self.high, size=size)
        values = np.abs(rng.normal(self.mean, np.sqrt(self.variance), size=size))
        return np.maximum(values, np.finfo(np.float64).tiny)

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["kind"] = self.kind.value
        return payload

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "WeightLaw":
        data = dict(payload)
        try:
            data["kind"] = WeightKind(data.get("kind", WeightKind.ABS_NORMAL.value))
            return cls(**data)
        except (TypeError, ValueError) as e:
            raise GeneratorError(f"Invalid weight law {payload}: {e}") from e


INTRA_DEFAULT = WeightLaw.abs_normal(2.0, 0.25)
INTER_DEFAULT = WeightLaw.abs_normal(1.0, 0.25)


def generate_chain(
    n: int,
    cluster_size: int,
    intra: WeightLaw = INTRA_DEFAULT,
    inter: WeightLaw = INTER_DEFAULT,
    seed: Optional[int] = None,
) -> Tuple[DataGraph, Partition]:
    """
    Chain 0 - 1 - ... - (n-1) cut into consecutive clusters of ``cluster_size`` nodes.

    Args:
        n: Number of nodes
        cluster_size: Nodes per cluster, must divide n
        intra: Weight law of edges inside a cluster
        inter: Weight law of edges between consecutive clusters
        seed: Random seed

    Returns:
        (graph, partition)

    Raises:
        GeneratorError: If cluster_size does not divide n
    """
    Validators.validate_count(n, "n", min_value=1)
    Validators.validate_count(cluster_size, "cluster_size", min_value=1)
    if n % cluster_size:
        raise GeneratorError(f"cluster_size {cluster_size} does not divide n={n}")

    rng = np.random.default_rng(seed)
    src = np.arange(n - 1, dtype=np.int64)
    dst = src + 1
    crossing = dst % cluster_size == 0
    weights = np.empty(n - 1)
    weights[~crossing] = intra.draw(rng, int(np.count_nonzero(~crossing)))
    weights[crossing] = inter.draw(rng, int(np.count_nonzero(crossing)))

    g = DataGraph(n, src, dst, weights)
    p = Partition(np.arange(n, dtype=np.int64) // cluster_size)
    logger.info(f"Generated chain with {n} nodes and {p.cluster_count} clusters")
    return g, p


def chain_signal(p: Partition, values: Sequence[float] = (1.0, 5.0)) -> GraphSignal:
    """Clustered signal cycling through ``values`` over consecutive clusters."""
    cycle = np.asarray(values, dtype=np.float64)
    coeffs = cycle[np.arange(p.cluster_count) % cycle.size]
    return clustered_signal(p, coeffs)


def _truncated_power_law(
    rng: np.random.Generator, size: int, exponent: float, low: float, high: float
) -> np.ndarray:
    """Inverse-CDF draws from density ~ s^(-exponent) on [low, high]."""
    u = rng.random(size)
    if abs(exponent - 1.0) < 1e-12:
        return low * (high / low) ** u
    a = 1.0 - exponent
    return (low**a + u * (high**a - low**a)) ** (1.0 / a)


def _community_sizes(
    n: int, count: int, exponent: float, spread: float, rng: np.random.Generator, retries: int
) -> np.ndarray:
    for attempt in range(1, retries + 1):
        raw = _truncated_power_law(rng, count, exponent, 1.0, spread)
        scaled = raw * n / raw.sum()
        sizes = np.floor(scaled).astype(np.int64)
        remainder = n - int(sizes.sum())
        if remainder:
            sizes[np.argsort(-(scaled - sizes), kind="stable")[:remainder]] += 1
        if sizes.min() >= 2:
            return sizes
        logger.debug(f"Community size draw {attempt} produced a singleton, retrying")
    raise GeneratorError(
        f"Could not draw {count} communities of at least 2 nodes from {n} nodes in {retries} tries"
    )


def generate_planted_partition(
    n: int,
    community_count: int,
    size_exponent: float = 2.0,
    degree_exponent: float = 2.5,
    avg_degree: float = 18.9,
    mixing: float = 0.1,
    intra: WeightLaw = INTRA_DEFAULT,
    inter: WeightLaw = INTER_DEFAULT,
    seed: Optional[int] = None,
    size_spread: float = 10.0,
    degree_spread: float = 50.0,
    max_retries: int = 20,
) -> Tuple[DataGraph, Partition]:
    """
    Planted-partition graph with power-law community sizes and degrees.

    Nodes get power-law degree propensities. Each community is first joined by a
    random spanning path, then receives about size * avg_degree * (1 - mixing) / 2
    edges with endpoints drawn in proportion to the propensities; about
    n * avg_degree * mixing / 2 edges are drawn across communities. Components
    left disconnected are linked by extra cross-community edges.

    Args:
        n: Number of nodes
        community_count: Number of communities (at least 2)
        size_exponent: Exponent of the community size power law
        degree_exponent: Exponent of the degree propensity power law
        avg_degree: Target average degree
        mixing: Fraction of each node's edges leaving its community, in (0, 1)
        intra: Weight law inside communities
        inter: Weight law across communities
        seed: Random seed
        size_spread: Ratio between the largest and smallest raw community size
        degree_spread: Ratio between the largest and smallest propensity
        max_retries: Attempts for the community size draw

    Returns:
        (graph, partition)

    Raises:
        GeneratorError: If no valid community sizes can be drawn
    """
    Validators.validate_count(community_count, "community_count", min_value=2)
    Validators.validate_open_unit(mixing, "mixing")
    Validators.validate_positive(avg_degree, "avg_degree")
    if 2 * community_count > n:
        raise GeneratorError(
            f"{community_count} communities of at least 2 nodes need n >= {2 * community_count}"
        )

    rng = np.random.default_rng(seed)
    sizes = _community_sizes(n, community_count, size_exponent, size_spread, rng, max_retries)
    labels = np.empty(n, dtype=np.int64)
    labels[rng.permutation(n)] = np.repeat(np.arange(community_count), sizes)
    theta = _truncated_power_law(rng, n, degree_exponent, 1.0, degree_spread)

    order = np.argsort(labels, kind="stable")
    splits = np.concatenate([[0], np.cumsum(sizes)])
    src_parts: List[np.ndarray] = []
    dst_parts: List[np.ndarray] = []

    for c in range(community_count):
        members = order[splits[c] : splits[c + 1]]
        s = members.size
        path = rng.permutation(members)
        src_parts.append(path[:-1])
        dst_parts.append(path[1:])
        target = int(round(s * avg_degree * (1.0 - mixing) / 2.0)) - (s - 1)
        target = min(target, s * (s - 1) // 2 - (s - 1))
        if target > 0:
            prob = theta[members] / theta[members].sum()
            a = rng.choice(members, size=target, p=prob)
            b = rng.choice(members, size=target, p=prob)
            keep = a != b
            src_parts.append(a[keep])
            dst_parts.append(b[keep])

    outside = int(round(n * avg_degree * mixing / 2.0))
    prob = theta / theta.sum()
    drawn = 0
    for _ in range(20):
        if drawn >= outside:
            break
        batch = 2 * (outside - drawn)
        a = rng.choice(n, size=batch, p=prob)
        b = rng.choice(n, size=batch, p=prob)
        keep = labels[a] != labels[b]
        a, b = a[keep][: outside - drawn], b[keep][: outside - drawn]
        src_parts.append(a)
        dst_parts.append(b)
        drawn += a.size

    src = np.concatenate(src_parts)
    dst = np.concatenate(dst_parts)
    keys = np.unique(np.minimum(src, dst) * n + np.maximum(src, dst))
    lo, hi = keys // n, keys % n

    count, comp = connected_components(
        sp.coo_matrix((np.ones(lo.size), (lo, hi)), shape=(n, n)), directed=False
    )
    if count > 1:
        _, reps = np.unique(comp, return_index=True)
        lo = np.concatenate([lo, np.minimum(reps[:-1], reps[1:])])
        hi = np.concatenate([hi, np.maximum(reps[:-1], reps[1:])])
        logger.debug(f"Linked {count} components with {count - 1} extra edges")

    crossing = labels[lo] != labels[hi]
    weights = np.empty(lo.size)
    weights[~crossing] = intra.draw(rng, int(np.count_nonzero(~crossing)))
    weights[crossing] = inter.draw(rng, int(np.count_nonzero(crossing)))

    g = DataGraph(n, lo, hi, weights)
    logger.info(
        f"Generated planted partition: {n} nodes, {g.edge_count} edges, "
        f"{community_count} communities, {int(crossing.sum())} boundary edges"
    )
    return g, Partition(labels)


def planted_signal(
    p: Partition, low: float = 1.0, high: float = 50.0, seed: Optional[int] = None
) -> GraphSignal:
    """Clustered signal with i.i.d. U(low, high) cluster coefficients."""
    rng = np.random.default_rng(seed)
    return clustered_signal(p, rng.uniform(low, high, size=p.cluster_count))
