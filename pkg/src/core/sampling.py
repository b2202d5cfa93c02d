"""
Sampling set construction for netlasso.

Boundary-guided sets that place samples next to cluster boundaries, and
uniformly random sets as the structure-agnostic reference.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Union

import numpy as np

from src.core.graph_core import DataGraph, Partition, boundary_edges
from src.utils.logger import get_logger
from src.utils.validators import Validators

logger = get_logger("sampling")


class SamplingError(Exception):
    """Custom exception for sampling set construction errors."""

    pass


class SamplerMode(Enum):
    """Boundary-guided selection rules."""

    LEMMA1 = "lemma1"
    EDGE_SORTED = "edge_sorted"


@dataclass(frozen=True, eq=False)
class SamplingResult:
    """Sampled node ids in ascending order."""

    nodes: np.ndarray
    partial_coverage: bool
    mode: str

    @property
    def size(self) -> int:
        return int(self.nodes.size)


class _Picker:
    """Ordered, duplicate-free node selection with a hard budget."""

    def __init__(self, node_count: int, budget: int) -> None:
        self.mask = np.zeros(node_count, dtype=bool)
        self.chosen: List[int] = []
        self.budget = budget

    @property
    def full(self) -> bool:
        return len(self.chosen) >= self.budget

    def add(self, node: int) -> None:
        if not self.mask[node]:
            self.mask[node] = True
            self.chosen.append(int(node))

    def fill_uniform(self, rng: np.random.Generator) -> None:
        remaining = self.budget - len(self.chosen)
        if remaining > 0:
            free = np.flatnonzero(~self.mask)
            for node in rng.choice(free, size=remaining, replace=False):
                self.add(int(node))

    def result(self, partial: bool, mode: str) -> SamplingResult:
        nodes = np.sort(np.asarray(self.chosen, dtype=np.int64))
        nodes.setflags(write=False)
        return SamplingResult(nodes, partial, mode)


def _check_budget(g: DataGraph, budget: int) -> int:
    Validators.validate_count(budget, "budget", min_value=0)
    return min(int(budget), g.node_count)


def sample_uniform(g: DataGraph, budget: int, seed: Optional[int] = None) -> SamplingResult:
    """Draw min(budget, N) distinct nodes uniformly at random."""
    size = _check_budget(g, budget)
    rng = np.random.default_rng(seed)
    nodes = np.sort(rng.choice(g.node_count, size=size, replace=False).astype(np.int64))
    nodes.setflags(write=False)
    return SamplingResult(nodes, False, "uniform")


def _lemma1(g: DataGraph, p: Partition, picker: _Picker, L: float) -> bool:
    """
    For each boundary endpoint, keep or add a sampled same-cluster neighbour that can
    carry the endpoint's boundary flow; fall back to the endpoint itself.

    Returns:
        True if the budget ran out before every boundary endpoint was covered
    """
    labels = p.cluster_of
    boundary = boundary_edges(g, p)
    ends = np.concatenate([g.sources[boundary], g.targets[boundary]])
    load = L * np.bincount(ends, np.tile(g.weights[boundary], 2), g.node_count)

    for k in boundary.tolist():
        for v in (int(g.sources[k]), int(g.targets[k])):
            if picker.mask[v]:
                continue
            nbrs = g.neighbors(v)
            weights = g.neighbor_weights(v)
            ok = (labels[nbrs] == labels[v]) & (weights >= load[v])
            if np.any(picker.mask[nbrs[ok]]):
                continue
            if picker.full:
                return True
            picker.add(int(nbrs[ok][np.argmax(weights[ok])]) if np.any(ok) else v)
    return False


def _edge_sorted(g: DataGraph, p: Partition, picker: _Picker) -> bool:
    """
    Scan edges by ascending weight and add the highest-degree neighbour of each
    endpoint (lowest id on ties) until the budget is reached.

    Returns:
        True if the budget ran out before every boundary edge was scanned
    """
    degrees = g.degrees()
    crossing = p.cluster_of[g.sources] != p.cluster_of[g.targets]
    order = np.argsort(g.weights, kind="stable")

    for pos, k in enumerate(order.tolist()):
        for v in (int(g.sources[k]), int(g.targets[k])):
            nbrs = g.neighbors(v)
            best = int(nbrs[np.argmax(degrees[nbrs])])
            if not picker.mask[best]:
                if picker.full:
                    return bool(np.any(crossing[order[pos:]]))
                picker.add(best)
        if picker.full:
            return bool(np.any(crossing[order[pos + 1 :]]))
    return False


def sample_boundary_guided(
    g: DataGraph,
    p: Partition,
    budget: int,
    mode: Union[SamplerMode, str] = SamplerMode.LEMMA1,
    seed: Optional[int] = None,
    L: float = 2.0,
) -> SamplingResult:
    """
    Sampling set concentrated around the partition boundary.

    Args:
        g: Data graph
        p: Partition
        budget: Number of nodes to sample; budgets >= N return every node
        mode: ``lemma1`` covers boundary endpoints through heavy same-cluster
            neighbours; ``edge_sorted`` scans edges by ascending weight
        seed: Seed for filling leftover budget uniformly at random
        L: Boundary flow multiplier used by ``lemma1`` mode

    Returns:
        SamplingResult with exactly min(budget, N) nodes; ``partial_coverage`` is
        set when the budget ran out before the boundary was covered

    Raises:
        SamplingError: On an unknown mode
    """
    size = _check_budget(g, budget)
    p.check_graph(g)
    try:
        mode = SamplerMode(mode) if isinstance(mode, str) else mode
    except ValueError as e:
        raise SamplingError(f"Unknown sampler mode: {mode}") from e
    Validators.validate_positive(L, "L")

    picker = _Picker(g.node_count, size)
    if mode is SamplerMode.LEMMA1:
        partial = _lemma1(g, p, picker, L)
    else:
        partial = _edge_sorted(g, p, picker)

    if partial:
        logger.warning(
            f"Sampling budget {size} exhausted before the boundary was covered ({mode.value})"
        )
    covered = len(picker.chosen)
    picker.fill_uniform(np.random.default_rng(seed))
    logger.info(
        f"Boundary-guided sampling ({mode.value}): {covered} boundary picks, "
        f"{size - covered} random fill"
    )
    return picker.result(partial, mode.value)
