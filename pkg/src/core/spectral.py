"""
Spectral module for netlasso.

Graph Laplacian, Laplacian quadratic form, graph Fourier transform, band-limited
signals and the label propagation baseline.
"""

from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.csgraph import laplacian as csgraph_laplacian
from scipy.sparse.linalg import spsolve_triangular

from src.core.graph_core import DataGraph, GraphSignal, Observation, as_signal
from src.utils.config import get_config
from src.utils.logger import get_logger
from src.utils.validators import Validators

logger = get_logger("spectral")
config = get_config()

# Dense symmetric N x N matrix with L_ii = sum_k W_ik and L_ij = -W_ij.
LaplacianMatrix = np.ndarray

SweepCallback = Callable[[int, GraphSignal], None]


class SpectralError(Exception):
    """Custom exception for spectral computations."""

    pass


@dataclass(frozen=True, eq=False)
class GftBasis:
    """
    Laplacian eigenpairs in ascending eigenvalue order.

    Column ``l`` of ``eigenvectors`` is u_{l+1}; its largest-magnitude entry is positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return int(self.eigenvalues.size)


def _check_size(g: DataGraph) -> None:
    max_nodes = int(config.get("spectral.max_nodes", 5000))
    if g.node_count > max_nodes:
        raise SpectralError(
            f"Dense spectral routines are limited to {max_nodes} nodes, graph has {g.node_count}"
        )


def laplacian(g: DataGraph) -> LaplacianMatrix:
    """
    Dense graph Laplacian L = D - W.

    Raises:
        SpectralError: If the graph exceeds the dense size guard
    """
    _check_size(g)
    return np.asarray(csgraph_laplacian(g.adjacency()).toarray(), dtype=np.float64)


def quadratic_form(g: DataGraph, x: GraphSignal) -> float:
    """Laplacian quadratic form sum over edges of W_{i,j} (x[j] - x[i])^2."""
    x = as_signal(g, x)
    return float(np.sum(g.weights * (x[g.targets] - x[g.sources]) ** 2))


def gft_basis(g: DataGraph) -> GftBasis:
    """
    Eigendecomposition of the Laplacian for the graph Fourier transform.

    Eigenvalues are sorted ascending and clipped at zero; each eigenvector is
    flipped so that its largest-magnitude entry is positive.
    """
    lap = laplacian(g)
    values, vectors = scipy.linalg.eigh(lap)
    order = np.argsort(values, kind="stable")
    values, vectors = values[order], vectors[:, order]
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors = vectors * signs
    logger.debug(f"GFT basis computed for {g.node_count} nodes, lambda_max={values[-1]:.4g}")
    return GftBasis(np.maximum(values, 0.0), vectors)


def gft(basis: GftBasis, x: GraphSignal) -> np.ndarray:
    """
    GFT coefficients x~[l] = u_l^T x.

    Raises:
        SpectralError: On dimension mismatch
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size != basis.size:
        raise SpectralError(f"Signal of shape {x.shape} does not match basis of size {basis.size}")
    return basis.eigenvectors.T @ x


def inverse_gft(basis: GftBasis, coeffs: np.ndarray) -> GraphSignal:
    """Reconstruct x = sum_l x~[l] u_l."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim != 1 or coeffs.size != basis.size:
        raise SpectralError(f"Expected {basis.size} coefficients, got shape {coeffs.shape}")
    return basis.eigenvectors @ coeffs


def band_limited_signal(basis: GftBasis, active: Iterable[int]) -> GraphSignal:
    """
    Signal with unit GFT coefficients on the 1-based indices ``active``.

    Raises:
        SpectralError: If an index lies outside 1..N
    """
    coeffs = np.zeros(basis.size)
    for l in active:
        if not 1 <= int(l) <= basis.size:
            raise SpectralError(f"Frequency index {l} outside 1..{basis.size}")
        coeffs[int(l) - 1] = 1.0
    return inverse_gft(basis, coeffs)


def spectrum_table(basis: GftBasis, x: GraphSignal) -> List[Tuple[int, float, float]]:
    """Rows (l, eigenvalue, coefficient) with 1-based l, as plotted for the duality figures."""
    coeffs = gft(basis, x)
    return [(l + 1, float(basis.eigenvalues[l]), float(coeffs[l])) for l in range(basis.size)]


def label_propagation(
    g: DataGraph,
    obs: Observation,
    iterations: int,
    callback: Optional[SweepCallback] = None,
) -> GraphSignal:
    """
    Harmonic label propagation with clamped samples.

    Each sweep visits the unsampled nodes in ascending id order and sets
    x[i] to the weighted neighbour average, using values already updated in
    the same sweep (Gauss-Seidel). A sweep is one lower-triangular solve.

    Args:
        g: Data graph
        obs: Observed samples, clamped throughout
        iterations: Number of sweeps
        callback: Called as ``callback(sweep, x)`` after every sweep

    Returns:
        Propagated signal

    Raises:
        SpectralError: If the sampling set is empty
    """
    Validators.validate_count(iterations, "iterations", min_value=1)
    obs.check_graph(g)
    if obs.size == 0:
        raise SpectralError("Label propagation needs at least one sampled node")

    n = g.node_count
    x = np.zeros(n)
    x[obs.sampled_nodes] = obs.y
    sampled = np.zeros(n, dtype=bool)
    sampled[obs.sampled_nodes] = True
    free = np.flatnonzero(~sampled)

    if free.size == 0:
        for sweep in range(1, iterations + 1):
            if callback is not None:
                callback(sweep, x.copy())
        return x

    adjacency = g.adjacency()
    rows = adjacency[free]
    a_ff = rows[:, free].tocsr()
    a_fm = rows[:, obs.sampled_nodes].tocsr()
    degree = np.asarray(rows.sum(axis=1)).ravel()

    isolated = degree == 0
    if np.any(isolated):
        logger.warning(
            f"{int(isolated.sum())} unsampled node(s) have no neighbours and stay at 0"
        )
    diagonal = np.where(isolated, 1.0, degree)

    lower = (sp.diags(diagonal) - sp.tril(a_ff, k=-1)).tocsr()
    upper = sp.triu(a_ff, k=1).tocsr()
    clamped = a_fm @ obs.y

    x_free = x[free]
    for sweep in range(1, iterations + 1):
        rhs = upper @ x_free + clamped
        x_free = spsolve_triangular(lower, rhs, lower=True)
        x[free] = x_free
        if callback is not None:
            callback(sweep, x.copy())

    logger.debug(f"Label propagation finished {iterations} sweeps on {free.size} free nodes")
    return x
