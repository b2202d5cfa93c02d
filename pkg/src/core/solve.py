"""
Solver module for netlasso.

Network Lasso recovery min_x sum_{i in M} |x[i] - y[i]| + lambda ||x||_TV via
edge-consensus ADMM, an exact LP oracle for small graphs, the error bound for
resolving sampling sets and the cluster-mean post-processing step.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from src.core.graph_core import (
    DataGraph,
    GraphSignal,
    Observation,
    Partition,
    as_signal,
    components_without,
    empirical_error,
    total_variation,
)
from src.utils.config import get_config
from src.utils.logger import get_logger
from src.utils.validators import ValidationError, Validators

logger = get_logger("solve")
config = get_config()

IterationCallback = Callable[[int, GraphSignal], None]


class SolverError(Exception):
    """Custom exception for solver errors."""

    pass


@dataclass(frozen=True)
class SolverConfig:
    """ADMM settings. ``seed`` is echoed into reports; the iteration itself is deterministic."""

    lam: float
    rho: float = 0.01
    max_iterations: int = 300
    primal_tol: float = 1e-6
    dual_tol: float = 1e-6
    seed: int = 0
    stop_on_tolerance: bool = False

    def __post_init__(self) -> None:
        try:
            Validators.validate_positive(self.lam, "lambda")
            Validators.validate_positive(self.rho, "rho")
            Validators.validate_count(self.max_iterations, "max_iterations", min_value=1)
            Validators.validate_positive(self.primal_tol, "primal_tol")
            Validators.validate_positive(self.dual_tol, "dual_tol")
        except ValidationError as e:
            raise SolverError(str(e)) from e

    @classmethod
    def from_config(cls, lam: float, **overrides: object) -> "SolverConfig":
        """Build a config from the ``solver`` section, with keyword overrides."""
        values = {
            "rho": float(config.get("solver.rho", 0.01)),
            "max_iterations": int(config.get("solver.max_iterations", 300)),
            "primal_tol": float(config.get("solver.primal_tol", 1e-6)),
            "dual_tol": float(config.get("solver.dual_tol", 1e-6)),
            "stop_on_tolerance": bool(config.get("solver.stop_on_tolerance", False)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(lam=lam, **values)  # type: ignore[arg-type]


@dataclass
class SolveReport:
    """ADMM outcome with per-iteration traces."""

    estimate: GraphSignal
    objective_trace: np.ndarray
    iterations_run: int
    converged: bool
    primal_residual: float
    dual_residual: float
    primal_trace: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))
    dual_trace: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))


@dataclass(frozen=True)
class OracleSolution:
    estimate: GraphSignal
    value: float


class PostprocessStatus(Enum):
    """Outcome of cluster-mean post-processing."""

    OK = "ok"
    BOUNDARY_MISMATCH = "boundary_mismatch"
    EMPTY_CLUSTER = "empty_cluster"


@dataclass
class PostprocessResult:
    status: PostprocessStatus
    signal: Optional[GraphSignal] = None
    partition: Optional[Partition] = None
    cut_edges: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status is PostprocessStatus.OK


def default_lambda(K: float) -> float:
    """Regularisation 1/K matched to a resolving certificate."""
    Validators.validate_positive(K, "K")
    return 1.0 / K


def objective(g: DataGraph, obs: Observation, x: GraphSignal, lam: float) -> float:
    """Empirical l1 error plus lam times the total variation."""
    Validators.validate_positive(lam, "lambda")
    return empirical_error(obs, x) + lam * total_variation(g, x)


def _soft(v: np.ndarray, threshold: np.ndarray) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - threshold, 0.0)


def nlasso_admm(
    g: DataGraph,
    obs: Observation,
    cfg: SolverConfig,
    callback: Optional[IterationCallback] = None,
) -> SolveReport:
    """
    Solve the network Lasso by edge-consensus ADMM.

    Every edge k = {i, j} keeps copies z_i[k], z_j[k] of x[i], x[j] with scaled
    duals u_i[k], u_j[k]. Per iteration:

    - x-update: v[i] is the mean of z - u over the copies held for node i; sampled
      nodes take y[i] + soft(v[i] - y[i], 1 / (rho deg(i))), others take v[i].
    - z-update: the pair (x_i + u_i, x_j + u_j) keeps its mean while its
      difference is soft-thresholded by 2 lam W_{i,j} / rho.
    - u-update: u += x - z.

    State starts at zero.

    Args:
        g: Data graph
        obs: Observation (at least one sample)
        cfg: Solver settings
        callback: Called as ``callback(iteration, x)`` after every iteration

    Returns:
        SolveReport with estimate, objective trace and final residuals

    Raises:
        SolverError: On an empty sampling set or non-finite iterates
    """
    obs.check_graph(g)
    if obs.size == 0:
        raise SolverError("nLasso needs at least one sampled node")

    n = g.node_count
    src, dst, w = g.sources, g.targets, g.weights
    degree = g.degrees().astype(np.float64)
    sampled = np.zeros(n, dtype=bool)
    sampled[obs.sampled_nodes] = True
    y_full = np.zeros(n)
    y_full[obs.sampled_nodes] = obs.y
    isolated = degree == 0
    safe_degree = np.where(isolated, 1.0, degree)
    node_threshold = 1.0 / (cfg.rho * safe_degree)
    edge_threshold = 2.0 * cfg.lam * w / cfg.rho

    x = np.zeros(n)
    z_src = np.zeros(w.size)
    z_dst = np.zeros(w.size)
    u_src = np.zeros(w.size)
    u_dst = np.zeros(w.size)

    objective_trace: List[float] = []
    primal_trace: List[float] = []
    dual_trace: List[float] = []
    primal = dual = float("inf")
    converged = False
    iterations = 0

    logger.info(
        f"ADMM start: N={n}, |E|={w.size}, |M|={obs.size}, lambda={cfg.lam:.4g}, "
        f"rho={cfg.rho:.4g}, iterations={cfg.max_iterations}"
    )

    for iteration in range(1, cfg.max_iterations + 1):
        acc = np.bincount(src, z_src - u_src, n) + np.bincount(dst, z_dst - u_dst, n)
        v = acc / safe_degree
        x = np.where(sampled, y_full + _soft(v - y_full, node_threshold), v)
        x[isolated] = y_full[isolated]

        p = x[src] + u_src
        q = x[dst] + u_dst
        mean = 0.5 * (p + q)
        half_diff = 0.5 * _soft(p - q, edge_threshold)
        new_src = mean + half_diff
        new_dst = mean - half_diff

        dual = cfg.rho * float(np.sqrt(np.sum((new_src - z_src) ** 2 + (new_dst - z_dst) ** 2)))
        z_src, z_dst = new_src, new_dst

        r_src = x[src] - z_src
        r_dst = x[dst] - z_dst
        u_src = u_src + r_src
        u_dst = u_dst + r_dst
        primal = float(np.sqrt(np.sum(r_src**2 + r_dst**2)))

        if not (np.all(np.isfinite(x)) and np.isfinite(primal) and np.isfinite(dual)):
            raise SolverError(f"Non-finite ADMM iterate at iteration {iteration}")

        iterations = iteration
        objective_trace.append(
            float(np.sum(np.abs(x[obs.sampled_nodes] - obs.y)))
            + cfg.lam * float(np.sum(w * np.abs(x[dst] - x[src])))
        )
        primal_trace.append(primal)
        dual_trace.append(dual)
        if callback is not None:
            callback(iteration, x.copy())

        converged = primal <= cfg.primal_tol and dual <= cfg.dual_tol
        if converged and cfg.stop_on_tolerance:
            logger.debug(f"ADMM met tolerances at iteration {iteration}")
            break

    if cfg.stop_on_tolerance and not converged:
        logger.warning(
            f"ADMM did not converge in {iterations} iterations "
            f"(primal={primal:.3g}, dual={dual:.3g})"
        )
    logger.info(f"ADMM done: objective={objective_trace[-1]:.6g}, primal={primal:.3g}")

    return SolveReport(
        estimate=x,
        objective_trace=np.asarray(objective_trace),
        iterations_run=iterations,
        converged=converged,
        primal_residual=primal,
        dual_residual=dual,
        primal_trace=np.asarray(primal_trace),
        dual_trace=np.asarray(dual_trace),
    )


def lp_oracle(g: DataGraph, obs: Observation, lam: float) -> OracleSolution:
    """
    Exact network Lasso minimiser through its epigraph LP.

    Minimises sum s_i + lam sum W_{i,j} t_{ij} subject to s_i >= |x[i] - y[i]| on
    sampled nodes and t_{ij} >= |x[i] - x[j]| on edges, solved with HiGHS.

    Raises:
        SolverError: If the graph exceeds the oracle size guard or the LP fails
    """
    Validators.validate_positive(lam, "lambda")
    obs.check_graph(g)
    max_nodes = int(config.get("oracle.max_nodes", 200))
    if g.node_count > max_nodes:
        raise SolverError(f"LP oracle is limited to {max_nodes} nodes, graph has {g.node_count}")

    n, m, e = g.node_count, obs.size, g.edge_count
    nodes = obs.sampled_nodes
    s_cols = n + np.arange(m)
    t_cols = n + m + np.arange(e)
    rows_m = np.arange(m)
    rows_e = np.arange(e)

    # x_i - s_i <= y_i and -x_i - s_i <= -y_i
    fit_plus = sp.csr_matrix(
        (np.r_[np.ones(m), -np.ones(m)], (np.r_[rows_m, rows_m], np.r_[nodes, s_cols])),
        shape=(m, n + m + e),
    )
    fit_minus = sp.csr_matrix(
        (np.r_[-np.ones(m), -np.ones(m)], (np.r_[rows_m, rows_m], np.r_[nodes, s_cols])),
        shape=(m, n + m + e),
    )
    # x_i - x_j - t_ij <= 0 and x_j - x_i - t_ij <= 0
    diff_plus = sp.csr_matrix(
        (
            np.r_[np.ones(e), -np.ones(e), -np.ones(e)],
            (np.r_[rows_e, rows_e, rows_e], np.r_[g.sources, g.targets, t_cols]),
        ),
        shape=(e, n + m + e),
    )
    diff_minus = sp.csr_matrix(
        (
            np.r_[-np.ones(e), np.ones(e), -np.ones(e)],
            (np.r_[rows_e, rows_e, rows_e], np.r_[g.sources, g.targets, t_cols]),
        ),
        shape=(e, n + m + e),
    )
    a_ub = sp.vstack([fit_plus, fit_minus, diff_plus, diff_minus]).tocsr()
    b_ub = np.r_[obs.y, -obs.y, np.zeros(2 * e)]
    cost = np.r_[np.zeros(n), np.ones(m), lam * g.weights]
    bounds = [(None, None)] * n + [(0.0, None)] * (m + e)
    tol = float(config.get("oracle.pivot_tol", 1e-10))

    result = linprog(
        cost,
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=bounds,
        method="highs",
        options={"primal_feasibility_tolerance": tol, "dual_feasibility_tolerance": tol},
    )
    # the objective is bounded below by zero and x = 0 is feasible
    assert result.status != 3, "network Lasso LP cannot be unbounded"
    if result.status != 0:
        raise SolverError(f"LP oracle failed: {result.message}")
    logger.debug(f"LP oracle optimum {result.fun:.10g} on {n} nodes")
    return OracleSolution(np.asarray(result.x[:n], dtype=np.float64), float(result.fun))


def theorem1_bound(K: float, L: float, obs: Observation) -> float:
    """
    Error bound (K + 4 / (L - 1)) sum_{i in M} |e[i]| on ||x_hat - x||_TV.

    Holds for any minimiser at lambda = 1/K when the sampling set resolves the
    partition of the clustered signal x with constants K and L.

    Raises:
        SolverError: If L <= 1 or K <= 0
    """
    if L <= 1:
        raise SolverError(f"Bound requires L > 1, got {L}")
    if K <= 0:
        raise SolverError(f"Bound requires K > 0, got {K}")
    return (K + 4.0 / (L - 1.0)) * obs.noise_l1()


def postprocess(
    g: DataGraph, obs: Observation, x_hat: GraphSignal, eta: float
) -> PostprocessResult:
    """
    Turn an nLasso estimate into a clustered signal.

    Edges whose estimate differs by at least eta/2 form the candidate boundary;
    clusters are the connected components left after removing it. Each cluster
    takes the mean of its observed samples.

    Args:
        g: Data graph
        obs: Observation
        x_hat: nLasso estimate
        eta: Minimum coefficient gap between adjacent clusters

    Returns:
        PostprocessResult; status is BOUNDARY_MISMATCH when a cut edge joins two
        nodes of one component and EMPTY_CLUSTER when a component has no sample
    """
    Validators.validate_positive(eta, "eta")
    x_hat = as_signal(g, x_hat)
    obs.check_graph(g)

    cut = np.flatnonzero(np.abs(x_hat[g.sources] - x_hat[g.targets]) >= eta / 2.0)
    count, labels = components_without(g, cut)

    inside = labels[g.sources[cut]] == labels[g.targets[cut]]
    if np.any(inside):
        k = int(cut[np.argmax(inside)])
        msg = f"cut edge {{{int(g.sources[k])}, {int(g.targets[k])}}} lies inside a component"
        logger.warning(f"Post-processing failed: {msg}")
        return PostprocessResult(PostprocessStatus.BOUNDARY_MISMATCH, cut_edges=cut, message=msg)

    sample_labels = labels[obs.sampled_nodes]
    counts = np.bincount(sample_labels, minlength=count)
    if np.any(counts == 0):
        empty = int(np.argmin(counts))
        msg = f"cluster {empty} has no sampled node"
        logger.warning(f"Post-processing failed: {msg}")
        return PostprocessResult(PostprocessStatus.EMPTY_CLUSTER, cut_edges=cut, message=msg)

    means = np.bincount(sample_labels, obs.y, count) / counts
    logger.info(f"Post-processing recovered {count} clusters from {cut.size} cut edges")
    return PostprocessResult(
        PostprocessStatus.OK,
        signal=means[labels],
        partition=Partition(labels),
        cut_edges=cut,
    )
