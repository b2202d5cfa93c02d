"""
Experiment driver for netlasso.

Runs generate -> sample -> observe -> certify -> solve pipelines on synthetic
chain and planted-partition graphs, records NMSE traces for network Lasso and
label propagation on boundary-guided and uniform sampling sets, and writes the
result files.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.certify import BoundaryTooLargeError, k_floor, lemma1_constants, min_feasible_K
from src.core.generators import (
    INTER_DEFAULT,
    INTRA_DEFAULT,
    WeightLaw,
    chain_signal,
    generate_chain,
    generate_planted_partition,
    planted_signal,
)
from src.core.graph_core import (
    DataGraph,
    GraphSignal,
    Observation,
    Partition,
    boundary_edges,
    make_observation,
    nmse,
)
from src.core.graph_io import write_csv, write_json
from src.core.sampling import SamplingResult, sample_boundary_guided, sample_uniform
from src.core.solve import SolverConfig, nlasso_admm, postprocess
from src.core.spectral import label_propagation
from src.utils.config import get_config
from src.utils.logger import get_logger, get_run_logger
from src.utils.validators import ValidationError, Validators

logger = get_logger("experiment")
run_logger = get_run_logger()
config = get_config()

FAMILIES = ("chain", "planted_partition")
SAMPLERS = ("boundary_guided", "uniform")
PRESETS = ("chain-noisy", "chain-noiseless", "lfr-like")


class ExperimentError(Exception):
    """Custom exception for experiment failures, labelled with the failing stage."""

    pass


@contextmanager
def _stage(name: str) -> Iterator[None]:
    try:
        yield
    except ExperimentError:
        raise
    except Exception as e:
        raise ExperimentError(f"{name}: {e}") from e


@dataclass(frozen=True)
class ExperimentSpec:
    """
    Full description of one seeded experiment.

    ``sample_budget`` defaults to 2N/10 for chains and N/10 for planted partitions;
    ``lam`` defaults to 1/K with K certified for the boundary-guided set.
    """

    name: str = "custom"
    family: str = "chain"
    n_nodes: int = 10000
    cluster_size: int = 10
    community_count: Optional[int] = None
    size_exponent: float = 2.0
    degree_exponent: float = 2.5
    avg_degree: float = 18.9
    mixing: float = 0.1
    intra_law: WeightLaw = INTRA_DEFAULT
    inter_law: WeightLaw = INTER_DEFAULT
    noise_sigma: float = 0.5
    sample_budget: Optional[int] = None
    sampler_mode: str = "lemma1"
    L: float = 2.0
    rho: float = 0.01
    iterations: int = 300
    lam: Optional[float] = None
    label_propagation: bool = False
    postprocess_eta: Optional[float] = None
    seed: int = 0
    signal_head: int = 100

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ExperimentError(f"Unknown family '{self.family}', expected one of {FAMILIES}")
        try:
            Validators.validate_count(self.n_nodes, "n_nodes", min_value=2)
            Validators.validate_nonnegative(self.noise_sigma, "noise_sigma")
            Validators.validate_positive(self.L, "L")
            Validators.validate_positive(self.rho, "rho")
            Validators.validate_count(self.iterations, "iterations", min_value=1)
            Validators.validate_count(self.seed, "seed", min_value=0)
            if self.lam is not None:
                Validators.validate_positive(self.lam, "lam")
            if self.postprocess_eta is not None:
                Validators.validate_positive(self.postprocess_eta, "postprocess_eta")
        except ValidationError as e:
            raise ExperimentError(f"spec: {e}") from e
        if self.budget > self.n_nodes:
            raise ExperimentError(
                f"spec: sample budget {self.budget} exceeds {self.n_nodes} nodes"
            )

    @property
    def budget(self) -> int:
        if self.sample_budget is not None:
            return int(self.sample_budget)
        if self.family == "chain":
            return 2 * self.n_nodes // 10
        return self.n_nodes // 10

    @property
    def communities(self) -> int:
        if self.community_count is not None:
            return int(self.community_count)
        return max(2, int(round(1399 * self.n_nodes / 1e5)))

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            payload[f.name] = value.to_dict() if isinstance(value, WeightLaw) else value
        return payload

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(payload) - known
        if unknown:
            raise ExperimentError(f"spec: unknown fields {sorted(unknown)}")
        data = dict(payload)
        for key in ("intra_law", "inter_law"):
            if isinstance(data.get(key), dict):
                data[key] = WeightLaw.from_dict(data[key])
        return cls(**data)


@dataclass
class ExperimentResult:
    """NMSE traces per method and sampler, final values and certificate constants."""

    spec: ExperimentSpec
    K: Optional[float]
    L: float
    lam: float
    lambda_source: str
    nmse_traces: Dict[str, Dict[str, List[float]]]
    final_nmse: Dict[str, Dict[str, float]]
    sample_sizes: Dict[str, int]
    partial_coverage: bool
    postprocess: Optional[Dict[str, Any]] = None
    x_true: GraphSignal = field(default_factory=lambda: np.empty(0), repr=False)
    estimates: Dict[str, GraphSignal] = field(default_factory=dict, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "seed": self.spec.seed,
            "K": self.K,
            "L": self.L,
            "lambda": self.lam,
            "lambda_source": self.lambda_source,
            "sample_sizes": self.sample_sizes,
            "partial_coverage": self.partial_coverage,
            "final_nmse": self.final_nmse,
            "postprocess": self.postprocess,
            "nmse_traces": self.nmse_traces,
        }


def preset_spec(name: str, full_scale: bool = False, seed: int = 0) -> ExperimentSpec:
    """
    Named experiment setups.

    Args:
        name: ``chain-noisy``, ``chain-noiseless`` or ``lfr-like``
        full_scale: Use the large node count from ``bench.full_scale_nodes``
        seed: Experiment seed

    Raises:
        ExperimentError: On an unknown preset name
    """
    full_n = int(config.get("bench.full_scale_nodes", 100000))
    if name in ("chain-noisy", "chain-noiseless"):
        n = full_n if full_scale else int(config.get("bench.chain_nodes", 10000))
        return ExperimentSpec(
            name=name,
            family="chain",
            n_nodes=n,
            cluster_size=10,
            noise_sigma=0.5 if name == "chain-noisy" else 0.0,
            sampler_mode="lemma1",
            rho=float(config.get("solver.rho", 0.01)),
            iterations=int(config.get("solver.max_iterations", 300)),
            seed=seed,
        )
    if name == "lfr-like":
        n = full_n if full_scale else int(config.get("bench.planted_nodes", 20000))
        return ExperimentSpec(
            name=name,
            family="planted_partition",
            n_nodes=n,
            noise_sigma=0.5,
            sampler_mode="edge_sorted",
            rho=float(config.get("solver.rho", 0.01)),
            iterations=int(config.get("solver.max_iterations", 300)),
            label_propagation=True,
            seed=seed,
        )
    raise ExperimentError(f"Unknown preset '{name}', expected one of {PRESETS}")


def _seeds(seed: int) -> Dict[str, int]:
    names = ("graph", "signal", "guided", "uniform", "noise_guided", "noise_uniform")
    states = np.random.SeedSequence(seed).generate_state(len(names))
    return {name: int(s) for name, s in zip(names, states)}


def _generate(
    spec: ExperimentSpec, seeds: Dict[str, int]
) -> Tuple[DataGraph, Partition, GraphSignal]:
    if spec.family == "chain":
        g, p = generate_chain(
            spec.n_nodes, spec.cluster_size, spec.intra_law, spec.inter_law, seeds["graph"]
        )
        return g, p, chain_signal(p)
    g, p = generate_planted_partition(
        spec.n_nodes,
        spec.communities,
        size_exponent=spec.size_exponent,
        degree_exponent=spec.degree_exponent,
        avg_degree=spec.avg_degree,
        mixing=spec.mixing,
        intra=spec.intra_law,
        inter=spec.inter_law,
        seed=seeds["graph"],
    )
    return g, p, planted_signal(p, seed=seeds["signal"])


def _choose_lambda(
    spec: ExperimentSpec, g: DataGraph, p: Partition, guided: SamplingResult
) -> Tuple[Optional[float], float, str]:
    """
    Regularisation 1/K, preferring the exact minimal K, then the sampled-neighbour
    condition, then L times the largest boundary degree or weight.
    """
    if spec.lam is not None:
        return None, spec.lam, "explicit"

    K: Optional[float] = None
    source = ""
    try:
        K = min_feasible_K(g, p, guided.nodes, spec.L)
        source = "min_feasible_K"
    except BoundaryTooLargeError as e:
        logger.info(f"Exact certification skipped: {e}")
    if K is None or not math.isfinite(K) or K <= 0:
        lemma = lemma1_constants(g, p, guided.nodes, spec.L)
        if lemma.applicable and lemma.K:
            K, source = lemma.K, "lemma1"
    if K is None or not math.isfinite(K) or K <= 0:
        boundary = boundary_edges(g, p)
        ends = np.concatenate([g.sources[boundary], g.targets[boundary]])
        degree = float(np.bincount(ends).max()) if ends.size else 0.0
        K = max(k_floor(g, p, spec.L), spec.L * degree)
        source = "boundary_degree"
    if K <= 0:
        return None, 1.0, "unit"
    return K, 1.0 / K, source


def _trace(x_true: GraphSignal, sink: List[float]) -> Callable[[int, GraphSignal], None]:
    def record(_: int, x: GraphSignal) -> None:
        sink.append(nmse(x, x_true))

    return record


def run_experiment(
    spec: ExperimentSpec, out_dir: Optional[Union[str, Path]] = None
) -> ExperimentResult:
    """
    Run one experiment end to end.

    Both the boundary-guided and the uniform sampling set get the same budget and
    independent noise draws; nLasso (and label propagation when enabled) runs for
    ``spec.iterations`` iterations on each.

    Args:
        spec: Experiment description
        out_dir: Directory for result.json, nmse_trace.csv and signal_head.csv

    Returns:
        ExperimentResult

    Raises:
        ExperimentError: Labelled with the stage that failed
    """
    seeds = _seeds(spec.seed)
    logger.info(f"Experiment '{spec.name}' ({spec.family}, N={spec.n_nodes}, seed={spec.seed})")

    with _stage("generate"):
        g, p, x_true = _generate(spec, seeds)

    with _stage("sample"):
        guided = sample_boundary_guided(
            g, p, spec.budget, spec.sampler_mode, seed=seeds["guided"], L=spec.L
        )
        uniform = sample_uniform(g, spec.budget, seed=seeds["uniform"])

    with _stage("observe"):
        observations: Dict[str, Observation] = {
            "boundary_guided": make_observation(
                x_true, guided.nodes, spec.noise_sigma, seeds["noise_guided"]
            ),
            "uniform": make_observation(
                x_true, uniform.nodes, spec.noise_sigma, seeds["noise_uniform"]
            ),
        }

    with _stage("certify"):
        K, lam, source = _choose_lambda(spec, g, p, guided)
    logger.info(f"Using lambda={lam:.6g} ({source})")

    traces: Dict[str, Dict[str, List[float]]] = {"nlasso": {}}
    estimates: Dict[str, GraphSignal] = {}
    with _stage("solve"):
        cfg = SolverConfig(lam=lam, rho=spec.rho, max_iterations=spec.iterations, seed=spec.seed)
        for sampler in SAMPLERS:
            sink: List[float] = []
            report = nlasso_admm(g, observations[sampler], cfg, callback=_trace(x_true, sink))
            traces["nlasso"][sampler] = sink
            estimates[f"nlasso/{sampler}"] = report.estimate

    if spec.label_propagation:
        traces["label_propagation"] = {}
        with _stage("label_propagation"):
            for sampler in SAMPLERS:
                sink = []
                x_lp = label_propagation(
                    g, observations[sampler], spec.iterations, callback=_trace(x_true, sink)
                )
                traces["label_propagation"][sampler] = sink
                estimates[f"label_propagation/{sampler}"] = x_lp

    post: Optional[Dict[str, Any]] = None
    if spec.postprocess_eta is not None:
        with _stage("postprocess"):
            outcome = postprocess(
                g,
                observations["boundary_guided"],
                estimates["nlasso/boundary_guided"],
                spec.postprocess_eta,
            )
            post = {"status": outcome.status.value, "message": outcome.message}
            if outcome.ok and outcome.signal is not None:
                post["nmse"] = nmse(outcome.signal, x_true)
                estimates["postprocess/boundary_guided"] = outcome.signal

    result = ExperimentResult(
        spec=spec,
        K=K,
        L=spec.L,
        lam=lam,
        lambda_source=source,
        nmse_traces=traces,
        final_nmse={m: {s: t[-1] for s, t in per.items()} for m, per in traces.items()},
        sample_sizes={"boundary_guided": guided.size, "uniform": uniform.size},
        partial_coverage=guided.partial_coverage,
        postprocess=post,
        x_true=x_true,
        estimates=estimates,
    )

    if out_dir is not None:
        with _stage("write"):
            write_results(result, out_dir)
    run_logger.info(
        f"EXPERIMENT name={spec.name} seed={spec.seed} N={spec.n_nodes} "
        f"nmse_guided={result.final_nmse['nlasso']['boundary_guided']:.4g} "
        f"nmse_uniform={result.final_nmse['nlasso']['uniform']:.4g} out={out_dir or '-'}"
    )
    return result


def write_results(result: ExperimentResult, out_dir: Union[str, Path]) -> None:
    """Write result.json, nmse_trace.csv and signal_head.csv atomically into ``out_dir``."""
    Validators.validate_path(str(out_dir))
    target = Path(out_dir)
    write_json(target / "result.json", result.to_dict())

    rows = [
        (iteration, method, sampler, value)
        for method, per in result.nmse_traces.items()
        for sampler, trace in per.items()
        for iteration, value in enumerate(trace, start=1)
    ]
    write_csv(target / "nmse_trace.csv", ["iteration", "method", "sampler", "nmse"], rows)

    head = min(result.spec.signal_head, result.x_true.size)
    m1 = result.estimates["nlasso/boundary_guided"]
    m2 = result.estimates["nlasso/uniform"]
    write_csv(
        target / "signal_head.csv",
        ["node", "true", "recovered_m1", "recovered_m2"],
        ((i + 1, result.x_true[i], m1[i], m2[i]) for i in range(head)),
    )
    logger.info(f"Results written to {target}")


def run_batch(
    specs: Sequence[ExperimentSpec],
    out_root: Optional[Union[str, Path]] = None,
    workers: Optional[int] = None,
) -> List[ExperimentResult]:
    """
    Run independent experiments in a thread pool.

    Each spec writes to ``out_root/<name>-seed<seed>`` when ``out_root`` is given.
    Results come back in input order.
    """
    workers = workers or config.worker_count()
    Validators.validate_count(workers, "workers", min_value=1)

    def one(spec: ExperimentSpec) -> ExperimentResult:
        run_name = Validators.sanitize_filename(f"{spec.name}-seed{spec.seed}")
        out = None if out_root is None else Path(out_root) / run_name
        return run_experiment(spec, out)

    logger.info(f"Running {len(specs)} experiments on {workers} worker(s)")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(one, specs))
