"""
Main entry point for netlasso.

Command-line interface over the spectral, certification, solver and experiment
modules. Exit codes: 0 success, 1 failure, 2 sampling set does not resolve.
"""

import argparse
import json
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence

# Add src to path if running from repository root
if __name__ == "__main__":
    root_dir = Path(__file__).parent.parent
    if str(root_dir) not in sys.path:
        sys.path.insert(0, str(root_dir))

import numpy as np

from src.core import certify, experiment, generators, graph_io, sampling, solve, spectral
from src.core.graph_core import GraphError, Observation, make_observation
from src.utils.config import get_config
from src.utils.logger import configure_logging, get_logger
from src.utils.validators import ValidationError

logger = get_logger("main")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NOT_RESOLVED = 2


def setup_logging(level: Optional[str]) -> None:
    """Set up application logging from the config, with an optional CLI level override."""
    config = get_config()
    configure_logging(
        level=level or config.get("logging.level", "INFO"),
        log_dir=config.get("logging.dir", "logs"),
        file_logging=bool(config.get("logging.file_logging", False)),
        console_output=bool(config.get("logging.console_output", True)),
    )
    logger.debug("Logging initialized")


def _emit(payload: object, out: Optional[str]) -> None:
    if out:
        graph_io.write_json(out, payload)
        logger.info(f"Wrote {out}")
    else:
        print(json.dumps(payload, indent=2))


def _parse_indices(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from e


def cmd_spectral(args: argparse.Namespace) -> int:
    g = graph_io.load_graph(args.graph)

    if args.propagate:
        obs = graph_io.load_observation(args.propagate)
        x = spectral.label_propagation(g, obs, args.iters)
        _write_signal(x, args.out_signal)
        return EXIT_OK

    basis = spectral.gft_basis(g)
    if args.band:
        x = spectral.band_limited_signal(basis, args.band)
        _write_signal(x, args.out_signal)
        if not args.signal:
            return EXIT_OK
    if args.signal:
        x = graph_io.load_signal(args.signal)
        rows = spectral.spectrum_table(basis, x)
    else:
        rows = [(l + 1, float(v), float("nan")) for l, v in enumerate(basis.eigenvalues)]
    if args.out:
        graph_io.write_csv(args.out, ["l", "eigenvalue", "coefficient"], rows)
        logger.info(f"Wrote spectrum table to {args.out}")
    else:
        print("l,eigenvalue,coefficient")
        for l, value, coeff in rows:
            print(f"{l},{value!r},{coeff!r}")
    return EXIT_OK


def _write_signal(x: np.ndarray, out: Optional[str]) -> None:
    if out and out.endswith(".csv"):
        graph_io.export_signal_csv(x, out)
        logger.info(f"Wrote signal to {out}")
    elif out:
        graph_io.save_signal(x, out)
        logger.info(f"Wrote signal to {out}")
    else:
        print(json.dumps({"values": [float(v) for v in x]}))


def cmd_certify(args: argparse.Namespace) -> int:
    g = graph_io.load_graph(args.graph)
    p = graph_io.load_partition(args.partition)
    m = graph_io.load_sampling_set(args.samples)

    if args.lemma1:
        lemma = certify.lemma1_constants(g, p, m, args.L)
        payload = {
            "applicable": lemma.applicable,
            "K": lemma.K,
            "L": lemma.L,
            "failing_edge": None
            if lemma.failing_edge is None
            else [v + 1 for v in lemma.failing_edge],
            "reason": lemma.reason,
        }
        _emit(payload, args.out)
        return EXIT_OK if lemma.applicable else EXIT_NOT_RESOLVED

    if args.find_k:
        K = certify.min_feasible_K(g, p, m, args.L)
        if not math.isfinite(K):
            _emit({"verdict": certify.Verdict.NOT_RESOLVED.value, "K": None, "L": args.L}, args.out)
            return EXIT_NOT_RESOLVED
        if K == 0.0:
            _emit({"verdict": certify.Verdict.RESOLVED.value, "K": 0.0, "L": args.L}, args.out)
            return EXIT_OK
    elif args.K is None:
        raise ValidationError("certify needs --K or --find-k")
    else:
        K = args.K

    workers = args.workers or get_config().worker_count()
    cert = certify.resolves(g, p, m, K, args.L, workers=workers)
    _emit(certify.certificate_to_dict(cert), args.out)
    return EXIT_OK if cert.resolved else EXIT_NOT_RESOLVED


def cmd_solve(args: argparse.Namespace) -> int:
    g = graph_io.load_graph(args.graph)
    obs = graph_io.load_observation(args.observation)
    if args.lam is not None:
        lam = args.lam
    elif args.K is not None:
        lam = solve.default_lambda(args.K)
    else:
        raise ValidationError("solve needs --lambda or --K")

    if args.oracle:
        solution = solve.lp_oracle(g, obs, lam)
        _write_signal(solution.estimate, args.out)
        logger.info(f"LP optimum {solution.value:.10g}")
        return EXIT_OK

    cfg = solve.SolverConfig.from_config(
        lam,
        rho=args.rho,
        max_iterations=args.iters,
        primal_tol=args.tol,
        dual_tol=args.tol,
        stop_on_tolerance=True if args.tol is not None else None,
    )
    report = solve.nlasso_admm(g, obs, cfg)
    _write_signal(report.estimate, args.out)
    if args.trace:
        graph_io.write_csv(
            args.trace,
            ["iteration", "objective"],
            ((i + 1, v) for i, v in enumerate(report.objective_trace)),
        )
    logger.info(
        f"Solved in {report.iterations_run} iterations, objective "
        f"{report.objective_trace[-1]:.6g}, converged={report.converged}"
    )
    return EXIT_OK


def cmd_postprocess(args: argparse.Namespace) -> int:
    g = graph_io.load_graph(args.graph)
    obs: Observation = graph_io.load_observation(args.observation)
    x_hat = graph_io.load_signal(args.estimate)
    outcome = solve.postprocess(g, obs, x_hat, args.eta)
    if not outcome.ok or outcome.signal is None or outcome.partition is None:
        logger.error(f"Post-processing returned {outcome.status.value}: {outcome.message}")
        return EXIT_FAILURE
    _write_signal(outcome.signal, args.out)
    if args.partition_out:
        graph_io.save_partition(outcome.partition, args.partition_out)
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    if args.spec:
        base = experiment.ExperimentSpec.from_dict(graph_io.read_json(args.spec))
    else:
        base = experiment.preset_spec(args.preset, full_scale=args.full_scale, seed=args.seed)

    if args.seeds > 1:
        specs = [
            experiment.ExperimentSpec.from_dict({**base.to_dict(), "seed": base.seed + k})
            for k in range(args.seeds)
        ]
        results = experiment.run_batch(specs, args.out, workers=args.workers)
    else:
        results = [experiment.run_experiment(base, args.out)]

    for result in results:
        finals = ", ".join(
            f"{method}/{sampler}={value:.4g}"
            for method, per in result.final_nmse.items()
            for sampler, value in per.items()
        )
        print(f"{result.spec.name} seed={result.spec.seed}: {finals}")
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    if args.family == "chain":
        g, p = generators.generate_chain(args.n, args.cluster_size, seed=args.seed)
        x = generators.chain_signal(p)
    else:
        communities = args.communities or max(2, int(round(1399 * args.n / 1e5)))
        g, p = generators.generate_planted_partition(
            args.n, communities, mixing=args.mixing, seed=args.seed
        )
        x = generators.planted_signal(p, seed=args.seed)
    graph_io.save_graph(g, out / "graph.json")
    graph_io.save_partition(p, out / "partition.json")
    graph_io.save_signal(x, out / "signal.json")
    if args.samples:
        picked = sampling.sample_boundary_guided(g, p, args.samples, seed=args.seed)
        obs = make_observation(x, picked.nodes, args.noise, seed=args.seed)
        graph_io.save_observation(obs, out / "observation.json")
    logger.info(f"Generated {args.family} graph with {g.node_count} nodes into {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subcommand per module."""
    parser = argparse.ArgumentParser(
        prog="netlasso",
        description=get_config().get(
            "app.description", "Network Lasso recovery of clustered graph signals"
        ),
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {get_config().get('app.version', 'unknown')}",
    )
    parser.add_argument("--log-level", help="Override logging.level")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectral", help="GFT spectrum, band-limited signals, label propagation")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--signal", help="Signal JSON whose GFT coefficients are tabulated")
    sp.add_argument("--band", type=_parse_indices, help="1-based active frequencies, e.g. 1,2")
    sp.add_argument("--propagate", metavar="OBSERVATION", help="Run label propagation")
    sp.add_argument("--iters", type=int, default=300)
    sp.add_argument("--out", help="CSV path for the l,eigenvalue,coefficient table")
    sp.add_argument("--out-signal", help="JSON path for generated or propagated signals")
    sp.set_defaults(func=cmd_spectral)

    cp = sub.add_parser("certify", help="Check whether a sampling set resolves a partition")
    cp.add_argument("--graph", required=True)
    cp.add_argument("--partition", required=True)
    cp.add_argument("--samples", required=True, help="Sampling set or observation JSON")
    cp.add_argument("--K", type=float)
    cp.add_argument("--L", type=float, required=True)
    cp.add_argument("--find-k", action="store_true", help="Search the smallest resolving K")
    cp.add_argument("--lemma1", action="store_true", help="Only test the sampled-neighbour rule")
    cp.add_argument("--workers", type=int)
    cp.add_argument("--out")
    cp.set_defaults(func=cmd_certify)

    so = sub.add_parser("solve", help="Solve the network Lasso")
    so.add_argument("--graph", required=True)
    so.add_argument("--observation", required=True)
    so.add_argument("--lambda", dest="lam", type=float)
    so.add_argument("--K", type=float, help="Use lambda = 1/K")
    so.add_argument("--rho", type=float)
    so.add_argument("--iters", type=int)
    so.add_argument("--tol", type=float, help="Stop once both residuals fall below this value")
    so.add_argument("--oracle", action="store_true", help="Solve the exact LP (small graphs)")
    so.add_argument("--out", required=True)
    so.add_argument("--trace", help="CSV path for iteration,objective")
    so.set_defaults(func=cmd_solve)

    pp = sub.add_parser("postprocess", help="Cluster-mean post-processing of an estimate")
    pp.add_argument("--graph", required=True)
    pp.add_argument("--observation", required=True)
    pp.add_argument("--estimate", required=True)
    pp.add_argument("--eta", type=float, required=True)
    pp.add_argument("--out", required=True)
    pp.add_argument("--partition-out")
    pp.set_defaults(func=cmd_postprocess)

    ep = sub.add_parser("experiment", help="Run a synthetic recovery experiment")
    source = ep.add_mutually_exclusive_group(required=True)
    source.add_argument("--spec", help="ExperimentSpec JSON")
    source.add_argument("--preset", choices=experiment.PRESETS)
    ep.add_argument("--full-scale", action="store_true")
    ep.add_argument("--seed", type=int, default=0)
    ep.add_argument("--seeds", type=int, default=1, help="Run this many consecutive seeds")
    ep.add_argument("--workers", type=int)
    ep.add_argument("--out")
    ep.set_defaults(func=cmd_experiment)

    gp = sub.add_parser("generate", help="Write a synthetic graph, partition and signal")
    gp.add_argument("family", choices=["chain", "planted"])
    gp.add_argument("--n", type=int, required=True)
    gp.add_argument("--cluster-size", type=int, default=10)
    gp.add_argument("--communities", type=int)
    gp.add_argument("--mixing", type=float, default=0.1)
    gp.add_argument("--seed", type=int, default=0)
    gp.add_argument("--samples", type=int, help="Also write a boundary-guided observation")
    gp.add_argument("--noise", type=float, default=0.0, help="Noise sigma for --samples")
    gp.add_argument("--out", required=True)
    gp.set_defaults(func=cmd_generate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point for the command line.

    Returns:
        Exit code
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        setup_logging(args.log_level)
        return int(args.func(args))

    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_FAILURE

    except (
        certify.CertifyError,
        experiment.ExperimentError,
        GraphError,
        generators.GeneratorError,
        sampling.SamplingError,
        solve.SolverError,
        spectral.SpectralError,
        ValidationError,
    ) as e:
        logger.error(str(e))
        return EXIT_FAILURE

    except Exception as e:
        logger.critical(f"Fatal error: {e}", exc_info=True)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
