"""
File formats for netlasso.

JSON graphs, signals, observations and partitions with 1-based node ids on disk,
CSV exports, and atomic file writes (temp file + rename).
"""

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence, Union

import numpy as np

from src.core.graph_core import DataGraph, GraphError, GraphSignal, Observation, Partition
from src.utils.logger import get_logger

logger = get_logger("graph_io")

PathLike = Union[str, Path]


def atomic_write_text(path: PathLike, text: str) -> None:
    """
    Write ``text`` to ``path`` through a temporary file in the same directory.

    Args:
        path: Destination file
        text: File content
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.debug(f"Wrote {target}")


def write_json(path: PathLike, payload: Any) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=False) + "\n")


def read_json(path: PathLike) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise GraphError(f"Failed to read {path}: {e}") from e


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write rows with a header line atomically."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_value(v) for v in row])
    atomic_write_text(path, buffer.getvalue())


def _csv_value(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def graph_to_dict(g: DataGraph) -> Dict[str, Any]:
    return {
        "n": g.node_count,
        "edges": [[i + 1, j + 1, w] for i, j, w in g.edges],
    }


def graph_from_dict(payload: Dict[str, Any]) -> DataGraph:
    """
    Parse ``{"n": N, "edges": [[i, j, w], ...]}`` with 1-based ids.

    Raises:
        GraphError: On malformed content
    """
    try:
        n = int(payload["n"])
        edges = [(int(i) - 1, int(j) - 1, float(w)) for i, j, w in payload["edges"]]
    except (KeyError, TypeError, ValueError) as e:
        raise GraphError(f"Malformed graph document: {e}") from e
    return DataGraph.from_edges(n, edges)


def load_graph(path: PathLike) -> DataGraph:
    g = graph_from_dict(read_json(path))
    logger.info(f"Loaded graph with {g.node_count} nodes and {g.edge_count} edges from {path}")
    return g


def save_graph(g: DataGraph, path: PathLike) -> None:
    write_json(path, graph_to_dict(g))


def load_signal(path: PathLike) -> GraphSignal:
    payload = read_json(path)
    try:
        values = np.asarray(payload["values"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise GraphError(f"Malformed signal document: {e}") from e
    if not np.all(np.isfinite(values)):
        raise GraphError("Signal contains non-finite values")
    return values


def save_signal(x: GraphSignal, path: PathLike) -> None:
    write_json(path, {"values": [float(v) for v in np.asarray(x)]})


def observation_to_dict(obs: Observation) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "samples": [[int(i) + 1, float(y)] for i, y in zip(obs.sampled_nodes, obs.y)]
    }
    if obs.noise is not None:
        payload["noise"] = [[int(i) + 1, float(e)] for i, e in zip(obs.sampled_nodes, obs.noise)]
    return payload


def observation_from_dict(payload: Dict[str, Any]) -> Observation:
    """
    Parse ``{"samples": [[i, y_i], ...], "noise": [[i, e_i], ...]}`` with 1-based ids.

    Raises:
        GraphError: On malformed content or noise keyed on other nodes
    """
    try:
        samples = [(int(i) - 1, float(y)) for i, y in payload["samples"]]
        noise_pairs = payload.get("noise")
        noise_map = (
            {int(i) - 1: float(e) for i, e in noise_pairs} if noise_pairs is not None else None
        )
    except (KeyError, TypeError, ValueError) as e:
        raise GraphError(f"Malformed observation document: {e}") from e

    nodes = [i for i, _ in samples]
    y = [v for _, v in samples]
    noise = None
    if noise_map is not None:
        if set(noise_map) != set(nodes):
            raise GraphError("Noise entries must cover exactly the sampled nodes")
        noise = [noise_map[i] for i in nodes]
    return Observation(np.asarray(nodes, dtype=np.int64), np.asarray(y), noise)


def load_observation(path: PathLike) -> Observation:
    obs = observation_from_dict(read_json(path))
    logger.info(f"Loaded {obs.size} samples from {path}")
    return obs


def save_observation(obs: Observation, path: PathLike) -> None:
    write_json(path, observation_to_dict(obs))


def load_partition(path: PathLike) -> Partition:
    payload = read_json(path)
    try:
        labels = np.asarray(payload["cluster_of"], dtype=np.int64) - 1
    except (KeyError, TypeError, ValueError) as e:
        raise GraphError(f"Malformed partition document: {e}") from e
    return Partition(labels)


def save_partition(p: Partition, path: PathLike) -> None:
    write_json(path, {"cluster_of": [int(c) + 1 for c in p.cluster_of]})


def load_sampling_set(path: PathLike) -> np.ndarray:
    """
    Read a sampling set, either ``{"nodes": [...]}`` or an observation document.

    Returns:
        0-based node ids
    """
    payload = read_json(path)
    if isinstance(payload, dict) and "nodes" in payload:
        return np.asarray(payload["nodes"], dtype=np.int64) - 1
    if isinstance(payload, dict) and "samples" in payload:
        return observation_from_dict(payload).sampled_nodes.copy()
    if isinstance(payload, list):
        return np.asarray(payload, dtype=np.int64) - 1
    raise GraphError(f"Unrecognised sampling set document in {path}")


def export_signal_csv(x: GraphSignal, path: PathLike) -> None:
    """Write a ``node,value`` CSV with 1-based node ids."""
    write_csv(path, ["node", "value"], ((i + 1, float(v)) for i, v in enumerate(np.asarray(x))))

