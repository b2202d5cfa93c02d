"""Core modules for netlasso."""

__all__ = [
    "graph_core",
    "graph_io",
    "spectral",
    "certify",
    "solve",
    "generators",
    "sampling",
    "experiment",
]
