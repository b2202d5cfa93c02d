"""Utility modules for netlasso."""

__all__ = ["logger", "config", "validators"]
