"""
Input validation utilities for netlasso.

Provides validation functions for numeric parameters, node ids, signal arrays
and file paths handed in by library callers and the command line.
"""

import math
import os
import re
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from src.utils.logger import get_logger

logger = get_logger("validators")


class ValidationError(Exception):
    """Custom exception for validation errors."""

    pass


class Validators:
    """Collection of validation utilities."""

    @staticmethod
    def validate_positive(value: float, name: str = "value") -> bool:
        """
        Validate a strictly positive finite real.

        Args:
            value: Value to validate
            name: Parameter name used in the error message

        Returns:
            True if valid

        Raises:
            ValidationError: If validation fails
        """
        if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
            raise ValidationError(f"{name} must be a real number, got {type(value).__name__}")
        if not math.isfinite(float(value)) or value <= 0:
            raise ValidationError(f"{name} must be a positive finite number, got {value}")
        return True

    @staticmethod
    def validate_nonnegative(value: float, name: str = "value") -> bool:
        """
        Validate a nonnegative finite real.

        Raises:
            ValidationError: If validation fails
        """
        if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
            raise ValidationError(f"{name} must be a real number, got {type(value).__name__}")
        if not math.isfinite(float(value)) or value < 0:
            raise ValidationError(f"{name} must be nonnegative and finite, got {value}")
        return True

    @staticmethod
    def validate_open_unit(value: float, name: str = "value") -> bool:
        """
        Validate a real in the open interval (0, 1).

        Raises:
            ValidationError: If validation fails
        """
        if not 0.0 < float(value) < 1.0:
            raise ValidationError(f"{name} must lie strictly between 0 and 1, got {value}")
        return True

    @staticmethod
    def validate_count(value: int, name: str = "count", min_value: int = 0) -> bool:
        """
        Validate an integer count with a lower bound.

        Args:
            value: Count to validate
            name: Parameter name used in the error message
            min_value: Smallest allowed value

        Returns:
            True if valid

        Raises:
            ValidationError: If validation fails
        """
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise ValidationError(f"{name} must be an integer, got {type(value).__name__}")
        if value < min_value:
            raise ValidationError(f"{name} must be at least {min_value}, got {value}")
        return True

    @staticmethod
    def validate_node_ids(nodes: Iterable[int], node_count: int, distinct: bool = True) -> bool:
        """
        Validate 0-based node ids against a node count.

        Args:
            nodes: Node ids to check
            node_count: Number of nodes of the graph
            distinct: Whether duplicates are rejected

        Returns:
            True if valid

        Raises:
            ValidationError: If an id is out of range or repeated
        """
        seen = set()
        for node in nodes:
            node = int(node)
            if node < 0 or node >= node_count:
                raise ValidationError(f"Node id {node} out of range [0, {node_count})")
            if distinct and node in seen:
                raise ValidationError(f"Duplicate node id {node}")
            seen.add(node)
        return True

    @staticmethod
    def validate_finite_array(
        values: np.ndarray, name: str = "array", length: Optional[int] = None
    ) -> bool:
        """
        Validate a one-dimensional array of finite reals.

        Args:
            values: Array to check
            name: Parameter name used in the error message
            length: Required length, if any

        Returns:
            True if valid

        Raises:
            ValidationError: If shape or values are invalid
        """
        arr = np.asarray(values)
        if arr.ndim != 1:
            raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
        if length is not None and arr.shape[0] != length:
            raise ValidationError(f"{name} has length {arr.shape[0]}, expected {length}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"{name} contains non-finite values")
        return True

    @staticmethod
    def validate_path(path: str, must_exist: bool = False, must_be_dir: bool = False) -> bool:
        """
        Validate a file system path.

        Args:
            path: Path to validate
            must_exist: Whether path must exist
            must_be_dir: Whether path must be a directory

        Returns:
            True if valid

        Raises:
            ValidationError: If validation fails
        """
        if not path:
            raise ValidationError("Path cannot be empty")

        path_obj = Path(path)
        if must_exist and not path_obj.exists():
            raise ValidationError(f"Path does not exist: {path}")
        if must_be_dir and path_obj.exists() and not path_obj.is_dir():
            raise ValidationError(f"Path is not a directory: {path}")

        logger.debug(f"Path validated: {path}")
        return True

    @staticmethod
    def sanitize_filename(filename: str, replacement: str = "_") -> str:
        """
        Sanitize a filename by removing/replacing unsafe characters.

        Args:
            filename: Original filename
            replacement: Character to replace unsafe chars with

        Returns:
            Sanitized filename
        """
        sanitized = re.sub(r'[<>:"/\\|?*\x00-\x1f\s]', replacement, filename)
        sanitized = sanitized.strip(". ")
        if not sanitized:
            sanitized = "unnamed"
        if len(sanitized) > 255:
            name, ext = os.path.splitext(sanitized)
            sanitized = name[: 255 - len(ext)] + ext
        return sanitized
