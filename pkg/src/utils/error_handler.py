"""
Error handling utilities for SMMD
"""

import math
from pathlib import Path
from typing import Any, Optional

import numpy as np


class SmmdError(Exception):
    """SMMD operation base exception"""
    pass


class ParameterError(SmmdError):
    """Parameter validation exception"""
    pass


class SampleError(SmmdError):
    """Sample shape, size or content exception"""
    pass


class NumericalError(SmmdError):
    """Numerically degenerate input (e.g. near-singular covariance)"""
    pass


class CacheError(SmmdError):
    """Null-distribution cache mismatch or corrupt cache file"""
    pass


class FileOperationError(SmmdError):
    """File operation exception"""
    pass


def validate_gamma(gamma: Optional[float]) -> float:
    """Validate kernel width"""
    if gamma is None:
        raise ParameterError("Kernel width gamma is required")

    if isinstance(gamma, bool) or not isinstance(gamma, (int, float, np.floating, np.integer)):
        raise ParameterError(f"Invalid kernel width: {gamma!r}. Must be a real number.")

    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma <= 0:
        raise ParameterError(f"Invalid kernel width: {gamma}. Must be positive and finite.")

    return gamma


def validate_alpha(alpha: Optional[float], name: str = "alpha") -> float:
    """Validate a level/probability strictly inside (0, 1)"""
    if alpha is None:
        raise ParameterError(f"{name} is required")

    try:
        alpha = float(alpha)
    except (TypeError, ValueError):
        raise ParameterError(f"Invalid {name}: {alpha!r}. Must be a real number in (0, 1).")

    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"Invalid {name}: {alpha}. Must lie strictly between 0 and 1.")

    return alpha


def validate_momentum(alpha: Optional[float]) -> float:
    """Validate EMA momentum"""
    return validate_alpha(alpha, name="momentum")


def validate_positive_int(value: Any, name: str, minimum: int = 1) -> int:
    """Validate an integer parameter with a lower bound"""
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ParameterError(f"Invalid {name}: {value!r}. Must be an integer.")

    if value < minimum:
        raise ParameterError(f"Invalid {name}: {value}. Must be at least {minimum}.")

    return int(value)


def validate_sample(data: Any, min_rows: int = 1, name: str = "sample") -> np.ndarray:
    """Validate an n x d sample and return it as a float64 matrix"""
    try:
        sample = np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise SampleError(f"{name} is not numeric: {e}")

    if sample.ndim == 1:
        sample = sample.reshape(-1, 1)

    if sample.ndim != 2 or sample.shape[1] < 1:
        raise SampleError(f"{name} must be an n x d matrix, got shape {sample.shape}")

    if sample.shape[0] < min_rows:
        raise SampleError(f"{name} needs at least {min_rows} rows, got {sample.shape[0]}")

    if not np.all(np.isfinite(sample)):
        bad_row, bad_col = np.argwhere(~np.isfinite(sample))[0]
        raise SampleError(f"{name} has a non-finite entry at row {bad_row}, column {bad_col}")

    return sample


def validate_file_path(file_path: Optional[str], must_exist: bool = True) -> str:
    """Validate file path"""
    if not file_path or not isinstance(file_path, (str, Path)):
        raise ParameterError("File path is required and must be a string")

    file_path = str(file_path).strip()
    if not file_path:
        raise ParameterError("File path cannot be empty")

    if must_exist and not Path(file_path).expanduser().is_file():
        raise FileOperationError(f"File not found: {file_path}")

    return file_path
