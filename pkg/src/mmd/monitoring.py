"""
B- and E-statistic convergence monitors over per-batch SMMD values
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.signal import lfilter

from ..utils.error_handler import ParameterError, validate_momentum, validate_positive_int

# B statistic is meaningful from roughly 30-50 batches on
MIN_BATCHES = 30


class ConvergenceFlag(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    INSUFFICIENT_DATA = "insufficient_data"


@dataclass(frozen=True)
class BMonitor:
    """Running average of SMMD values"""

    m: int = 0
    total: float = 0.0

    @property
    def statistic(self) -> float:
        if self.m < 1:
            raise ParameterError("B statistic needs at least one batch")
        return self.total / self.m

    def interval(self) -> Tuple[float, float]:
        return b_interval(self.m)


@dataclass(frozen=True)
class EMonitor:
    """Exponential moving average E_b = alpha E_{b-1} + (1 - alpha) S_b, E_0 = 0"""

    alpha: float
    value: float = 0.0
    steps: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", validate_momentum(self.alpha))

    @property
    def m(self) -> int:
        return self.steps

    @property
    def statistic(self) -> float:
        return self.value

    def interval(self) -> Tuple[float, float]:
        return e_interval(self.alpha)


Monitor = Union[BMonitor, EMonitor]


def _finite(value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"SMMD value must be finite, got {value!r}")
    return value


def b_update(monitor: BMonitor, smmd_value: float) -> BMonitor:
    return BMonitor(m=monitor.m + 1, total=monitor.total + _finite(smmd_value))


def e_update(monitor: EMonitor, smmd_value: float) -> EMonitor:
    value = monitor.alpha * monitor.value + (1.0 - monitor.alpha) * _finite(smmd_value)
    return replace(monitor, value=value, steps=monitor.steps + 1)


def b_interval(m: int) -> Tuple[float, float]:
    """Three-sigma band (-3/sqrt(m), 3/sqrt(m))"""
    m = validate_positive_int(m, "m")
    half = 3.0 / math.sqrt(m)
    return -half, half


def e_interval(alpha: float) -> Tuple[float, float]:
    """Three-sigma band from the limiting variance bound (1 - alpha) / (1 + alpha)"""
    alpha = validate_momentum(alpha)
    half = 3.0 * math.sqrt((1.0 - alpha) / (1.0 + alpha))
    return -half, half


def flag(monitor: Monitor, min_batches: int = MIN_BATCHES) -> ConvergenceFlag:
    """
    INSUFFICIENT_DATA before min_batches updates, then INSIDE or OUTSIDE
    the three-sigma interval

    The same warm-up applies to the E monitor: its EMA still leans on the
    first batches while m is small. Pass min_batches=1 for an immediate verdict.
    """
    if monitor.m < min_batches:
        return ConvergenceFlag.INSUFFICIENT_DATA
    lo, hi = monitor.interval()
    return ConvergenceFlag.INSIDE if lo <= monitor.statistic <= hi else ConvergenceFlag.OUTSIDE


def running_mean(values: Sequence[float]) -> np.ndarray:
    """B statistic after each batch"""
    values = np.asarray(values, dtype=np.float64)
    return np.cumsum(values) / np.arange(1, values.size + 1)


def ema_series(values: Sequence[float], alpha: float) -> np.ndarray:
    """E statistic after each batch"""
    alpha = validate_momentum(alpha)
    return lfilter([1.0 - alpha], [1.0, -alpha], np.asarray(values, dtype=np.float64))
