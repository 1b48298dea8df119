"""
Kernel evaluations and pairwise squared distances

Squared distances are summed per pair ((x - y)**2 summed over coordinates,
as scipy's sqeuclidean metric does) rather than expanded as
|x|^2 + |y|^2 - 2 x.y, which loses precision for near-coincident points.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from ..utils.error_handler import ParameterError, SampleError, validate_gamma, validate_positive_int, validate_sample

HZ = "hz"


class KernelFamily(str, Enum):
    """Supported translation-invariant kernels"""

    RBF = "rbf"
    IMQ = "imq"


def scale_to_gamma(scale: float, d: int) -> float:
    """gamma = sqrt(s * d)"""
    d = validate_positive_int(d, "d")
    if not scale > 0 or not math.isfinite(scale):
        raise ParameterError(f"Invalid kernel scale: {scale}. Must be positive.")
    return math.sqrt(scale * d)


def gamma_to_scale(gamma: float, d: int) -> float:
    """s = gamma**2 / d"""
    gamma = validate_gamma(gamma)
    d = validate_positive_int(d, "d")
    return gamma * gamma / d


def hz_gamma(d: int, n: int) -> float:
    """Henze-Zirkler width sqrt(2) * ((2d + 1) n / 4) ** (-1 / (d + 4))"""
    d = validate_positive_int(d, "d")
    n = validate_positive_int(n, "n")
    return math.sqrt(2.0) * ((2 * d + 1) * n / 4.0) ** (-1.0 / (d + 4))


def resolve_gamma(scale: Union[float, str], d: int, n: int) -> float:
    """Kernel width from a scale value or the string "hz" """
    if isinstance(scale, str):
        if scale.strip().lower() == HZ:
            return hz_gamma(d, n)
        raise ParameterError(f"Unknown kernel scale {scale!r}; use a positive number or 'hz'")
    return scale_to_gamma(float(scale), d)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus width gamma > 0"""

    family: KernelFamily
    gamma: float

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "family", KernelFamily(self.family))
        except ValueError:
            raise ParameterError(f"Unknown kernel family {self.family!r}; use 'rbf' or 'imq'")
        object.__setattr__(self, "gamma", validate_gamma(self.gamma))

    @classmethod
    def from_scale(cls, scale: Union[float, str], d: int, n: Optional[int] = None,
                   family: KernelFamily = KernelFamily.RBF) -> "KernelSpec":
        if isinstance(scale, str) and n is None:
            raise ParameterError("The HZ width needs the sample size n")
        return cls(family, resolve_gamma(scale, d, n or 1))

    def scale(self, d: int) -> float:
        return gamma_to_scale(self.gamma, d)

    def profile(self, sq_dists: np.ndarray) -> np.ndarray:
        """Kernel value as a function of squared distance"""
        if self.family is KernelFamily.RBF:
            return np.exp(-sq_dists / (2.0 * self.gamma ** 2))
        return 1.0 / (1.0 + sq_dists / (2.0 * self.gamma ** 2))

    def __call__(self, x, y) -> float:
        return float(self.profile(_pair_sq_dist(x, y)))


def _pair_sq_dist(x, y) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if x.ndim != 1 or y.ndim != 1:
        raise SampleError(f"Kernel arguments must be vectors, got shapes {x.shape} and {y.shape}")
    if x.shape != y.shape:
        raise SampleError(f"Dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    diff = x - y
    return float(np.sum(diff * diff))


def rbf_kernel(x, y, gamma: float) -> float:
    """exp(-|x - y|^2 / (2 gamma^2))"""
    return KernelSpec(KernelFamily.RBF, gamma)(x, y)


def imq_kernel(x, y, gamma: float) -> float:
    """1 / (1 + |x - y|^2 / (2 gamma^2))"""
    return KernelSpec(KernelFamily.IMQ, gamma)(x, y)


def condensed_sq_dists(sample: np.ndarray) -> np.ndarray:
    """Upper-triangle squared distances, pair order (0,1), (0,2), ..., (n-2,n-1)"""
    if sample.shape[0] < 2:
        return np.zeros(0)
    return pdist(sample, metric="sqeuclidean")


def pairwise_sq_dists(sample) -> np.ndarray:
    """n x n matrix D[i, j] = |z_i - z_j|^2"""
    sample = validate_sample(sample)
    if sample.shape[0] == 1:
        return np.zeros((1, 1))
    return squareform(condensed_sq_dists(sample))


def cross_sq_dists(a, b) -> np.ndarray:
    """n x m matrix of squared distances between the rows of a and b"""
    a = validate_sample(a, name="first sample")
    b = validate_sample(b, name="second sample")
    if a.shape[1] != b.shape[1]:
        raise SampleError(f"Dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return cdist(a, b, metric="sqeuclidean")


def kernel_matrix(spec: KernelSpec, sq_dists: np.ndarray) -> np.ndarray:
    """Apply a kernel to a matrix of squared distances"""
    return spec.profile(np.asarray(sq_dists, dtype=np.float64))
