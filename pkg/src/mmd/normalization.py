"""
Code normalization, per-dimension scaling and whitening
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..utils.error_handler import NumericalError, SampleError, validate_sample
from .estimators import RandomCodes

logger = logging.getLogger(__name__)

# smallest eigenvalue must exceed this fraction of the largest
EIGENVALUE_FLOOR = 1e-10


@dataclass(frozen=True)
class BatchStats:
    """Per-dimension batch moments (unbiased divisor n - 1)"""

    mean: np.ndarray
    per_dim_sd: np.ndarray
    covariance: Optional[np.ndarray] = None
    divisor_kind: str = "unbiased"


def batch_stats(sample, with_covariance: bool = False) -> BatchStats:
    sample = validate_sample(sample, min_rows=2)
    mean = sample.mean(axis=0)
    sd = sample.std(axis=0, ddof=1)
    cov = np.atleast_2d(np.cov(sample, rowvar=False, ddof=1)) if with_covariance else None
    return BatchStats(mean=mean, per_dim_sd=sd, covariance=cov)


def code_normalize(sample) -> np.ndarray:
    """
    Center each column and scale it to unit sample variance

    No affine parameters follow the scaling.

    Raises:
        SampleError: n < 2 or a column has zero variance
    """
    sample = validate_sample(sample, min_rows=2)
    stats = batch_stats(sample)
    zero = np.flatnonzero(stats.per_dim_sd == 0)
    if zero.size:
        raise SampleError(f"Column {zero[0] + 1} has zero variance; cannot normalize")
    return (sample - stats.mean) / stats.per_dim_sd


def center_scale(sample) -> np.ndarray:
    """Composite-null transform for diagonal covariance; same as code_normalize"""
    return code_normalize(sample)


def code_normalize_random(codes: RandomCodes) -> RandomCodes:
    """
    Normalize the Gaussian mixture described by random-encoder codes

    Mixture moments per dimension k:
        Mean_k = mean_i mu_ik
        Var_k  = mean_i (mu_ik^2 + sigma_ik^2) - Mean_k^2
    Means become (mu - Mean) / SD and standard deviations sigma / SD.
    """
    mu, sd = codes.means, codes.sds
    mix_mean = mu.mean(axis=0)
    mix_var = np.mean(mu * mu + sd * sd, axis=0) - mix_mean ** 2
    bad = np.flatnonzero(~(mix_var > 0))
    if bad.size:
        raise SampleError(f"Mixture variance of column {bad[0] + 1} is {mix_var[bad[0]]!r}; cannot normalize")
    mix_sd = np.sqrt(mix_var)
    return RandomCodes(means=(mu - mix_mean) / mix_sd, sds=sd / mix_sd)


def symmetric_inverse_sqrt(cov: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    S^{-1/2} by symmetric eigendecomposition

    Returns:
        (inverse square root, condition number)

    Raises:
        NumericalError: smallest eigenvalue is not above EIGENVALUE_FLOOR * largest
    """
    cov = np.atleast_2d(np.asarray(cov, dtype=np.float64))
    eigvals, eigvecs = np.linalg.eigh(cov)
    largest, smallest = eigvals[-1], eigvals[0]
    condition = float(largest / smallest) if smallest > 0 else np.inf
    if not largest > 0 or not smallest > EIGENVALUE_FLOOR * largest:
        raise NumericalError(f"Sample covariance is near-singular (condition number {condition:.3g})")
    inv_sqrt = (eigvecs / np.sqrt(eigvals)) @ eigvecs.T
    return inv_sqrt, condition


def center_whiten(sample) -> np.ndarray:
    """
    Z_i = S^{-1/2} (X_i - mean): zero mean and identity sample covariance

    Raises:
        SampleError: n < d + 1
        NumericalError: covariance is near-singular
    """
    sample = validate_sample(sample, min_rows=2)
    n, d = sample.shape
    if n < d + 1:
        raise SampleError(f"Whitening needs n >= d + 1, got n={n}, d={d}")
    stats = batch_stats(sample, with_covariance=True)
    inv_sqrt, condition = symmetric_inverse_sqrt(stats.covariance)
    logger.debug("Whitening with condition number %.3g", condition)
    return (sample - stats.mean) @ inv_sqrt
