"""
Closed-form MMD estimators against the standard normal N_d

All closed forms use the Gaussian RBF kernel of width gamma. Terms of the
form (gamma^2 / (c + gamma^2)) ** p are evaluated as exp(-p * log1p(c / gamma^2))
so large d neither overflows nor underflows prematurely.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.spatial.distance import pdist, squareform
from scipy.stats import norm

from ..utils.error_handler import (
    NumericalError,
    ParameterError,
    SampleError,
    validate_gamma,
    validate_positive_int,
    validate_sample,
)
from .kernels import KernelFamily, KernelSpec, condensed_sq_dists, cross_sq_dists, hz_gamma

logger = logging.getLogger(__name__)

__all__ = [
    "EstimatorKind",
    "MmdEstimate",
    "RandomCodes",
    "SampleGeometry",
    "bhep_statistic_1d",
    "estimate",
    "hz_gamma",
    "mean_embedding",
    "mmd_b_closed",
    "mmd_u_closed",
    "mmd_u_empirical",
    "mmd_u_random",
    "mmd_u_random_diagonal",
    "mmd_u_random_isotropic",
    "null_variance",
    "optimal_translation",
    "outlier_delta",
    "smmd",
    "smmd_grid",
]


class EstimatorKind(str, Enum):
    CLOSED_FORM_UNBIASED = "closed_form_unbiased"
    CLOSED_FORM_BIASED = "closed_form_biased"
    RANDOM_ENCODER = "random_encoder"
    EMPIRICAL_UNBIASED_RBF = "empirical_unbiased_rbf"
    EMPIRICAL_UNBIASED_IMQ = "empirical_unbiased_imq"


@dataclass(frozen=True)
class MmdEstimate:
    """An estimator value with the settings that produced it"""

    value: float
    estimator_kind: EstimatorKind
    kernel: KernelSpec
    n: int
    d: int


@dataclass(frozen=True)
class SampleGeometry:
    """Squared norms and pairwise squared distances of one sample"""

    sq_norms: np.ndarray
    pair_sq: np.ndarray = field(repr=False)
    n: int
    d: int

    @classmethod
    def of(cls, sample, min_rows: int = 1) -> "SampleGeometry":
        sample = validate_sample(sample, min_rows=min_rows)
        return cls(
            sq_norms=np.sum(sample * sample, axis=1),
            pair_sq=condensed_sq_dists(sample),
            n=sample.shape[0],
            d=sample.shape[1],
        )


@dataclass(frozen=True)
class RandomCodes:
    """Gaussian random-encoder outputs: per-point means and diagonal SDs"""

    means: np.ndarray
    sds: np.ndarray

    def __post_init__(self) -> None:
        means = validate_sample(self.means, name="means")
        sds = validate_sample(self.sds, name="sds")
        if means.shape != sds.shape:
            raise SampleError(f"means and sds shapes differ: {means.shape} vs {sds.shape}")
        if np.any(sds < 0):
            row, col = np.argwhere(sds < 0)[0]
            raise ParameterError(f"Negative standard deviation at row {row}, column {col}")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sds", sds)

    @property
    def n(self) -> int:
        return self.means.shape[0]

    @property
    def d(self) -> int:
        return self.means.shape[1]

    @property
    def is_isotropic(self) -> bool:
        return bool(np.all(self.sds == self.sds[:, :1]))


def _power_ratio(gamma2: float, c: float, power: float) -> float:
    # (gamma^2 / (c + gamma^2)) ** power
    return math.exp(-power * math.log1p(c / gamma2))


def _closed_form_terms(geom: SampleGeometry, gamma: float):
    gamma2 = gamma * gamma
    d, n = geom.d, geom.n
    first = _power_ratio(gamma2, 2.0, d / 2.0)
    second = (2.0 / n) * _power_ratio(gamma2, 1.0, d / 2.0) * float(
        np.sum(np.exp(-geom.sq_norms / (2.0 * (1.0 + gamma2))))
    )
    # sum over i < j; the full off-diagonal sum is twice this
    pair_sum = float(np.sum(np.exp(-geom.pair_sq / (2.0 * gamma2))))
    return first, second, pair_sum


def _mmd_u_from_geometry(geom: SampleGeometry, gamma: float) -> float:
    first, second, pair_sum = _closed_form_terms(geom, gamma)
    n = geom.n
    return first - second + 2.0 * pair_sum / (n * (n - 1))


def _require_unbiased_size(n: int) -> None:
    if n < 2:
        raise SampleError("unbiased estimator requires n >= 2")


def mmd_u_closed(sample, gamma: float) -> float:
    """
    Unbiased closed-form MMD^2 between N_d and the sample

    (g^2/(2+g^2))^(d/2) - (2/n)(g^2/(1+g^2))^(d/2) sum_i exp(-|z_i|^2 / (2(1+g^2)))
        + 1/(n(n-1)) sum_{i != j} exp(-|z_i - z_j|^2 / (2 g^2))
    """
    gamma = validate_gamma(gamma)
    geom = SampleGeometry.of(sample)
    _require_unbiased_size(geom.n)
    return _mmd_u_from_geometry(geom, gamma)


def mmd_b_closed(sample, gamma: float) -> float:
    """Biased (V-statistic) closed-form MMD^2; equals the BHEP statistic with beta = 1/gamma"""
    gamma = validate_gamma(gamma)
    geom = SampleGeometry.of(sample)
    first, second, pair_sum = _closed_form_terms(geom, gamma)
    n = geom.n
    return first - second + (n + 2.0 * pair_sum) / (n * n)


def null_variance(gamma: float, d: int, n: int) -> float:
    """Variance of the unbiased closed-form MMD^2 when the sample is drawn from N_d"""
    gamma = validate_gamma(gamma)
    d = validate_positive_int(d, "d")
    n = validate_positive_int(n, "n")
    _require_unbiased_size(n)

    gamma2 = gamma * gamma
    log_a = -d * math.log1p(2.0 / gamma2)
    log_b = -(d / 2.0) * math.log1p(4.0 / gamma2)
    log_c = -(d / 2.0) * (math.log1p(1.0 / gamma2) + math.log1p(3.0 / gamma2))
    # (a - 1) + (b - 1) - 2(c - 1), each term through expm1
    bracket = math.expm1(log_a) + math.expm1(log_b) - 2.0 * math.expm1(log_c)
    if not bracket > 0:
        raise NumericalError(f"Null variance underflowed to {bracket!r} for gamma={gamma}, d={d}")
    return 2.0 / (n * (n - 1)) * bracket


def smmd(sample, gamma: float) -> float:
    """Standardized MMD: mmd_u_closed / sqrt(null_variance)"""
    gamma = validate_gamma(gamma)
    geom = SampleGeometry.of(sample)
    _require_unbiased_size(geom.n)
    return _mmd_u_from_geometry(geom, gamma) / math.sqrt(null_variance(gamma, geom.d, geom.n))


def smmd_grid(sample, gammas: Sequence[float]) -> np.ndarray:
    """SMMD at several widths, sharing one distance computation"""
    geom = SampleGeometry.of(sample)
    _require_unbiased_size(geom.n)
    values = np.empty(len(gammas))
    for k, gamma in enumerate(gammas):
        gamma = validate_gamma(gamma)
        values[k] = _mmd_u_from_geometry(geom, gamma) / math.sqrt(null_variance(gamma, geom.d, geom.n))
    return values


def mean_embedding(sample, gamma: float) -> np.ndarray:
    """E_{x ~ N_d}[k(x, z_i)] for every row z_i"""
    gamma = validate_gamma(gamma)
    sample = validate_sample(sample)
    gamma2 = gamma * gamma
    d = sample.shape[1]
    return _power_ratio(gamma2, 1.0, d / 2.0) * np.exp(-np.sum(sample * sample, axis=1) / (2.0 * (1.0 + gamma2)))


def mmd_u_random_diagonal(codes: RandomCodes, gamma: float) -> float:
    """Random-encoder MMD^2 for general diagonal covariances"""
    gamma = validate_gamma(gamma)
    gamma2 = gamma * gamma
    mu, var = codes.means, codes.sds ** 2
    n, d = codes.n, codes.d

    first = _power_ratio(gamma2, 2.0, d / 2.0)

    log_point = -0.5 * np.log1p((1.0 + var) / gamma2) - mu ** 2 / (2.0 * (1.0 + gamma2 + var))
    second = (2.0 / n) * float(np.sum(np.exp(log_point.sum(axis=1))))

    pair_var = var[:, None, :] + var[None, :, :]
    diff2 = (mu[:, None, :] - mu[None, :, :]) ** 2
    log_pair = -0.5 * np.log1p(pair_var / gamma2) - diff2 / (2.0 * (gamma2 + pair_var))
    third = float(np.sum(np.exp(log_pair.sum(axis=2)))) / (n * n)

    return first - second + third


def mmd_u_random_isotropic(codes: RandomCodes, gamma: float) -> float:
    """Random-encoder MMD^2 when each point has a single SD shared by all coordinates"""
    gamma = validate_gamma(gamma)
    if not codes.is_isotropic:
        raise ParameterError("Isotropic form needs equal standard deviations within each row")
    gamma2 = gamma * gamma
    mu = codes.means
    n, d = codes.n, codes.d
    sig2 = codes.sds[:, 0] ** 2

    first = _power_ratio(gamma2, 2.0, d / 2.0)

    sq_norms = np.sum(mu * mu, axis=1)
    log_point = -(d / 2.0) * np.log1p((1.0 + sig2) / gamma2) - sq_norms / (2.0 * (1.0 + gamma2 + sig2))
    second = (2.0 / n) * float(np.sum(np.exp(log_point)))

    pair_var = sig2[:, None] + sig2[None, :]
    sq = squareform(pdist(mu, metric="sqeuclidean")) if n > 1 else np.zeros((1, 1))
    log_pair = -(d / 2.0) * np.log1p(pair_var / gamma2) - sq / (2.0 * (gamma2 + pair_var))
    third = float(np.sum(np.exp(log_pair))) / (n * n)

    return first - second + third


def mmd_u_random(codes: RandomCodes, gamma: float) -> float:
    """
    MMD^2 between N_d and the Gaussian mixture implied by a random encoder

    The pair average runs over all (i, j) including i == j; with every SD at
    zero this is exactly mmd_b_closed on the means.
    """
    if codes.is_isotropic:
        return mmd_u_random_isotropic(codes, gamma)
    return mmd_u_random_diagonal(codes, gamma)


def mmd_u_empirical(sample_q, sample_p, kernel: KernelSpec) -> float:
    """
    Two-sample unbiased MMD^2 with equal sample sizes

    1/(n(n-1)) sum_{i!=j} k(p_i,p_j) - 2/n^2 sum_{i,j} k(p_i,q_j) + 1/(n(n-1)) sum_{i!=j} k(q_i,q_j)
    """
    q = validate_sample(sample_q, name="sample_q")
    p = validate_sample(sample_p, name="sample_p")
    if q.shape[1] != p.shape[1]:
        raise SampleError(f"Dimension mismatch: {q.shape[1]} vs {p.shape[1]}")
    if q.shape[0] != p.shape[0]:
        raise SampleError(f"Empirical estimator needs equal sample sizes, got {q.shape[0]} and {p.shape[0]}")
    n = q.shape[0]
    _require_unbiased_size(n)

    within_q = 2.0 * float(np.sum(kernel.profile(condensed_sq_dists(q))))
    within_p = 2.0 * float(np.sum(kernel.profile(condensed_sq_dists(p))))
    cross = float(np.sum(kernel.profile(cross_sq_dists(p, q))))
    return within_p / (n * (n - 1)) - 2.0 * cross / (n * n) + within_q / (n * (n - 1))


def estimate(sample, gamma: float, kind: EstimatorKind = EstimatorKind.CLOSED_FORM_UNBIASED,
             reference: Optional[np.ndarray] = None) -> MmdEstimate:
    """Evaluate one of the sample-based estimators and record its settings"""
    kind = EstimatorKind(kind)
    sample = validate_sample(sample)
    n, d = sample.shape

    if kind is EstimatorKind.CLOSED_FORM_UNBIASED:
        kernel, value = KernelSpec(KernelFamily.RBF, gamma), mmd_u_closed(sample, gamma)
    elif kind is EstimatorKind.CLOSED_FORM_BIASED:
        kernel, value = KernelSpec(KernelFamily.RBF, gamma), mmd_b_closed(sample, gamma)
    elif kind in (EstimatorKind.EMPIRICAL_UNBIASED_RBF, EstimatorKind.EMPIRICAL_UNBIASED_IMQ):
        if reference is None:
            raise ParameterError(f"{kind.value} needs a reference sample from N_d")
        family = KernelFamily.RBF if kind is EstimatorKind.EMPIRICAL_UNBIASED_RBF else KernelFamily.IMQ
        kernel = KernelSpec(family, gamma)
        value = mmd_u_empirical(sample, reference, kernel)
    else:
        raise ParameterError("Random-encoder estimates take RandomCodes; call mmd_u_random")

    return MmdEstimate(value=value, estimator_kind=kind, kernel=kernel, n=n, d=d)


def outlier_delta(sample, index: int, replacement, gamma: float) -> float:
    """mmd_u_closed after replacing row `index` minus mmd_u_closed before"""
    sample = validate_sample(sample, min_rows=2)
    n, d = sample.shape
    if isinstance(index, bool) or not isinstance(index, (int, np.integer)) or not 0 <= index < n:
        raise ParameterError(f"Index {index!r} out of range for a sample of {n} rows")

    replacement = np.asarray(replacement, dtype=np.float64).reshape(-1)
    if replacement.shape != (d,):
        raise SampleError(f"Replacement must have {d} coordinates, got {replacement.shape[0]}")

    modified = sample.copy()
    modified[index] = replacement
    return mmd_u_closed(modified, gamma) - mmd_u_closed(sample, gamma)


def optimal_translation(sample, gamma: float, tol: float = 1e-10, max_iter: int = 1000) -> np.ndarray:
    """
    Shift t maximizing sum_i exp(-|z_i + t|^2 / (2(1 + gamma^2)))

    Only the second closed-form term moves under translation, so the best
    shift puts the mode of a Gaussian KDE (variance 1 + gamma^2) at the origin.
    Mean-shift runs from every sample point; ties keep the lowest start index.
    """
    gamma = validate_gamma(gamma)
    sample = validate_sample(sample)
    bandwidth2 = 1.0 + gamma * gamma

    def kde(mode: np.ndarray) -> np.ndarray:
        diff = sample - mode
        return np.exp(-np.sum(diff * diff, axis=1) / (2.0 * bandwidth2))

    best_mode, best_value = None, -np.inf
    for start in range(sample.shape[0]):
        mode = sample[start].copy()
        for _ in range(max_iter):
            weights = kde(mode)
            total = weights.sum()
            if total == 0.0:
                break
            new_mode = weights @ sample / total
            step = np.linalg.norm(new_mode - mode)
            mode = new_mode
            if step < tol:
                break
        value = kde(mode).sum()
        if value > best_value:
            best_mode, best_value = mode, value

    logger.debug("Optimal translation KDE value %.6g", best_value)
    return -best_mode


def bhep_statistic_1d(sample, beta: float) -> float:
    """
    BHEP weighted L2 distance between the empirical and standard normal
    characteristic functions in one dimension, by adaptive quadrature

    Weight is the N(0, beta^2) density; the value equals mmd_b_closed(sample, 1 / beta).
    """
    beta = validate_gamma(beta)
    z = validate_sample(sample)
    if z.shape[1] != 1:
        raise SampleError(f"bhep_statistic_1d needs d = 1, got d = {z.shape[1]}")
    z = z[:, 0]

    def integrand(t: float) -> float:
        real = np.exp(-t * t / 2.0) - np.mean(np.cos(t * z))
        imag = np.mean(np.sin(t * z))
        return (real * real + imag * imag) * norm.pdf(t, scale=beta)

    # integrand is even in t; the weight is negligible past 20 beta
    value, abserr = quad(integrand, 0.0, 20.0 * beta, epsabs=1e-13, epsrel=1e-12, limit=500)
    logger.debug("BHEP quadrature error estimate %.3g", abserr)
    return 2.0 * value
