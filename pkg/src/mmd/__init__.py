"""
Closed-form MMD statistics against the standard normal
"""

from .estimators import (
    EstimatorKind,
    MmdEstimate,
    RandomCodes,
    mmd_b_closed,
    mmd_u_closed,
    mmd_u_empirical,
    mmd_u_random,
    null_variance,
    smmd,
)
from .kernels import KernelFamily, KernelSpec, hz_gamma, resolve_gamma
from .normalization import center_scale, center_whiten, code_normalize, code_normalize_random
from .testing import CompositeNull, NullCache, NullDistribution, NullSpec, SampleType, TestResult

__all__ = [
    "CompositeNull",
    "EstimatorKind",
    "KernelFamily",
    "KernelSpec",
    "MmdEstimate",
    "NullCache",
    "NullDistribution",
    "NullSpec",
    "RandomCodes",
    "SampleType",
    "TestResult",
    "center_scale",
    "center_whiten",
    "code_normalize",
    "code_normalize_random",
    "hz_gamma",
    "mmd_b_closed",
    "mmd_u_closed",
    "mmd_u_empirical",
    "mmd_u_random",
    "null_variance",
    "resolve_gamma",
    "smmd",
]
