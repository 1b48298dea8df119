"""
Synthetic experiment harness

Null validation, discrimination power (effect size tau), outlier
sensitivity, threshold tables and a few supporting studies. Every result
is a pure function of its arguments and the root seed.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.csv_io import read_sample
from ..utils.error_handler import ParameterError, SampleError, validate_alpha, validate_positive_int
from ..utils.replicates import run_replicates, validate_seed
from ..utils.tables import row_dict
from .estimators import EstimatorKind, estimate, mmd_u_closed, null_variance, outlier_delta, smmd
from .kernels import HZ, resolve_gamma
from .normalization import center_whiten, code_normalize
from .testing import SampleType, simulate_null_grid, threshold

logger = logging.getLogger(__name__)

Scale = Union[float, str]

SQRT3 = math.sqrt(3.0)

RBF_SCALES: Tuple[str, ...] = ("2", "1", "1/2", "1/4", "1/8", "1/16", "1/32", HZ)
IMQ_SCALES: Tuple[str, ...] = RBF_SCALES[:-1] + ("1/64", "1/128", "1/256", "1/512", "1/1024", HZ)
DIMENSIONS: Tuple[int, ...] = (1, 2, 4, 8, 16, 32)

DEFAULT_TAU_REPLICATES = 200
DEFAULT_VALIDATION_REPLICATES = 10_000
DEFAULT_THRESHOLD_REPLICATES = 100_000


def parse_scale(text: Union[str, float]) -> Scale:
    """"hz", a decimal or a fraction such as "1/16" """
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        value = float(text)
    else:
        text = str(text).strip().lower()
        if text == HZ:
            return HZ
        try:
            value = float(Fraction(text))
        except (ValueError, ZeroDivisionError):
            raise ParameterError(f"Invalid kernel scale {text!r}; use a positive number, a fraction or 'hz'")
    if not value > 0 or not math.isfinite(value):
        raise ParameterError(f"Invalid kernel scale {value}; must be positive")
    return value


def scale_label(scale: Scale) -> str:
    if scale == HZ:
        return HZ
    frac = Fraction(scale).limit_denominator(1 << 20)
    if float(frac) == scale:
        return str(frac)
    return repr(float(scale))


class AlternativeKind(str, Enum):
    STANDARD_NORMAL = "standard_normal"
    UNIFORM_CUBE = "uniform_cube"
    OUTLIER_INJECTED = "outlier_injected"
    EXTERNAL_CSV = "external_csv"


@dataclass(frozen=True)
class AlternativeSpec:
    """Sampler for the non-reference group"""

    kind: AlternativeKind
    d: int
    n: int
    magnitude: float = 100.0
    path: Optional[str] = None
    whiten: bool = False
    data: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "kind", AlternativeKind(self.kind))
        except ValueError:
            raise ParameterError(f"Unknown alternative {self.kind!r}")
        validate_positive_int(self.d, "d")
        validate_positive_int(self.n, "n")
        if not math.isfinite(self.magnitude):
            raise ParameterError(f"Outlier magnitude must be finite, got {self.magnitude!r}")
        if self.whiten and self.kind is not AlternativeKind.EXTERNAL_CSV:
            raise ParameterError("Whitening applies to the external_csv alternative only")

        if self.kind is AlternativeKind.EXTERNAL_CSV:
            data = self.data
            if data is None:
                if not self.path:
                    raise ParameterError("external_csv alternative needs a CSV path")
                data = read_sample(self.path, expected_d=self.d)
            elif data.shape[1] != self.d:
                raise SampleError(f"External data has d={data.shape[1]}, expected {self.d}")
            if data.shape[0] < self.n:
                raise SampleError(f"External data has {data.shape[0]} rows, batch needs {self.n}")
            if self.whiten:
                data = center_whiten(data)
                logger.info("Whitened %d external codes", data.shape[0])
            object.__setattr__(self, "data", data)


def sample_alternative(spec: AlternativeSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw one n x d batch"""
    shape = (spec.n, spec.d)
    if spec.kind is AlternativeKind.UNIFORM_CUBE:
        return rng.uniform(-SQRT3, SQRT3, size=shape)
    if spec.kind is AlternativeKind.EXTERNAL_CSV:
        rows = rng.choice(spec.data.shape[0], size=spec.n, replace=False)
        return spec.data[rows]

    sample = rng.standard_normal(shape)
    if spec.kind is AlternativeKind.OUTLIER_INJECTED:
        sample[0] = spec.magnitude
    return sample


class Method(str, Enum):
    """Statistic compared in the discrimination experiments"""

    ANALYTIC_RBF = "analytic_rbf"
    EMPIRICAL_RBF = "empirical_rbf"
    EMPIRICAL_IMQ = "empirical_imq"

    @property
    def estimator_kind(self) -> EstimatorKind:
        return {
            Method.ANALYTIC_RBF: EstimatorKind.CLOSED_FORM_UNBIASED,
            Method.EMPIRICAL_RBF: EstimatorKind.EMPIRICAL_UNBIASED_RBF,
            Method.EMPIRICAL_IMQ: EstimatorKind.EMPIRICAL_UNBIASED_IMQ,
        }[self]

    @property
    def default_scales(self) -> Tuple[str, ...]:
        return IMQ_SCALES if self is Method.EMPIRICAL_IMQ else RBF_SCALES


def as_method(value) -> Method:
    try:
        return Method(value)
    except ValueError:
        raise ParameterError(f"Unknown method {value!r}; use one of {[m.value for m in Method]}")


def method_statistic(method: Method, sample: np.ndarray, gamma: float, rng: np.random.Generator) -> float:
    """MMD^2 of the sample against N_d; empirical methods draw a fresh reference batch"""
    method = as_method(method)
    reference = None if method is Method.ANALYTIC_RBF else rng.standard_normal(sample.shape)
    return estimate(sample, gamma, method.estimator_kind, reference).value


def effect_size(group1: Sequence[float], group2: Sequence[float]) -> Tuple[float, float, float, float, float]:
    """
    tau = |mean1 - mean2| / ((sd1 + sd2) / 2), SDs with divisor n - 1

    Returns:
        (tau, mean1, sd1, mean2, sd2)
    """
    g1 = np.asarray(group1, dtype=np.float64)
    g2 = np.asarray(group2, dtype=np.float64)
    if g1.size < 2 or g2.size < 2:
        raise ParameterError("Effect size needs at least two values per group")
    m1, m2 = float(g1.mean()), float(g2.mean())
    s1, s2 = float(g1.std(ddof=1)), float(g2.std(ddof=1))
    spread = (s1 + s2) / 2.0
    tau = abs(m1 - m2) / spread if spread > 0 else (0.0 if m1 == m2 else math.inf)
    return tau, m1, s1, m2, s2


@dataclass(frozen=True)
class TauResult:
    method: Method
    alternative: AlternativeKind
    d: int
    scale: str
    gamma: float
    tau: float
    mean_null: float
    sd_null: float
    mean_alt: float
    sd_alt: float
    replicates: int


@dataclass(frozen=True)
class NullSummary:
    d: int
    scale: str
    gamma: float
    n: int
    mean: float
    sd: float
    replicates: int


@dataclass(frozen=True)
class ThresholdRow:
    d: int
    sample_type: SampleType
    scale: str
    gamma: float
    n: int
    alpha: float
    threshold: float
    replicates: int


@dataclass(frozen=True)
class OutlierDeltaSummary:
    d: int
    n: int
    magnitude: float
    gamma: float
    mean_delta: float
    sd_delta: float
    pooled_sd: float
    replicates: int


@dataclass(frozen=True)
class NormShiftSummary:
    d: int
    scale: str
    gamma: float
    n: int
    mean_raw: float
    sd_raw: float
    mean_normalized: float
    sd_normalized: float
    replicates: int


@dataclass(frozen=True)
class VarianceRow:
    d: int
    scale: str
    gamma: float
    n: int
    variance: float
    sd: float


def tau(method: Method, alternative: AlternativeSpec, d: int, n: int, scale: Scale,
        replicates: int = DEFAULT_TAU_REPLICATES, seed: Optional[int] = None,
        threads: Optional[int] = None) -> TauResult:
    """
    Separation between the method's statistic on N_d batches and on alternative batches

    Each replicate draws one reference-group batch and one alternative batch.
    """
    method = as_method(method)
    validate_seed(seed)
    replicates = validate_positive_int(replicates, "replicates", minimum=2)
    if (alternative.d, alternative.n) != (d, n):
        raise ParameterError(f"Alternative is for d={alternative.d}, n={alternative.n}; expected d={d}, n={n}")
    scale = parse_scale(scale)
    gamma = resolve_gamma(scale, d, n)

    def replicate(index: int, rng: np.random.Generator) -> Tuple[float, float]:
        null_value = method_statistic(method, rng.standard_normal((n, d)), gamma, rng)
        alt_value = method_statistic(method, sample_alternative(alternative, rng), gamma, rng)
        return null_value, alt_value

    pairs = np.array(run_replicates(replicate, seed, replicates, threads))
    value, m1, s1, m2, s2 = effect_size(pairs[:, 0], pairs[:, 1])
    logger.debug("tau(%s, d=%d, s=%s) = %.4f", method.value, d, scale_label(scale), value)
    return TauResult(
        method=method,
        alternative=alternative.kind,
        d=d,
        scale=scale_label(scale),
        gamma=gamma,
        tau=value,
        mean_null=m1,
        sd_null=s1,
        mean_alt=m2,
        sd_alt=s2,
        replicates=replicates,
    )


def tau_table(methods: Iterable[Method], kind: AlternativeKind, dims: Iterable[int], n: int,
              replicates: int, seed: int, scales: Optional[Dict[Method, Sequence[Scale]]] = None,
              magnitude: float = 100.0, path: Optional[str] = None,
              threads: Optional[int] = None, whiten: bool = False) -> List[TauResult]:
    """
    tau over a (method, d, scale) grid; every cell uses the same root seed

    whiten centers and whitens external codes once, before any batch is drawn
    """
    results = []
    for method in map(as_method, methods):
        method_scales = (scales or {}).get(method, method.default_scales)
        for d in dims:
            alternative = AlternativeSpec(kind=kind, d=d, n=n, magnitude=magnitude, path=path, whiten=whiten)
            for scale in method_scales:
                results.append(tau(method, alternative, d, n, scale, replicates, seed, threads))
    return results


def validate_null(d: int, scales: Sequence[Scale], n: int, replicates: int = DEFAULT_VALIDATION_REPLICATES,
                  seed: Optional[int] = None, threads: Optional[int] = None) -> List[NullSummary]:
    """Mean and SD of SMMD over null replicates, per scale"""
    replicates = validate_positive_int(replicates, "replicates", minimum=2)
    if replicates < 1000:
        logger.warning("Null validation with only %d replicates", replicates)
    parsed = [parse_scale(s) for s in scales]
    gammas = [resolve_gamma(s, d, n) for s in parsed]
    values = simulate_null_grid(d, n, gammas, SampleType.ORIGINAL, replicates, seed, threads)
    return [
        NullSummary(
            d=d,
            scale=scale_label(s),
            gamma=g,
            n=n,
            mean=float(values[:, k].mean()),
            sd=float(values[:, k].std(ddof=1)),
            replicates=replicates,
        )
        for k, (s, g) in enumerate(zip(parsed, gammas))
    ]


def threshold_table(dims: Iterable[int], scales: Sequence[Scale], n: int, alpha: float = 0.05,
                    replicates: int = DEFAULT_THRESHOLD_REPLICATES, seed: Optional[int] = None,
                    sample_types: Sequence[SampleType] = tuple(SampleType),
                    threads: Optional[int] = None) -> List[ThresholdRow]:
    """
    Alpha-level thresholds per (d, sample type, scale)

    All sample types reuse the same root seed, so at d = 1 the two composite
    rows see identical draws. Whitened rows with n < d + 1 are skipped.
    """
    alpha = validate_alpha(alpha)
    parsed = [parse_scale(s) for s in scales]
    rows = []
    for d in dims:
        gammas = [resolve_gamma(s, d, n) for s in parsed]
        for sample_type in map(SampleType, sample_types):
            if sample_type is SampleType.CENTERED_WHITENED and n < d + 1:
                logger.warning("Skipping whitened thresholds for d=%d, n=%d", d, n)
                continue
            values = simulate_null_grid(d, n, gammas, sample_type, replicates, seed, threads)
            for k, (s, g) in enumerate(zip(parsed, gammas)):
                rows.append(ThresholdRow(
                    d=d,
                    sample_type=sample_type,
                    scale=scale_label(s),
                    gamma=g,
                    n=n,
                    alpha=alpha,
                    threshold=threshold(values[:, k], alpha),
                    replicates=replicates,
                ))
    return rows


def outlier_experiment(methods: Iterable[Method], d: int, n: int, magnitude: float = 100.0,
                       replicates: int = DEFAULT_TAU_REPLICATES, seed: Optional[int] = None,
                       scales: Optional[Dict[Method, Sequence[Scale]]] = None,
                       threads: Optional[int] = None) -> List[TauResult]:
    """
    Clean null batches versus batches whose first row is magnitude * ones

    Each method is reported at the scale giving its largest tau.
    """
    alternative = AlternativeSpec(AlternativeKind.OUTLIER_INJECTED, d=d, n=n, magnitude=magnitude)
    best = []
    for method in map(as_method, methods):
        method_scales = (scales or {}).get(method, method.default_scales)
        candidates = [tau(method, alternative, d, n, s, replicates, seed, threads) for s in method_scales]
        chosen = max(candidates, key=lambda r: r.tau)
        logger.info("Outlier tau for %s: %.4f at s=%s", method.value, chosen.tau, chosen.scale)
        best.append(chosen)
    return best


def outlier_delta_study(d: int, n: int, magnitude: float, scale: Scale,
                        replicates: int = DEFAULT_TAU_REPLICATES, seed: Optional[int] = None,
                        threads: Optional[int] = None) -> OutlierDeltaSummary:
    """Change in the closed-form MMD^2 when z_1 is replaced by magnitude * ones"""
    replicates = validate_positive_int(replicates, "replicates", minimum=2)
    gamma = resolve_gamma(parse_scale(scale), d, n)
    outlier = np.full(d, float(magnitude))

    def replicate(index: int, rng: np.random.Generator) -> Tuple[float, float]:
        sample = rng.standard_normal((n, d))
        delta = outlier_delta(sample, 0, outlier, gamma)
        return mmd_u_closed(sample, gamma), delta

    pairs = np.array(run_replicates(replicate, seed, replicates, threads))
    clean, deltas = pairs[:, 0], pairs[:, 1]
    pooled = (clean.std(ddof=1) + (clean + deltas).std(ddof=1)) / 2.0
    return OutlierDeltaSummary(
        d=d,
        n=n,
        magnitude=float(magnitude),
        gamma=gamma,
        mean_delta=float(deltas.mean()),
        sd_delta=float(deltas.std(ddof=1)),
        pooled_sd=float(pooled),
        replicates=replicates,
    )


def normalization_shift(d: int, scale: Scale, n: int, replicates: int = DEFAULT_VALIDATION_REPLICATES,
                        seed: Optional[int] = None, threads: Optional[int] = None) -> NormShiftSummary:
    """SMMD of raw null batches versus the same batches after code_normalize"""
    replicates = validate_positive_int(replicates, "replicates", minimum=2)
    parsed = parse_scale(scale)
    gamma = resolve_gamma(parsed, d, n)

    def replicate(index: int, rng: np.random.Generator) -> Tuple[float, float]:
        sample = rng.standard_normal((n, d))
        return smmd(sample, gamma), smmd(code_normalize(sample), gamma)

    pairs = np.array(run_replicates(replicate, seed, replicates, threads))
    return NormShiftSummary(
        d=d,
        scale=scale_label(parsed),
        gamma=gamma,
        n=n,
        mean_raw=float(pairs[:, 0].mean()),
        sd_raw=float(pairs[:, 0].std(ddof=1)),
        mean_normalized=float(pairs[:, 1].mean()),
        sd_normalized=float(pairs[:, 1].std(ddof=1)),
        replicates=replicates,
    )


def variance_curve(dims: Iterable[int], scales: Sequence[Scale], n: int) -> List[VarianceRow]:
    """Null variance of the unbiased estimator across dimensions and widths"""
    rows = []
    for d in dims:
        for s in map(parse_scale, scales):
            gamma = resolve_gamma(s, d, n)
            variance = null_variance(gamma, d, n)
            rows.append(VarianceRow(d=d, scale=scale_label(s), gamma=gamma, n=n,
                                    variance=variance, sd=math.sqrt(variance)))
    return rows


def mark_best(results: Sequence[TauResult], within: float = 0.05) -> List[dict]:
    """Rows flagged best when tau is within `within` of the (method, d) maximum"""
    peak: Dict[Tuple[Method, int], float] = {}
    for r in results:
        key = (r.method, r.d)
        peak[key] = max(peak.get(key, -math.inf), r.tau)
    rows = []
    for r in results:
        row = row_dict(r)
        row["best"] = bool(r.tau >= (1.0 - within) * peak[(r.method, r.d)])
        rows.append(row)
    return rows
