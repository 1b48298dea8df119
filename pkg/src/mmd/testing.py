"""
Monte-Carlo null distributions and the SMMD normality test

Simple null: the sample comes from N_d. Composite nulls (unknown mean and
diagonal or full covariance) are tested by transforming the sample first and
comparing against thresholds simulated with the same transform.
"""

import hashlib
import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.config import load_settings
from ..utils.error_handler import (
    CacheError,
    NumericalError,
    ParameterError,
    SampleError,
    validate_alpha,
    validate_positive_int,
    validate_sample,
)
from ..utils.replicates import run_replicates, validate_seed
from ..utils.tables import format_float
from .estimators import smmd, smmd_grid
from .kernels import KernelFamily, KernelSpec
from .normalization import center_scale, center_whiten

logger = logging.getLogger(__name__)

CACHE_VERSION = 1
CACHE_SUFFIX = ".null"

# single-batch rule of thumb for the simple null at alpha = 0.05
LIBERAL_THRESHOLD = 2.0
LIBERAL_ALPHA = 0.05

MIN_THRESHOLD_REPLICATES = 1000
MAX_REDRAW_FRACTION = 0.01
MAX_REDRAWS_PER_REPLICATE = 100


class SampleType(str, Enum):
    """Transform applied to each sample before the statistic"""

    ORIGINAL = "original"
    CENTERED_SCALED = "centered_scaled"
    CENTERED_WHITENED = "centered_whitened"


class CompositeNull(str, Enum):
    """Null hypothesis being tested"""

    SIMPLE_STANDARD = "simple"
    DIAGONAL_COV = "diagonal"
    FULL_COV = "full"

    @property
    def sample_type(self) -> SampleType:
        return {
            CompositeNull.SIMPLE_STANDARD: SampleType.ORIGINAL,
            CompositeNull.DIAGONAL_COV: SampleType.CENTERED_SCALED,
            CompositeNull.FULL_COV: SampleType.CENTERED_WHITENED,
        }[self]


def apply_transform(sample, sample_type: SampleType) -> np.ndarray:
    sample_type = SampleType(sample_type)
    if sample_type is SampleType.CENTERED_SCALED:
        return center_scale(sample)
    if sample_type is SampleType.CENTERED_WHITENED:
        return center_whiten(sample)
    return validate_sample(sample)


@dataclass(frozen=True)
class NullSpec:
    """Everything that determines a simulated null distribution"""

    d: int
    n: int
    kernel: KernelSpec
    sample_type: SampleType
    replicates: int
    seed: int

    def __post_init__(self) -> None:
        validate_positive_int(self.d, "d")
        validate_positive_int(self.n, "n", minimum=2)
        validate_positive_int(self.replicates, "replicates")
        validate_seed(self.seed)
        try:
            object.__setattr__(self, "sample_type", SampleType(self.sample_type))
        except ValueError:
            raise ParameterError(f"Unknown sample type {self.sample_type!r}")
        if self.kernel.family is not KernelFamily.RBF:
            raise ParameterError("Null distributions are simulated for the closed-form RBF statistic only")
        if self.sample_type is SampleType.CENTERED_WHITENED and self.n < self.d + 1:
            raise ParameterError(f"Centered+whitened nulls need n >= d + 1, got n={self.n}, d={self.d}")

    def _identity(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "kernel": self.kernel.family.value,
            "gamma": self.kernel.gamma,
            "sample_type": self.sample_type.value,
        }

    def to_header(self) -> dict:
        return {**self._identity(), "replicates": self.replicates, "seed": self.seed}

    @classmethod
    def from_header(cls, header: dict) -> "NullSpec":
        try:
            return cls(
                d=header["d"],
                n=header["n"],
                kernel=KernelSpec(header["kernel"], header["gamma"]),
                sample_type=header["sample_type"],
                replicates=header["replicates"],
                seed=header["seed"],
            )
        except KeyError as e:
            raise CacheError(f"Cache header lacks field {e}")

    @property
    def identity_key(self) -> str:
        return _digest(self._identity())

    @property
    def full_key(self) -> str:
        return _digest(self.to_header())

    @property
    def file_name(self) -> str:
        return f"{self.identity_key}-{self.full_key}{CACHE_SUFFIX}"

    def matches(self, d: int, n: int, kernel: KernelSpec, sample_type: SampleType) -> bool:
        return (self.d, self.n, self.kernel, self.sample_type) == (d, n, kernel, SampleType(sample_type))


def _digest(fields: dict) -> str:
    canonical = json.dumps(
        {k: float.hex(v) if isinstance(v, float) else v for k, v in fields.items()}, sort_keys=True
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class NullDistribution:
    """Sorted replicate SMMD values for one NullSpec"""

    spec: NullSpec
    values: np.ndarray
    redraws: int = 0

    def __post_init__(self) -> None:
        values = np.sort(np.asarray(self.values, dtype=np.float64))
        if values.shape != (self.spec.replicates,):
            raise CacheError(f"Expected {self.spec.replicates} null values, got {values.size}")
        object.__setattr__(self, "values", values)

    def threshold(self, alpha: float) -> float:
        return threshold(self, alpha)


@dataclass(frozen=True)
class TestResult:
    """Outcome of one normality test"""

    __test__ = False

    statistic: float
    threshold: float
    reject: bool
    alpha: float
    composite: CompositeNull
    gamma: float
    n: int
    d: int


def _draw_null_sample(rng: np.random.Generator, d: int, n: int, sample_type: SampleType) -> Tuple[np.ndarray, int]:
    redraws = 0
    while True:
        sample = rng.standard_normal((n, d))
        try:
            return apply_transform(sample, sample_type), redraws
        except (NumericalError, SampleError) as e:
            redraws += 1
            if redraws > MAX_REDRAWS_PER_REPLICATE:
                raise NumericalError(f"Gave up after {redraws} redraws: {e}")
            logger.debug("Redrawing null replicate: %s", e)


def _simulate(d: int, n: int, gammas: Sequence[float], sample_type: SampleType, replicates: int,
              seed: int, threads: Optional[int]) -> Tuple[np.ndarray, int]:
    sample_type = SampleType(sample_type)

    def replicate(index: int, rng: np.random.Generator):
        sample, redraws = _draw_null_sample(rng, d, n, sample_type)
        return smmd_grid(sample, gammas), redraws

    results = run_replicates(replicate, seed, replicates, threads)
    values = np.vstack([r[0] for r in results])
    redraws = sum(r[1] for r in results)
    if redraws > MAX_REDRAW_FRACTION * replicates:
        raise NumericalError(f"{redraws} whitening redraws in {replicates} replicates exceeds 1%")
    if redraws:
        logger.info("%d replicates redrawn after whitening failures", redraws)
    return values, redraws


def simulate_null_grid(d: int, n: int, gammas: Sequence[float], sample_type: SampleType,
                       replicates: int, seed: int, threads: Optional[int] = None) -> np.ndarray:
    """
    Null SMMD values at several widths from shared draws

    Returns:
        replicates x len(gammas) matrix, rows in replicate order
    """
    d = validate_positive_int(d, "d")
    n = validate_positive_int(n, "n", minimum=2)
    return _simulate(d, n, gammas, sample_type, replicates, validate_seed(seed), threads)[0]


def simulate_null(spec: NullSpec, threads: Optional[int] = None) -> NullDistribution:
    """Monte-Carlo null distribution of SMMD for one spec"""
    logger.info("Simulating %d null replicates (d=%d, n=%d, %s)", spec.replicates, spec.d, spec.n,
                spec.sample_type.value)
    values, redraws = _simulate(spec.d, spec.n, [spec.kernel.gamma], spec.sample_type,
                                spec.replicates, spec.seed, threads)
    return NullDistribution(spec=spec, values=values[:, 0], redraws=redraws)


def threshold(dist: Union[NullDistribution, Sequence[float], np.ndarray], alpha: float) -> float:
    """Linear-interpolation empirical quantile at 1 - alpha"""
    alpha = validate_alpha(alpha)
    values = dist.values if isinstance(dist, NullDistribution) else np.sort(np.asarray(dist, dtype=np.float64))
    if values.size == 0:
        raise ParameterError("Cannot take a threshold of an empty null distribution")
    if values.size < MIN_THRESHOLD_REPLICATES:
        logger.warning("Threshold from only %d replicates", values.size)
    return float(np.quantile(values, 1.0 - alpha, method="linear"))


def test_normality(sample, kernel: KernelSpec, composite: CompositeNull, alpha: float,
                   null_cache: NullDistribution) -> TestResult:
    """
    Transform the sample for the chosen null, compute SMMD and compare it
    with the simulated threshold

    Raises:
        CacheError: null distribution was simulated for another d, n, kernel or sample type
    """
    sample = validate_sample(sample, min_rows=2)
    composite = CompositeNull(composite)
    n, d = sample.shape
    expected = composite.sample_type
    if not null_cache.spec.matches(d, n, kernel, expected):
        spec = null_cache.spec
        raise CacheError(
            f"Null distribution is for d={spec.d}, n={spec.n}, gamma={spec.kernel.gamma!r}, "
            f"{spec.sample_type.value}; test needs d={d}, n={n}, gamma={kernel.gamma!r}, {expected.value}"
        )

    statistic = smmd(apply_transform(sample, expected), kernel.gamma)
    limit = threshold(null_cache, alpha)
    return TestResult(
        statistic=statistic,
        threshold=limit,
        reject=bool(statistic > limit),
        alpha=alpha,
        composite=composite,
        gamma=kernel.gamma,
        n=n,
        d=d,
    )


test_normality.__test__ = False


def liberal_test(sample, kernel: KernelSpec) -> TestResult:
    """
    Simple-null test against the fixed threshold LIBERAL_THRESHOLD, no
    simulation. Slightly liberal at alpha = 0.05 for small d.
    """
    sample = validate_sample(sample, min_rows=2)
    if kernel.family is not KernelFamily.RBF:
        raise ParameterError("The liberal test uses the closed-form RBF statistic only")
    n, d = sample.shape
    statistic = smmd(sample, kernel.gamma)
    return TestResult(
        statistic=statistic,
        threshold=LIBERAL_THRESHOLD,
        reject=bool(statistic > LIBERAL_THRESHOLD),
        alpha=LIBERAL_ALPHA,
        composite=CompositeNull.SIMPLE_STANDARD,
        gamma=kernel.gamma,
        n=n,
        d=d,
    )


class NullCache:
    """Null distributions stored on disk under canonical spec hashes"""

    def __init__(self, cache_dir: Optional[Union[str, Path]] = None) -> None:
        """
        Initialize the cache

        Args:
            cache_dir: Directory for cache files (SMMD_CACHE_DIR when None)
        """
        self.cache_dir = Path(cache_dir).expanduser() if cache_dir else load_settings().cache_dir

    def _ensure_dir(self) -> None:
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise CacheError(f"Cannot create cache directory {self.cache_dir}: {e}")

    def path_for(self, spec: NullSpec) -> Path:
        return self.cache_dir / spec.file_name

    def save(self, dist: NullDistribution, path: Optional[Union[str, Path]] = None) -> Path:
        """Write a JSON header line followed by one value per line"""
        if path is None:
            self._ensure_dir()
            path = self.path_for(dist.spec)
        header = {**dist.spec.to_header(), "version": CACHE_VERSION, "redraws": dist.redraws}
        body = "\n".join(format_float(v) for v in dist.values)
        try:
            Path(path).write_text(json.dumps(header) + "\n" + body + "\n", encoding="utf-8")
        except OSError as e:
            raise CacheError(f"Cannot write cache file {path}: {e}")
        logger.debug("Saved null distribution to %s", path)
        return Path(path)

    def load_file(self, path: Union[str, Path], expected: Optional[NullSpec] = None) -> NullDistribution:
        """
        Read a cache file

        Raises:
            CacheError: unreadable, corrupt, wrong version, or not for `expected`
        """
        try:
            lines = Path(path).expanduser().read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise CacheError(f"Cannot read cache file {path}: {e}")
        if not lines:
            raise CacheError(f"Cache file {path} is empty")

        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError as e:
            raise CacheError(f"Cache file {path} has a corrupt header: {e}")
        if not isinstance(header, dict):
            raise CacheError(f"Cache file {path} has a corrupt header")
        if header.get("version") != CACHE_VERSION:
            raise CacheError(f"Cache file {path} has unsupported version {header.get('version')!r}")

        try:
            spec = NullSpec.from_header(header)
        except ParameterError as e:
            raise CacheError(f"Cache file {path} has an invalid header: {e}")
        if expected is not None and spec != expected:
            raise CacheError(f"Cache file {path} was built for {spec}, expected {expected}")

        try:
            values = np.array([float(line) for line in lines[1:] if line.strip()])
        except ValueError as e:
            raise CacheError(f"Cache file {path} has a corrupt value: {e}")
        return NullDistribution(spec=spec, values=values, redraws=int(header.get("redraws", 0)))

    def load(self, spec: NullSpec) -> Optional[NullDistribution]:
        path = self.path_for(spec)
        if not path.is_file():
            logger.debug("Cache miss for %s", path.name)
            return None
        logger.debug("Cache hit for %s", path.name)
        return self.load_file(path, expected=spec)

    def find(self, d: int, n: int, kernel: KernelSpec, sample_type: SampleType) -> Optional[NullDistribution]:
        """Largest cached distribution for (d, n, kernel, sample_type), any seed"""
        if not self.cache_dir.is_dir():
            return None
        key_spec = NullSpec(d=d, n=n, kernel=kernel, sample_type=sample_type, replicates=1, seed=0)
        best = None
        for path in sorted(self.cache_dir.glob(f"{key_spec.identity_key}-*{CACHE_SUFFIX}")):
            dist = self.load_file(path)
            if best is None or dist.spec.replicates > best.spec.replicates:
                best = dist
        return best

    def get_or_simulate(self, spec: NullSpec, threads: Optional[int] = None) -> NullDistribution:
        dist = self.load(spec)
        if dist is None:
            dist = simulate_null(spec, threads)
            self.save(dist)
        return dist
