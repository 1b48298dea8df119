"""
Command line for the SMMD toolkit

Results go to stdout (or --output); logs go to stderr.
Exit codes: 0 success / fail-to-reject, 1 reject (test only), 2 usage or input error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from .mmd.estimators import RandomCodes, mmd_b_closed, mmd_u_closed, mmd_u_random, null_variance, smmd
from .mmd.experiments import (
    DEFAULT_TAU_REPLICATES,
    DEFAULT_THRESHOLD_REPLICATES,
    DEFAULT_VALIDATION_REPLICATES,
    DIMENSIONS,
    RBF_SCALES,
    AlternativeKind,
    Method,
    mark_best,
    normalization_shift,
    outlier_experiment,
    parse_scale,
    tau_table,
    threshold_table,
    validate_null,
    variance_curve,
)
from .mmd.kernels import KernelFamily, KernelSpec
from .mmd.monitoring import BMonitor, EMonitor, b_update, e_update, flag
from .mmd.normalization import code_normalize, code_normalize_random
from .mmd.testing import CompositeNull, NullCache, NullSpec, SampleType, liberal_test, test_normality
from .utils.config import configure_logging
from .utils.csv_io import SampleReader, read_sample
from .utils.error_handler import CacheError, ParameterError, SmmdError, validate_positive_int
from .utils.replicates import validate_seed
from .utils.tables import dumps_fixed, row_dict, write_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_USAGE = 2


def _kernel_from_args(args, d: int, n: int, family: KernelFamily = KernelFamily.RBF) -> KernelSpec:
    if args.gamma is not None:
        return KernelSpec(family, args.gamma)
    if args.scale is None:
        raise ParameterError("One of --gamma or --scale is required")
    return KernelSpec.from_scale(parse_scale(args.scale), d, n, family)


def _emit(text: str, output: Optional[str] = None) -> None:
    if output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_table(rows, args) -> None:
    text = write_table(rows, args.output, args.format)
    _emit(text, args.output)


def cmd_compute(args) -> int:
    means = read_sample(args.input, expected_d=args.d)
    n, d = means.shape
    kernel = _kernel_from_args(args, d, n)
    gamma = kernel.gamma
    variance = null_variance(gamma, d, n) if n >= 2 else None

    if args.random_encoder:
        sds = read_sample(args.random_encoder, expected_d=d)
        codes = RandomCodes(means=means, sds=sds)
        if args.normalize:
            codes = code_normalize_random(codes)
        result = {
            "mmd_u": mmd_u_random(codes, gamma),
            "mmd_b": mmd_b_closed(codes.means, gamma),
            "smmd": None,
            "variance": variance,
        }
    else:
        sample = code_normalize(means) if args.normalize else means
        result = {
            "mmd_u": mmd_u_closed(sample, gamma),
            "mmd_b": mmd_b_closed(sample, gamma),
            "smmd": smmd(sample, gamma),
            "variance": variance,
        }

    result.update(gamma=gamma, s=kernel.scale(d))
    _emit(dumps_fixed(result))
    return EXIT_OK


def cmd_test(args) -> int:
    sample = read_sample(args.input, expected_d=args.d)
    n, d = sample.shape
    kernel = _kernel_from_args(args, d, n)
    composite = CompositeNull(args.composite)
    cache = NullCache(args.cache_dir)

    if args.liberal:
        if composite is not CompositeNull.SIMPLE_STANDARD or args.null_file or args.replicates is not None:
            raise ParameterError("--liberal tests the simple null without a simulated distribution")
        result = liberal_test(sample, kernel)
        _emit(dumps_fixed(row_dict(result)))
        return EXIT_REJECT if result.reject else EXIT_OK

    if args.null_file:
        dist = cache.load_file(args.null_file)
    elif args.replicates is not None:
        spec = NullSpec(d=d, n=n, kernel=kernel, sample_type=composite.sample_type,
                        replicates=args.replicates, seed=validate_seed(args.seed))
        dist = cache.get_or_simulate(spec, args.threads)
    else:
        dist = cache.find(d, n, kernel, composite.sample_type)
        if dist is None:
            raise CacheError(
                f"No cached null distribution for d={d}, n={n}, gamma={kernel.gamma!r}, "
                f"{composite.sample_type.value}; pass --replicates and --seed to build one"
            )

    result = test_normality(sample, kernel, composite, args.alpha, dist)
    _emit(dumps_fixed(row_dict(result)))
    return EXIT_REJECT if result.reject else EXIT_OK


def cmd_thresholds(args) -> int:
    rows = threshold_table(args.dims, args.scales, args.n, args.alpha, args.replicates,
                           validate_seed(args.seed), args.sample_types, args.threads)
    _emit_table(rows, args)
    return EXIT_OK


def cmd_discriminate(args) -> int:
    methods = [Method(m) for m in args.methods]
    scales = {m: args.scales for m in methods} if args.scales else None
    results = tau_table(methods, AlternativeKind(args.alternative), args.dims, args.n, args.replicates,
                        validate_seed(args.seed), scales, args.magnitude, args.csv, args.threads,
                        whiten=args.whiten)
    _emit_table(mark_best(results), args)
    return EXIT_OK


def cmd_validate(args) -> int:
    rows = []
    for d in args.dims:
        rows.extend(validate_null(d, args.scales, args.n, args.replicates, validate_seed(args.seed), args.threads))
    _emit_table(rows, args)
    return EXIT_OK


def cmd_outliers(args) -> int:
    methods = [Method(m) for m in args.methods]
    scales = {m: args.scales for m in methods} if args.scales else None
    rows = outlier_experiment(methods, args.d, args.n, args.magnitude, args.replicates,
                              validate_seed(args.seed), scales, args.threads)
    _emit_table(rows, args)
    return EXIT_OK


def cmd_monitor(args) -> int:
    batch_size = validate_positive_int(args.batch_size, "batch size", minimum=2)
    reader = SampleReader(args.d)
    data = reader.read_file(args.input)
    d = data.shape[1]
    kernel = _kernel_from_args(args, d, batch_size)
    batches = list(reader.iter_batches(data, batch_size))

    monitor = BMonitor() if args.monitor == "b" else EMonitor(args.momentum)
    key = "b_stat" if args.monitor == "b" else "e_stat"
    for index, batch in enumerate(batches):
        value = smmd(batch, kernel.gamma)
        monitor = b_update(monitor, value) if args.monitor == "b" else e_update(monitor, value)
        lo, hi = monitor.interval()
        _emit(dumps_fixed({
            "batch_index": index,
            "smmd": value,
            key: monitor.statistic,
            "interval_lo": lo,
            "interval_hi": hi,
            "flag": flag(monitor, args.min_batches).value,
        }))

    _emit(dumps_fixed({
        "verdict": flag(monitor, args.min_batches).value,
        "batches": monitor.m,
        key: monitor.statistic,
    }))
    return EXIT_OK


def cmd_variance(args) -> int:
    _emit_table(variance_curve(args.dims, args.scales, args.n), args)
    return EXIT_OK


def cmd_normshift(args) -> int:
    rows = [normalization_shift(d, args.scale, args.n, args.replicates, validate_seed(args.seed), args.threads)
            for d in args.dims]
    _emit_table(rows, args)
    return EXIT_OK


def _add_kernel_args(parser: argparse.ArgumentParser, required: bool = True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--gamma", type=float, help="kernel width gamma")
    group.add_argument("--scale", help="kernel scale s = gamma^2 / d, a fraction like 1/8, or 'hz'")


def _add_table_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", "-o", help="write the table here instead of stdout")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG level")
    common.add_argument("--threads", type=int, help="worker threads (default: SMMD_THREADS or all cores)")
    common.add_argument("--cache-dir", help="null-distribution cache directory (default: SMMD_CACHE_DIR)")

    parser = argparse.ArgumentParser(prog="smmd", description="Closed-form SMMD normality toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="estimators for one sample")
    p.add_argument("input", help="CSV sample (means when --random-encoder is given)")
    p.add_argument("--d", type=int, help="expected dimension")
    p.add_argument("--normalize", action="store_true", help="code-normalize first")
    p.add_argument("--random-encoder", metavar="SDS_CSV", help="per-point standard deviations")
    _add_kernel_args(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("test", parents=[common], help="normality test against simulated thresholds")
    p.add_argument("input")
    p.add_argument("--d", type=int)
    p.add_argument("--composite", choices=[c.value for c in CompositeNull], default=CompositeNull.SIMPLE_STANDARD.value)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--replicates", type=int, help="simulate (and cache) the null when not cached")
    p.add_argument("--seed", type=int)
    p.add_argument("--null-file", help="explicit null-distribution cache file")
    p.add_argument("--liberal", action="store_true", help="simple null against the fixed threshold 2.0")
    _add_kernel_args(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("thresholds", parents=[common], help="threshold table")
    p.add_argument("--dims", type=int, nargs="+", default=list(DIMENSIONS))
    p.add_argument("--scales", nargs="+", default=list(RBF_SCALES))
    p.add_argument("--sample-types", nargs="+", choices=[t.value for t in SampleType],
                   default=[t.value for t in SampleType])
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--replicates", type=int, default=DEFAULT_THRESHOLD_REPLICATES)
    p.add_argument("--seed", type=int, required=True)
    _add_table_args(p)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("discriminate", parents=[common], help="effect size tau over a grid")
    p.add_argument("--methods", nargs="+", choices=[m.value for m in Method], default=[m.value for m in Method])
    p.add_argument("--alternative", choices=[a.value for a in AlternativeKind],
                   default=AlternativeKind.UNIFORM_CUBE.value)
    p.add_argument("--csv", help="data file for the external_csv alternative")
    p.add_argument("--whiten", action="store_true", help="center and whiten the external_csv codes first")
    p.add_argument("--magnitude", type=float, default=100.0)
    p.add_argument("--dims", type=int, nargs="+", default=list(DIMENSIONS))
    p.add_argument("--scales", nargs="+", help="override every method's scale grid")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--replicates", type=int, default=DEFAULT_TAU_REPLICATES)
    p.add_argument("--seed", type=int, required=True)
    _add_table_args(p)
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser("validate", parents=[common], help="SMMD mean and SD under the null")
    p.add_argument("--dims", type=int, nargs="+", default=list(DIMENSIONS))
    p.add_argument("--scales", nargs="+", default=list(RBF_SCALES[:-1]))
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--replicates", type=int, default=DEFAULT_VALIDATION_REPLICATES)
    p.add_argument("--seed", type=int, required=True)
    _add_table_args(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("outliers", parents=[common], help="outlier sensitivity per method")
    p.add_argument("--methods", nargs="+", choices=[m.value for m in Method], default=[m.value for m in Method])
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--magnitude", type=float, default=100.0)
    p.add_argument("--scales", nargs="+")
    p.add_argument("--replicates", type=int, default=DEFAULT_TAU_REPLICATES)
    p.add_argument("--seed", type=int, required=True)
    _add_table_args(p)
    p.set_defaults(func=cmd_outliers)

    p = sub.add_parser("monitor", parents=[common], help="B/E statistics over a batch stream")
    p.add_argument("input", help="CSV; every --batch-size consecutive rows form a batch")
    p.add_argument("--batch-size", type=int, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--monitor", choices=("b", "e"), default="b")
    p.add_argument("--momentum", type=float, default=0.99)
    p.add_argument("--min-batches", type=int, default=30)
    _add_kernel_args(p)
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("variance", parents=[common], help="null variance across widths")
    p.add_argument("--dims", type=int, nargs="+", default=list(DIMENSIONS))
    p.add_argument("--scales", nargs="+", default=list(RBF_SCALES))
    p.add_argument("--n", type=int, default=100)
    _add_table_args(p)
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("normshift", parents=[common], help="SMMD shift caused by code normalization")
    p.add_argument("--dims", type=int, nargs="+", default=[1, 4, 16])
    p.add_argument("--scale", default="1")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--replicates", type=int, default=DEFAULT_VALIDATION_REPLICATES)
    p.add_argument("--seed", type=int, required=True)
    _add_table_args(p)
    p.set_defaults(func=cmd_normshift)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("DEBUG" if args.verbose else None)

    try:
        return args.func(args)
    except SmmdError as e:
        sys.stderr.write(f"❌ {type(e).__name__}: {e}\n")
        return EXIT_USAGE
