#!/usr/bin/env python3
"""
Tests for the closed-form and empirical MMD estimators
"""

import itertools
import math
import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from src.mmd.estimators import (
    EstimatorKind,
    RandomCodes,
    bhep_statistic_1d,
    estimate,
    mean_embedding,
    mmd_b_closed,
    mmd_u_closed,
    mmd_u_empirical,
    mmd_u_random,
    mmd_u_random_diagonal,
    mmd_u_random_isotropic,
    null_variance,
    optimal_translation,
    outlier_delta,
    smmd,
    smmd_grid,
)
from src.mmd.kernels import KernelFamily, KernelSpec, scale_to_gamma
from src.utils.error_handler import ParameterError, SampleError


def naive_terms(sample, gamma):
    """Definition-level loops over the three closed-form terms"""
    n, d = sample.shape
    g2 = gamma ** 2
    first = (g2 / (2 + g2)) ** (d / 2)
    second = 0.0
    for i in range(n):
        second += (g2 / (1 + g2)) ** (d / 2) * math.exp(-sum(v * v for v in sample[i]) / (2 * (1 + g2)))
    off_diag = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                off_diag += math.exp(-sum((a - b) ** 2 for a, b in zip(sample[i], sample[j])) / (2 * g2))
    return first, 2.0 * second / n, off_diag


def naive_empirical(q, p, spec):
    n = len(q)
    within_p = sum(spec(p[i], p[j]) for i in range(n) for j in range(n) if i != j)
    within_q = sum(spec(q[i], q[j]) for i in range(n) for j in range(n) if i != j)
    cross = sum(spec(p[i], q[j]) for i in range(n) for j in range(n))
    return within_p / (n * (n - 1)) - 2 * cross / n ** 2 + within_q / (n * (n - 1))


def random_rotation(rng, d):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


class TestClosedForm:
    def test_zero_sample_hand_values(self):
        sample = np.zeros((2, 2))
        gamma = math.sqrt(2.0)
        assert mmd_u_closed(sample, gamma) == pytest.approx(1.0 / 6.0, abs=1e-12)
        assert null_variance(gamma, 2, 2) == pytest.approx(0.05, abs=1e-12)
        assert smmd(sample, gamma) == pytest.approx(0.74536, abs=1e-5)

    def test_biased_single_point(self):
        expected = math.sqrt(1 / 3) - 2 * math.sqrt(1 / 2) + 1
        assert mmd_b_closed([[0.0]], 1.0) == pytest.approx(expected, abs=1e-14)
        assert mmd_b_closed([[0.0]], 1.0) == pytest.approx(0.16314, abs=1e-5)

    def test_null_variance_hand_value(self):
        expected = 1 / 3 + math.sqrt(1 / 5) - 2 * math.sqrt(1 / 8)
        assert null_variance(1.0, 1, 2) == pytest.approx(expected, abs=1e-14)
        assert null_variance(1.0, 1, 2) == pytest.approx(0.07344, abs=1e-5)

    def test_null_variance_wide_kernel_stays_positive(self):
        gamma, d, n = 1e6, 1, 100
        value = null_variance(gamma, d, n)
        assert value > 0
        assert value == pytest.approx(2.0 / (n * (n - 1)) * d / gamma ** 4, rel=1e-2)

    def test_unbiased_requires_two_points(self):
        with pytest.raises(SampleError, match="n >= 2"):
            mmd_u_closed([[0.0, 1.0]], 1.0)
        with pytest.raises(SampleError):
            null_variance(1.0, 2, 1)

    def test_invalid_gamma(self):
        with pytest.raises(ParameterError):
            mmd_b_closed([[0.0]], 0.0)

    def test_naive_loop_oracle(self):
        rng = np.random.default_rng(2024)
        for n, d in itertools.product(range(2, 6), range(1, 4)):
            sample = rng.standard_normal((n, d)) * 1.5
            gamma = 0.5 + rng.random() * 2
            first, second, off_diag = naive_terms(sample, gamma)
            assert mmd_u_closed(sample, gamma) == pytest.approx(first - second + off_diag / (n * (n - 1)), abs=1e-12)
            assert mmd_b_closed(sample, gamma) == pytest.approx(first - second + (off_diag + n) / n ** 2, abs=1e-12)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(11)
        sample = rng.standard_normal((30, 4))
        rotated = sample @ random_rotation(rng, 4).T
        for gamma in (0.5, 1.0, 3.0):
            assert smmd(rotated, gamma) == pytest.approx(smmd(sample, gamma), abs=1e-10)
            assert mmd_b_closed(rotated, gamma) == pytest.approx(mmd_b_closed(sample, gamma), abs=1e-10)

    def test_smmd_grid_matches_single_width(self):
        rng = np.random.default_rng(5)
        sample = rng.standard_normal((40, 3))
        gammas = [scale_to_gamma(s, 3) for s in (2.0, 1.0, 0.125)]
        grid = smmd_grid(sample, gammas)
        for value, gamma in zip(grid, gammas):
            assert value == pytest.approx(smmd(sample, gamma), rel=1e-14)

    def test_mean_embedding_monte_carlo(self):
        rng = np.random.default_rng(99)
        z = np.array([[0.7, -1.1]])
        gamma = 0.9
        draws = rng.standard_normal((1_000_000, 2))
        values = np.exp(-np.sum((draws - z) ** 2, axis=1) / (2 * gamma ** 2))
        stderr = values.std() / math.sqrt(values.size)
        assert abs(values.mean() - mean_embedding(z, gamma)[0]) < 4 * stderr

    def test_bhep_quadrature_equivalence(self):
        for seed, gamma in zip((1, 2, 3), (0.7, 1.0, 1.6)):
            sample = np.random.default_rng(seed).standard_normal((3, 1))
            assert bhep_statistic_1d(sample, 1.0 / gamma) == pytest.approx(mmd_b_closed(sample, gamma), abs=1e-6)

    def test_bhep_requires_one_dimension(self):
        with pytest.raises(SampleError):
            bhep_statistic_1d(np.zeros((3, 2)), 1.0)


class TestNullBehaviour:
    def test_unbiased_under_null(self):
        rng = np.random.default_rng(314)
        d, n, reps = 2, 100, 2000
        gamma = scale_to_gamma(1 / 8, d)
        values = np.array([mmd_u_closed(rng.standard_normal((n, d)), gamma) for _ in range(reps)])
        assert abs(values.mean()) < 4 * math.sqrt(null_variance(gamma, d, n) / reps)

    def test_smmd_standardized_under_null(self):
        rng = np.random.default_rng(2718)
        d, n = 4, 100
        gamma = scale_to_gamma(1.0, d)
        values = np.array([smmd(rng.standard_normal((n, d)), gamma) for _ in range(2000)])
        assert abs(values.mean()) < 0.1
        assert 0.85 < values.std(ddof=1) < 1.15

    @pytest.mark.slow
    @pytest.mark.parametrize("d, scale, n", [(2, 1 / 8, 100), (8, 1 / 4, 100), (1, 1.0, 10)])
    def test_variance_formula_matches_simulation(self, d, scale, n):
        rng = np.random.default_rng(4242 + d)
        gamma = scale_to_gamma(scale, d)
        values = np.array([mmd_u_closed(rng.standard_normal((n, d)), gamma) for _ in range(100_000)])
        assert values.var(ddof=1) == pytest.approx(null_variance(gamma, d, n), rel=0.1)

    def test_closed_form_less_variable_than_empirical(self):
        rng = np.random.default_rng(8)
        d, n = 8, 100
        gamma = scale_to_gamma(1 / 8, d)
        spec = KernelSpec(KernelFamily.RBF, gamma)
        closed, empirical = [], []
        for _ in range(300):
            sample = rng.standard_normal((n, d))
            closed.append(mmd_u_closed(sample, gamma))
            empirical.append(mmd_u_empirical(sample, rng.standard_normal((n, d)), spec))
        assert np.var(closed) < np.var(empirical)


class TestRandomEncoder:
    def test_zero_sds_reduce_to_biased(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            n, d = rng.integers(1, 21), rng.integers(1, 9)
            means = rng.standard_normal((n, d))
            codes = RandomCodes(means=means, sds=np.zeros((n, d)))
            gamma = 0.3 + 2 * rng.random()
            assert mmd_u_random(codes, gamma) == pytest.approx(mmd_b_closed(means, gamma), abs=1e-12)
            assert mmd_u_random_diagonal(codes, gamma) == pytest.approx(mmd_b_closed(means, gamma), abs=1e-12)

    def test_single_point_hand_value(self):
        codes = RandomCodes(means=[[0.0]], sds=[[0.0]])
        assert mmd_u_random(codes, 1.0) == pytest.approx(0.16314, abs=1e-5)

    def test_unit_codes_at_origin_match_reference(self):
        codes = RandomCodes(means=np.zeros((5, 3)), sds=np.ones((5, 3)))
        for gamma in (0.5, 1.0, 2.0):
            assert mmd_u_random(codes, gamma) == pytest.approx(0.0, abs=1e-12)

    def test_isotropic_matches_diagonal(self):
        rng = np.random.default_rng(23)
        means = rng.standard_normal((12, 5))
        sds = np.repeat(rng.random((12, 1)) * 2, 5, axis=1)
        codes = RandomCodes(means=means, sds=sds)
        assert codes.is_isotropic
        assert mmd_u_random_isotropic(codes, 1.2) == pytest.approx(mmd_u_random_diagonal(codes, 1.2), abs=1e-12)

    def test_isotropic_form_rejects_diagonal_codes(self):
        codes = RandomCodes(means=np.zeros((2, 2)), sds=[[1.0, 2.0], [1.0, 1.0]])
        assert not codes.is_isotropic
        with pytest.raises(ParameterError):
            mmd_u_random_isotropic(codes, 1.0)

    def test_negative_sd_rejected(self):
        with pytest.raises(ParameterError):
            RandomCodes(means=np.zeros((2, 2)), sds=[[1.0, -0.1], [1.0, 1.0]])

    def test_shape_mismatch_rejected(self):
        with pytest.raises(SampleError):
            RandomCodes(means=np.zeros((2, 2)), sds=np.ones((3, 2)))


class TestEmpirical:
    def test_two_point_hand_value(self):
        spec = KernelSpec(KernelFamily.RBF, 1.0)
        value = mmd_u_empirical([[0.0], [1.0]], [[0.0], [1.0]], spec)
        assert value == pytest.approx(math.exp(-0.5) - 1.0, abs=1e-15)
        assert value == pytest.approx(-0.39347, abs=1e-5)

    def test_naive_loop_oracle(self):
        rng = np.random.default_rng(31)
        for n, d in itertools.product(range(2, 6), range(1, 4)):
            q, p = rng.standard_normal((n, d)), rng.standard_normal((n, d))
            for family in KernelFamily:
                spec = KernelSpec(family, 0.9)
                assert mmd_u_empirical(q, p, spec) == pytest.approx(naive_empirical(q, p, spec), abs=1e-12)

    def test_size_and_dimension_checks(self):
        spec = KernelSpec(KernelFamily.IMQ, 1.0)
        with pytest.raises(SampleError):
            mmd_u_empirical(np.zeros((3, 2)), np.zeros((4, 2)), spec)
        with pytest.raises(SampleError):
            mmd_u_empirical(np.zeros((3, 2)), np.zeros((3, 1)), spec)
        with pytest.raises(SampleError):
            mmd_u_empirical(np.zeros((1, 2)), np.zeros((1, 2)), spec)

    def test_estimate_records_settings(self):
        rng = np.random.default_rng(3)
        sample = rng.standard_normal((10, 2))
        result = estimate(sample, 1.0, EstimatorKind.CLOSED_FORM_BIASED)
        assert result.value == mmd_b_closed(sample, 1.0)
        assert (result.n, result.d) == (10, 2)
        assert result.kernel == KernelSpec(KernelFamily.RBF, 1.0)

        reference = rng.standard_normal((10, 2))
        imq = estimate(sample, 1.0, EstimatorKind.EMPIRICAL_UNBIASED_IMQ, reference)
        assert imq.value == mmd_u_empirical(sample, reference, KernelSpec(KernelFamily.IMQ, 1.0))
        with pytest.raises(ParameterError):
            estimate(sample, 1.0, EstimatorKind.EMPIRICAL_UNBIASED_RBF)


class TestOutliersAndTranslation:
    def test_no_change_gives_zero(self):
        sample = np.random.default_rng(1).standard_normal((20, 3))
        assert outlier_delta(sample, 4, sample[4], 1.0) == 0.0

    def test_antisymmetry(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((15, 2))
        replacement = np.array([4.0, -3.0])
        b = a.copy()
        b[0] = replacement
        assert outlier_delta(a, 0, replacement, 1.1) == -outlier_delta(b, 0, a[0], 1.1)

    def test_index_checks(self):
        sample = np.zeros((3, 2))
        with pytest.raises(ParameterError):
            outlier_delta(sample, 3, [0.0, 0.0], 1.0)
        with pytest.raises(ParameterError):
            outlier_delta(sample, -1, [0.0, 0.0], 1.0)
        with pytest.raises(SampleError):
            outlier_delta(sample, 0, [0.0], 1.0)

    def test_large_outlier_barely_moves_the_statistic(self):
        rng = np.random.default_rng(77)
        d, n = 4, 100
        gamma = scale_to_gamma(1.0, d)
        clean, deltas = [], []
        for _ in range(200):
            sample = rng.standard_normal((n, d))
            clean.append(mmd_u_closed(sample, gamma))
            deltas.append(outlier_delta(sample, 0, np.full(d, 100.0), gamma))
        assert abs(np.mean(deltas)) < 0.5 * np.std(clean, ddof=1)

    def test_single_point_translation(self):
        assert optimal_translation([[5.0]], 1.0) == pytest.approx([-5.0], abs=1e-12)

    def test_symmetric_pair_translation(self):
        assert optimal_translation([[-0.1], [0.1]], 1.0) == pytest.approx([0.0], abs=1e-6)

    def test_bimodal_translation_matches_grid_search(self):
        a, gamma = 10.0, 1.0
        sample = np.array([[-a], [a]])
        bandwidth2 = 1.0 + gamma ** 2
        grid = np.arange(-2 * a, 2 * a, 1e-5)
        objective = np.exp(-(sample[0, 0] + grid) ** 2 / (2 * bandwidth2)) + \
            np.exp(-(sample[1, 0] + grid) ** 2 / (2 * bandwidth2))
        best = grid[np.argmax(objective)]
        shift = optimal_translation(sample, gamma)
        assert abs(abs(shift[0]) - abs(best)) < 1e-4

    def test_translation_improves_statistic(self):
        rng = np.random.default_rng(12)
        sample = rng.standard_normal((50, 2)) + np.array([2.0, -1.0])
        gamma = 1.0
        shift = optimal_translation(sample, gamma)
        best = mmd_u_closed(sample + shift, gamma)
        assert best <= mmd_u_closed(sample, gamma)
        assert best <= mmd_u_closed(sample - sample.mean(axis=0), gamma) + 1e-12
