#!/usr/bin/env python3
"""
Tests for kernel evaluations and distance helpers
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from src.mmd.kernels import (
    KernelFamily,
    KernelSpec,
    cross_sq_dists,
    gamma_to_scale,
    hz_gamma,
    imq_kernel,
    kernel_matrix,
    pairwise_sq_dists,
    rbf_kernel,
    resolve_gamma,
    scale_to_gamma,
)
from src.utils.error_handler import ParameterError, SampleError


def test_rbf_and_imq_values():
    assert rbf_kernel([0.0], [1.0], 1.0) == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert imq_kernel([0.0], [1.0], 1.0) == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert rbf_kernel([1.0, 2.0], [1.0, 2.0], 0.3) == 1.0


def test_kernel_symmetry():
    x, y = np.array([0.3, -1.2, 2.0]), np.array([1.1, 0.4, -0.5])
    for family in KernelFamily:
        spec = KernelSpec(family, 0.8)
        assert spec(x, y) == spec(y, x)


def test_invalid_gamma_rejected():
    for bad in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(ParameterError):
            KernelSpec(KernelFamily.RBF, bad)


def test_unknown_family_rejected():
    with pytest.raises(ParameterError):
        KernelSpec("laplace", 1.0)


def test_dimension_mismatch():
    with pytest.raises(SampleError):
        rbf_kernel([0.0, 1.0], [0.0], 1.0)


def test_scale_gamma_round_trip():
    assert scale_to_gamma(1.0 / 8.0, 8) == pytest.approx(1.0)
    assert gamma_to_scale(scale_to_gamma(0.25, 4), 4) == pytest.approx(0.25, rel=1e-15)
    assert KernelSpec.from_scale(2.0, 2).gamma == pytest.approx(2.0)


def test_hz_width():
    assert hz_gamma(1, 100) == pytest.approx(math.sqrt(2.0) * 75 ** (-0.2), rel=1e-12)
    assert hz_gamma(1, 100) == pytest.approx(0.59637, abs=1e-5)
    assert hz_gamma(4, 100) == pytest.approx(math.sqrt(2.0) * 225 ** (-1.0 / 8.0), rel=1e-10)
    widths = [hz_gamma(3, n) for n in (10, 100, 1000, 10000)]
    assert all(a > b for a, b in zip(widths, widths[1:]))


def test_resolve_gamma():
    assert resolve_gamma("hz", 2, 50) == hz_gamma(2, 50)
    assert resolve_gamma("HZ", 2, 50) == hz_gamma(2, 50)
    assert resolve_gamma(0.5, 2, 50) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        resolve_gamma("wide", 2, 50)
    with pytest.raises(ParameterError):
        resolve_gamma(-1.0, 2, 50)
    with pytest.raises(ParameterError):
        KernelSpec.from_scale("hz", 2)


def test_pairwise_and_cross_distances():
    sample = np.array([[0.0, 0.0], [3.0, 4.0], [1.0, 0.0]])
    dists = pairwise_sq_dists(sample)
    assert dists.shape == (3, 3)
    assert dists[0, 1] == 25.0
    assert dists[1, 2] == 20.0
    assert np.all(np.diag(dists) == 0.0)
    assert pairwise_sq_dists([[1.0, 2.0]]).shape == (1, 1)

    cross = cross_sq_dists(sample, sample[:1])
    assert cross[:, 0].tolist() == [0.0, 25.0, 1.0]
    with pytest.raises(SampleError):
        cross_sq_dists(sample, [[1.0, 2.0, 3.0]])


def test_kernel_matrix_matches_pointwise():
    rng = np.random.default_rng(7)
    sample = rng.standard_normal((5, 3))
    for family in KernelFamily:
        spec = KernelSpec(family, 1.3)
        matrix = kernel_matrix(spec, pairwise_sq_dists(sample))
        for i in range(5):
            for j in range(5):
                assert matrix[i, j] == pytest.approx(spec(sample[i], sample[j]), abs=1e-15)


def test_rbf_below_imq_off_diagonal():
    rng = np.random.default_rng(11)
    for _ in range(200):
        d = int(rng.integers(1, 9))
        x, y = rng.standard_normal(d), rng.standard_normal(d) * 3
        gamma = 0.1 + 5 * rng.random()
        assert rbf_kernel(x, y, gamma) < imq_kernel(x, y, gamma)
    assert rbf_kernel([0.5, 1.0], [0.5, 1.0], 0.7) == imq_kernel([0.5, 1.0], [0.5, 1.0], 0.7) == 1.0


def test_distances_invariant_under_rotation():
    rng = np.random.default_rng(12)
    for d in (1, 2, 5, 16):
        sample = rng.standard_normal((30, d)) * 2 + 1
        q, r = np.linalg.qr(rng.standard_normal((d, d)))
        rotated = sample @ (q * np.sign(np.diag(r))).T
        before, after = pairwise_sq_dists(sample), pairwise_sq_dists(rotated)
        assert np.allclose(after, before, rtol=1e-10, atol=1e-10 * before.max())


def test_distances_match_naive_loops():
    rng = np.random.default_rng(13)
    sample = rng.standard_normal((12, 4))
    dists = pairwise_sq_dists(sample)
    n, d = sample.shape
    for i in range(n):
        for j in range(n):
            expected = sum((sample[i, k] - sample[j, k]) ** 2 for k in range(d))
            assert dists[i, j] == pytest.approx(expected, rel=1e-12, abs=1e-14)
