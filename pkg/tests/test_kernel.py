import math

import numpy as np
import pytest

from wavedens.basis import build_family
from wavedens.errors import ConfigurationError
from wavedens.kernel import (LocalizedKernel, ProjectionKernel,
                             cell_lower_corners, dyadic_centers, kernel_K,
                             kernel_K_batch, kernel_Kj, localize)

STEP = 2.0 ** -10


def test_haar_kernel_is_cell_indicator():
    pk = ProjectionKernel(build_family("haar"), 1)
    assert kernel_K(pk, 0.3, 0.7) == 1.0  # same unit cell
    assert kernel_K(pk, 0.3, 1.2) == 0.0
    assert kernel_K(pk, -0.5, -0.1) == 1.0


def test_kernel_symmetry():
    rng = np.random.default_rng(5)
    for fam in ("haar", "db4"):
        pk = ProjectionKernel(build_family(fam), 2)
        for _ in range(20):
            x, y = rng.uniform(-2, 2, 2), rng.uniform(-2, 2, 2)
            assert abs(kernel_K(pk, x, y) - kernel_K(pk, y, x)) < 1e-12


def test_db4_diagonal_value():
    # K(0,0) = sum_k phi(k)^2 = ((1+s3)/2)^2 + ((1-s3)/2)^2 = 2
    pk = ProjectionKernel(build_family("db4"), 1)
    assert abs(kernel_K(pk, 0.0, 0.0) - 2.0) < 1e-9


def test_rescaled_kernel():
    pk = ProjectionKernel(build_family("haar"), 1)
    assert kernel_Kj(pk, 3, 0.3, 0.3) == 8.0
    assert kernel_Kj(pk, 3, 0.3, 0.5) == 0.0  # different dyadic cells


def test_batch_matches_scalar():
    rng = np.random.default_rng(6)
    pk = ProjectionKernel(build_family("db4"), 2)
    x, y = rng.uniform(-1, 1, (30, 2)), rng.uniform(-1, 1, (30, 2))
    batch = kernel_K_batch(pk, x, y)
    for i in range(30):
        assert abs(batch[i] - kernel_K(pk, x[i], y[i])) < 1e-12


def test_localize_haar_section():
    pk = ProjectionKernel(build_family("haar"), 1)
    lk = localize(pk, 0, np.zeros(1), STEP)
    assert abs(lk.sigma - 1.0) < 1e-12
    assert abs(lk.tv - 2.0) < 1e-12
    assert abs(lk.integral() - 1.0) < 1e-12
    # section is the indicator of [0, 1)
    mid = lk.values[len(lk.values) // 2]  # s = 0
    assert mid == 1.0
    assert lk.values[0] == 0.0  # s = -1


def test_localize_db4_norm_and_mass():
    pk = ProjectionKernel(build_family("db4"), 1)
    lk = localize(pk, 0, np.zeros(1), STEP)
    assert abs(lk.sigma - math.sqrt(2.0)) < 1e-4
    assert abs(lk.integral() - 1.0) < 1e-9  # partition of unity
    assert np.isfinite(lk.tv) and lk.tv > 2.0


def test_dyadic_invariance():
    # Ktilde_{j,x} equals Ktilde_{0,0} whenever 2^j x is an integer vector
    for fam in ("haar", "db4"):
        for d in (1, 2):
            pk = ProjectionKernel(build_family(fam), d)
            step = STEP if d == 1 else 2.0 ** -4
            ref = localize(pk, 0, np.zeros(d), step)
            for j, x in [(3, c) for c in dyadic_centers(pk, 3, 3, seed=1)]:
                lk = localize(pk, j, x, step)
                assert np.max(np.abs(lk.values - ref.values)) < 1e-10


def test_localize_2d_tensorizes():
    pk1 = ProjectionKernel(build_family("haar"), 1)
    pk2 = ProjectionKernel(build_family("haar"), 2)
    step = 2.0 ** -4
    lk1 = localize(pk1, 0, np.zeros(1), step)
    lk2 = localize(pk2, 0, np.zeros(2), step)
    outer = np.multiply.outer(lk1.values, lk1.values)
    assert np.max(np.abs(lk2.values - outer)) < 1e-12
    assert abs(lk2.sigma - lk1.sigma ** 2) < 1e-12


def test_cell_lower_corners_shape():
    pk = ProjectionKernel(build_family("haar"), 2)
    lk = localize(pk, 0, np.zeros(2), 0.5)
    corners = cell_lower_corners(lk)
    assert corners.shape == (16, 2)
    assert corners[0].tolist() == [-1.0, -1.0]


def test_localize_rejects_bad_step():
    pk = ProjectionKernel(build_family("haar"), 1)
    with pytest.raises(ConfigurationError):
        localize(pk, 0, np.zeros(1), 0.3)
    with pytest.raises(ConfigurationError):
        localize(pk, 0, np.zeros(1), -0.1)
    with pytest.raises(ConfigurationError):
        localize(pk, 0, np.zeros(2), 0.5)


def test_tv_nan_above_1d():
    pk = ProjectionKernel(build_family("haar"), 2)
    lk = localize(pk, 0, np.zeros(2), 0.5)
    assert isinstance(lk, LocalizedKernel)
    assert math.isnan(lk.tv)
