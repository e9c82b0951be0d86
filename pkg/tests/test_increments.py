import math

import numpy as np
import pytest

from wavedens.basis import build_family
from wavedens.errors import ConfigurationError
from wavedens.increments import (cell_density, from_cell_density, g_n_x,
                                 g_tilde_n_x, increment, relation_check,
                                 theta)
from wavedens.kernel import ProjectionKernel, localize
from wavedens.sampling import SeedSpec, draw, make_density

STEP = 2.0 ** -10


def test_increment_direct():
    den = make_density("uniform01", 1)
    sample = draw(den, SeedSpec(1), 400)
    x, h = np.array([0.5]), 2.0 ** -4
    val = increment(sample, den, x, h, (np.array([-1.0]), np.array([1.0])))
    inside = np.mean(np.abs(sample[:, 0] - 0.5) <= h)
    expected = math.sqrt(400) * (inside - 2 * h)
    assert abs(val - expected) < 1e-12


def test_increment_degenerate_box():
    den = make_density("uniform01", 1)
    sample = draw(den, SeedSpec(1), 10)
    with pytest.raises(ValueError):
        increment(sample, den, [0.5], 0.1, ([1.0], [-1.0]))


def test_gnx_values_against_direct_count():
    den = make_density("cosine_bump", 1)
    sample = draw(den, SeedSpec(2), 1000)
    x, j = np.array([0.5]), 3
    g = g_n_x(sample, den, x, j, grid_step=STEP)
    h = 2.0 ** -j
    fx = float(den.pdf(x))
    denom = math.sqrt(2.0 * fx * h * math.log(1.0 / h))
    # check a few corners directly: g(s) = sqrt(n)(P_n - P)[s, 1] / denom
    for s in (-1.0, -0.25, 0.0, 0.5):
        idx = int(round((s + 1.0) / STEP))
        lo = x + s * h
        hi = x + 1.0 * h
        count = np.mean(np.all((sample >= lo) & (sample < hi), axis=1))
        # corner counts use right-open binning except the top edge
        prob = den.box_prob(lo, hi)
        direct = math.sqrt(1000) * (count - prob) / denom
        assert abs(g.values[idx] - direct) < 1e-9


def test_gtilde_monotone():
    den = make_density("uniform01", 2)
    sample = draw(den, SeedSpec(3), 500)
    g = g_tilde_n_x(sample, den, np.array([0.5, 0.5]), 2, c=1.0,
                    grid_step=2.0 ** -4)
    assert np.all(g.values >= 0.0)
    assert np.all(np.diff(g.values, axis=0) <= 1e-12)
    assert np.all(np.diff(g.values, axis=1) <= 1e-12)


def test_cell_density_roundtrip():
    rng = np.random.default_rng(4)
    axes = (np.linspace(-1, 1, 17),)
    gdot = rng.normal(size=16)
    g = from_cell_density("test", axes, gdot)
    np.testing.assert_allclose(cell_density(g), gdot, atol=1e-10)


def test_cell_density_roundtrip_2d():
    rng = np.random.default_rng(5)
    axes = (np.linspace(-1, 1, 9),) * 2
    gdot = rng.normal(size=(8, 8))
    g = from_cell_density("test", axes, gdot)
    np.testing.assert_allclose(cell_density(g), gdot, atol=1e-10)


def test_theta_linearity():
    rng = np.random.default_rng(6)
    pk = ProjectionKernel(build_family("haar"), 1)
    lk = localize(pk, 0, np.zeros(1), 2.0 ** -4)
    axes = lk.axes
    g1 = from_cell_density("a", axes, rng.normal(size=32))
    g2 = from_cell_density("b", axes, rng.normal(size=32))
    g3 = from_cell_density("c", axes,
                           2.0 * cell_density(g1) - 0.5 * cell_density(g2))
    lin = 2.0 * theta(lk, g1) - 0.5 * theta(lk, g2)
    assert abs(theta(lk, g3) - lin) < 1e-12


def test_theta_of_unit_density_is_mass():
    # gdot == 1 -> theta_unnormalized = integral of Ktilde = 1
    for fam in ("haar", "db4"):
        pk = ProjectionKernel(build_family(fam), 1)
        lk = localize(pk, 0, np.zeros(1), STEP)
        g = from_cell_density("unit", lk.axes, np.ones(len(lk.axes[0]) - 1))
        assert abs(theta(lk, g, normalized=False) - 1.0) < 1e-9


def test_theta_boundedness():
    # |theta(g)| <= (tv / sigma) * sup|g|
    rng = np.random.default_rng(7)
    pk = ProjectionKernel(build_family("db4"), 1)
    lk = localize(pk, 0, np.zeros(1), STEP)
    bound = lk.tv / lk.sigma
    for _ in range(20):
        g = from_cell_density("r", lk.axes,
                              rng.normal(size=len(lk.axes[0]) - 1))
        assert abs(theta(lk, g)) <= bound * np.max(np.abs(g.values)) + 1e-9


def test_relation_identity_haar():
    den = make_density("uniform01", 1)
    sample = draw(den, SeedSpec(7), 1000)
    assert relation_check(sample, den, [0.5], 4, build_family("haar")) < 1e-9


def test_relation_identity_db4():
    den = make_density("cosine_bump", 1)
    sample = draw(den, SeedSpec(8), 500)
    assert relation_check(sample, den, [0.4], 3, build_family("db4")) < 1e-6


def test_relation_identity_single_point():
    den = make_density("uniform01", 1)
    sample = np.array([[0.37]])
    assert relation_check(sample, den, [0.5], 4, build_family("haar")) < 1e-9


def test_gnx_rejects_level_zero():
    den = make_density("uniform01", 1)
    sample = draw(den, SeedSpec(0), 50)
    with pytest.raises(ValueError):
        g_n_x(sample, den, [0.5], 0)


def test_grid_step_must_tile():
    den = make_density("uniform01", 1)
    sample = draw(den, SeedSpec(0), 50)
    with pytest.raises(ConfigurationError):
        g_n_x(sample, den, [0.5], 3, grid_step=0.3)
