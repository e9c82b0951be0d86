import math

import numpy as np
import pytest

from wavedens.errors import ConfigurationError
from wavedens.sampling import Density, SeedSpec, draw, make_density

DENSITIES = ("uniform01", "cosine_bump", "trunc_gauss_mix")


def test_seed_spec_determinism():
    a = draw(make_density("uniform01", 2), SeedSpec(3, 1), 100)
    b = draw(make_density("uniform01", 2), SeedSpec(3, 1), 100)
    np.testing.assert_array_equal(a, b)


def test_distinct_replications_differ():
    den = make_density("cosine_bump", 1)
    a = draw(den, SeedSpec(3, 0), 100)
    b = draw(den, SeedSpec(3, 1), 100)
    assert np.max(np.abs(a - b)) > 1e-3


def test_draw_inside_unit_cube():
    for name in DENSITIES:
        den = make_density(name, 2)
        pts = draw(den, SeedSpec(0), 500)
        assert pts.shape == (500, 2)
        assert np.all(pts >= 0.0) and np.all(pts <= 1.0)


def test_pdf_integrates_to_one():
    xs = (np.arange(1 << 14) + 0.5) * 2.0 ** -14
    for name in DENSITIES:
        den = make_density(name, 1)
        mass = float(np.sum(den.pdf(xs[:, None])) * 2.0 ** -14)
        assert abs(mass - 1.0) < 1e-6


def test_cdf_matches_pdf():
    xs = np.linspace(0.01, 0.99, 23)
    for name in DENSITIES:
        den = make_density(name, 1)
        eps = 1e-6
        deriv = (den.cdf1(xs + eps) - den.cdf1(xs - eps)) / (2 * eps)
        pdf = den.pdf(xs[:, None])
        assert np.max(np.abs(deriv - pdf)) < 1e-4


def test_box_prob_consistency():
    den = make_density("trunc_gauss_mix", 2)
    p = den.box_prob([0.2, 0.3], [0.6, 0.9])
    q = ((den.cdf1(0.6) - den.cdf1(0.2)) * (den.cdf1(0.9) - den.cdf1(0.3)))
    # mixture does not factor across coordinates component-wise; compare
    # against the explicit component sum instead
    direct = 0.0
    for w, m in den.components:
        direct += w * float((m.cdf(0.6) - m.cdf(0.2)) * (m.cdf(0.9) - m.cdf(0.3)))
    assert abs(p - direct) < 1e-14
    assert isinstance(q, float) or q.shape == ()


def test_box_prob_grid_matches_scalar():
    den = make_density("cosine_bump", 2)
    axes = [np.linspace(0.1, 0.5, 5), np.linspace(0.2, 0.6, 4)]
    hi = np.array([0.8, 0.9])
    grid = den.box_prob_grid(axes, hi)
    assert grid.shape == (5, 4)
    for i in range(5):
        for k in range(4):
            scalar = den.box_prob([axes[0][i], axes[1][k]], hi)
            assert abs(grid[i, k] - scalar) < 1e-14


def test_empirical_frequencies_match_pdf():
    den = make_density("trunc_gauss_mix", 1)
    pts = draw(den, SeedSpec(9), 200_000)[:, 0]
    hist, edges = np.histogram(pts, bins=32, range=(0.0, 1.0), density=True)
    mids = 0.5 * (edges[:-1] + edges[1:])
    cell_avg = np.array([den.box_prob([lo], [hi]) for lo, hi in
                         zip(edges[:-1], edges[1:])]) * 32
    assert np.max(np.abs(hist - cell_avg)) < 0.06


def test_sup_on():
    uni = make_density("uniform01", 1)
    assert uni.sup_on(((0.25,), (0.75,))) == 1.0
    cos = make_density("cosine_bump", 1)
    assert abs(cos.sup_on(((0.0,), (1.0,))) - 1.5) < 1e-9
    assert abs(cos.sup_on(((0.25,), (0.75,))) - 1.0) < 1e-9


def test_make_density_errors():
    with pytest.raises(ConfigurationError):
        make_density("gaussian", 1)
    with pytest.raises(ConfigurationError):
        make_density("uniform01", 0)


def test_draw_errors():
    with pytest.raises(ValueError):
        draw(make_density("uniform01", 1), SeedSpec(0), 0)


def test_density_pdf_shapes():
    den = make_density("cosine_bump", 2)
    single = den.pdf(np.array([0.5, 0.5]))
    assert isinstance(single, float)
    batch = den.pdf(np.full((7, 2), 0.5))
    assert batch.shape == (7,)
    assert abs(batch[0] - single) < 1e-15
