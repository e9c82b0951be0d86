"""Empirical-process increments and the Stieltjes functionals linking them
to the estimator's deviation.

Increment functions are stored on the same corner lattice as the localized
kernel, as box functionals g(s) = mu([s, top]) of a signed measure mu; the
functional theta integrates them against dKtilde via the grid cell
densities.  Where exact atom positions are available (fitted samples) the
Stieltjes integral is evaluated at the atoms, which keeps the algebraic
identity with the estimator exact instead of grid-limited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import ScalingFunction
from .errors import ConfigurationError
from .estimator import evaluate_kernel_form, expected_estimator
from .kernel import LocalizedKernel, ProjectionKernel, kernel_K_batch
from .sampling import Density

DEFAULT_GRID_STEP = 2.0 ** -10


@dataclass(frozen=True)
class IncrementFunction:
    """A grid-discretized box functional s -> value([s, top])."""

    kind: str
    center: np.ndarray = field(repr=False)
    level: int
    bandwidth: float
    axes: tuple = field(repr=False)
    values: np.ndarray = field(repr=False)
    scale_meta: dict = field(default_factory=dict, repr=False)

    @property
    def dimension(self) -> int:
        return self.values.ndim

    @property
    def step(self) -> float:
        return float(self.axes[0][1] - self.axes[0][0])


def increment(sample, density: Density, x, h: float, s_box) -> float:
    """Empirical-process increment sqrt(n)(P_n - P) of the rescaled box.

    s_box = (s, u) with s <= u coordinatewise; points are rescaled by
    u_i = (X_i - x) / h^(1/d); the centering probability is analytic.
    """
    sample = np.asarray(sample, float)
    if sample.ndim == 1:
        sample = sample[:, None]
    n, d = sample.shape
    x = np.atleast_1d(np.asarray(x, float))
    s, u = (np.atleast_1d(np.asarray(v, float)) for v in s_box)
    if np.any(s > u):
        raise ValueError("degenerate box: lower corner above upper corner")
    scale = h ** (1.0 / d)
    z = (sample - x) / scale
    inside = np.all((z >= s) & (z <= u), axis=1)
    p = density.box_prob(x + s * scale, x + u * scale)
    return float(math.sqrt(n) * (inside.mean() - p))


def _corner_counts(u: np.ndarray, axes) -> np.ndarray:
    """Counts of points in [s, top] for every corner s of the lattice."""
    d = u.shape[1]
    edges = [np.asarray(ax, float) for ax in axes]
    hist, _ = np.histogramdd(u, bins=edges)
    rc = hist
    for ax in range(d):
        rc = np.flip(np.cumsum(np.flip(rc, ax), ax), ax)
    corners = np.zeros(tuple(len(e) for e in edges))
    corners[(slice(0, -1),) * d] = rc
    return corners


def _lattice(halfwidth: float, grid_step: float, d: int):
    m = 2.0 * halfwidth / grid_step
    if abs(m - round(m)) > 1e-9 or round(m) < 2:
        raise ConfigurationError("grid_step must evenly divide the domain box width")
    ax = -halfwidth + grid_step * np.arange(int(round(m)) + 1)
    return (ax,) * d


def g_n_x(sample, density: Density, x, j: int,
          halfwidth: float = 1.0, grid_step: float = DEFAULT_GRID_STEP) -> IncrementFunction:
    """LIL-normalized increment function over boxes [s, top]."""
    if j < 1:
        raise ValueError("level j must be >= 1 (log(1/h) = 0 at j = 0)")
    sample = np.asarray(sample, float)
    if sample.ndim == 1:
        sample = sample[:, None]
    n, d = sample.shape
    x = np.atleast_1d(np.asarray(x, float))
    fx = float(density.pdf(x))
    if fx <= 0.0:
        raise ValueError("f(x) must be positive")
    h = 2.0 ** (-d * j)
    scale = 2.0 ** -j
    axes = _lattice(halfwidth, grid_step, d)
    u = (sample - x) / scale
    counts = _corner_counts(u, axes)
    top = x + halfwidth * scale
    probs = density.box_prob_grid([x[i] + np.asarray(axes[i]) * scale for i in range(d)], top)
    denom = math.sqrt(2.0 * fx * h * math.log(1.0 / h))
    values = math.sqrt(n) * (counts / n - probs) / denom
    meta = {"f_x": fx, "n": n, "h": h,
            "atoms": u[np.all(np.abs(u) <= halfwidth, axis=1)],
            "denominator": denom}
    return IncrementFunction("gnx", x, j, h, axes, values, meta)


def g_tilde_n_x(sample, density: Density, x, j: int, c: float,
                halfwidth: float = 1.0, grid_step: float = DEFAULT_GRID_STEP) -> IncrementFunction:
    """Erdos-Renyi scaled counting functional (nonnegative, box-monotone)."""
    if c <= 0.0:
        raise ValueError("c must be positive")
    sample = np.asarray(sample, float)
    if sample.ndim == 1:
        sample = sample[:, None]
    n, d = sample.shape
    x = np.atleast_1d(np.asarray(x, float))
    fx = float(density.pdf(x))
    if fx <= 0.0:
        raise ValueError("f(x) must be positive")
    h = 2.0 ** (-d * j)
    axes = _lattice(halfwidth, grid_step, d)
    u = (sample - x) / (2.0 ** -j)
    counts = _corner_counts(u, axes)
    values = counts / (c * fx * n * h)
    meta = {"f_x": fx, "n": n, "h": h, "c": c}
    return IncrementFunction("gtilde", x, j, h, axes, values, meta)


def from_cell_density(kind: str, axes, gdot_cells: np.ndarray, meta=None) -> IncrementFunction:
    """Box-summation of a cell density: g(s) = sum over cells in [s, top]."""
    d = gdot_cells.ndim
    step = float(axes[0][1] - axes[0][0])
    vol = step ** d
    rc = gdot_cells * vol
    for ax in range(d):
        rc = np.flip(np.cumsum(np.flip(rc, ax), ax), ax)
    corners = np.zeros(tuple(len(a) for a in axes))
    corners[(slice(0, -1),) * d] = rc
    return IncrementFunction(kind, np.zeros(d), 0, 1.0, tuple(axes),
                             corners, dict(meta or {}))


def cell_density(g: IncrementFunction) -> np.ndarray:
    """Invert box summation: cell densities gdot with g(s) = int_[s,top] gdot."""
    d = g.dimension
    masses = g.values
    for ax in range(d):
        masses = -np.diff(masses, axis=ax)
    return masses / (g.step ** d)


def _resample_to(g: IncrementFunction, axes) -> np.ndarray:
    """Nearest-lower-grid-point resampling of g onto another corner lattice."""
    vals = g.values
    out = vals
    for ax in range(g.dimension):
        idx = np.searchsorted(np.asarray(g.axes[ax]), np.asarray(axes[ax]) + 1e-12, side="right") - 1
        if np.any(idx < 0) or np.any(idx >= vals.shape[ax]):
            raise ConfigurationError("increment grid does not cover the kernel grid")
        out = np.take(out, idx, axis=ax)
    return out


def theta(lk: LocalizedKernel, g: IncrementFunction, normalized: bool = True) -> float:
    """Stieltjes functional int g dKtilde via integration by parts.

    Computed as sum over cells of Ktilde(lower corner) * cell mass of g,
    where cell masses are the alternating corner differences (for d = 1:
    sum_m Ktilde(s_m)(g(s_m) - g(s_{m+1}))); divided by sigma when
    normalized.
    """
    same = (len(g.axes[0]) == len(lk.axes[0])
            and np.allclose(g.axes[0], lk.axes[0], atol=1e-12))
    vals = g.values if same else _resample_to(g, lk.axes)
    d = lk.dimension
    masses = vals
    for ax in range(d):
        masses = -np.diff(masses, axis=ax)
    total = float(np.sum(lk.cell_values() * masses))
    return total / lk.sigma if normalized else total


def relation_check(sample, density: Density, x, j: int, basis: ScalingFunction) -> float:
    """Residual of the pipeline identity tying the normalized estimator
    deviation to the Stieltjes integral of the increment function.

    Both sides are evaluated exactly: the left through the kernel form of
    fhat, the right through the atom representation of the increment
    measure, with a shared quadrature for the expectation term.  The
    identity holds for the unnormalized functional (no 1/sigma): the
    sigma-normalized variant fails by the factor sigma for bases with
    K(0,0) != 1, e.g. D4.
    """
    sample = np.asarray(sample, float)
    if sample.ndim == 1:
        sample = sample[:, None]
    n, d = sample.shape
    x = np.atleast_1d(np.asarray(x, float))
    fx = float(density.pdf(x))
    h = 2.0 ** (-d * j)
    log_term = math.log(1.0 / h)
    fhat = evaluate_kernel_form(basis, j, sample, x)
    efhat = expected_estimator(density, basis, j, x)
    lhs = math.sqrt(n * h / (2.0 * fx * log_term)) * (fhat - efhat)
    pk = ProjectionKernel(basis, d)
    z = (2.0 ** j) * x
    ktilde_at_atoms = kernel_K_batch(pk, np.broadcast_to(z, (n, d)),
                                     (2.0 ** j) * sample)
    rhs = (ktilde_at_atoms.sum() / math.sqrt(n) - math.sqrt(n) * h * efhat) \
        / math.sqrt(2.0 * fx * h * log_term)
    return abs(lhs - rhs)
