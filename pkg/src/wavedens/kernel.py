"""Projection kernel K, its dyadic rescalings and localized sections.

K(x, y) = sum_k phi(x - k) phi(y - k) with phi a tensor-product scaling
function, so the d-dimensional kernel factors into univariate kernels.
The localized section Ktilde(s) = K(z, z + s) with z = 2^j x is sampled
on a uniform corner lattice over the domain box [-W, W]^d, W = support
width of phi.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .basis import ScalingFunction, eval_phi
from .errors import ConfigurationError


@dataclass(frozen=True)
class ProjectionKernel:
    basis: ScalingFunction
    dimension: int = 1

    def __post_init__(self):
        if self.dimension < 1:
            raise ConfigurationError("dimension must be >= 1")

    @property
    def domain_halfwidth(self) -> float:
        """Half-width W of the box containing supp Ktilde per coordinate."""
        return float(self.basis.width)


def _kernel1(sf: ScalingFunction, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Univariate K(x, y); x and y broadcast to a common shape."""
    a, b = sf.support
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    out = np.zeros(x.shape)
    k0 = np.ceil(np.maximum(x, y) - b)
    # shared shifts k satisfy max(x,y)-b <= k <= min(x,y)-a
    for off in range(int(b - a) + 1):
        k = k0 + off
        out += eval_phi(sf, x - k) * eval_phi(sf, y - k)
    return out


def kernel_K(pk: ProjectionKernel, x, y) -> float:
    """K(x, y) for points x, y in R^d (finite sum by compact support)."""
    x = np.atleast_1d(np.asarray(x, float))
    y = np.atleast_1d(np.asarray(y, float))
    return float(np.prod(_kernel1(pk.basis, x, y)))


def kernel_K_batch(pk: ProjectionKernel, x, y) -> np.ndarray:
    """Vectorized K over batches of points with shape (..., d)."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    return np.prod(_kernel1(pk.basis, x, y), axis=-1)


def kernel_Kj(pk: ProjectionKernel, j: int, x, y) -> float:
    """Rescaled kernel K_j(x, y) = 2^(dj) K(2^j x, 2^j y)."""
    if j < 0:
        raise ConfigurationError("level j must be >= 0")
    scale = 2.0 ** j
    x = np.atleast_1d(np.asarray(x, float))
    d = x.size
    return float(2.0 ** (d * j) * kernel_K(pk, scale * x, scale * np.atleast_1d(y)))


def kernel_Kj_batch(pk: ProjectionKernel, j: int, x, y) -> np.ndarray:
    x = np.asarray(x, float)
    d = x.shape[-1]
    scale = 2.0 ** j
    return 2.0 ** (d * j) * kernel_K_batch(pk, scale * x, scale * np.asarray(y, float))


@dataclass(frozen=True)
class LocalizedKernel:
    """Ktilde_{j,x} sampled on a uniform corner lattice over [-W, W]^d.

    `axes` holds the per-coordinate corner values (length m + 1 each);
    `values` has shape (m+1,) * d.  `sigma` is the grid L2 norm computed
    by the lower-corner cell rule, `tv` the total variation (d = 1 only,
    NaN otherwise).
    """

    center: np.ndarray = field(repr=False)
    level: int
    axes: tuple = field(repr=False)
    values: np.ndarray = field(repr=False)
    step: float
    sigma: float
    tv: float

    @property
    def dimension(self) -> int:
        return self.values.ndim

    @property
    def cell_volume(self) -> float:
        return self.step ** self.dimension

    def cell_values(self) -> np.ndarray:
        """Ktilde at the lower corner of each grid cell."""
        sl = (slice(0, -1),) * self.dimension
        return self.values[sl]

    def integral(self) -> float:
        """Lower-corner rule integral of Ktilde over the domain box."""
        return float(self.cell_values().sum() * self.cell_volume)


def localize(pk: ProjectionKernel, j: int, x, grid_step: float) -> LocalizedKernel:
    """Sample Ktilde_{j,x}(s) = K(2^j x, 2^j x + s) over [-W, W]^d.

    The grid step must divide 2W so that cells tile the domain box
    (cell alignment keeps Haar discontinuities on grid lines).
    """
    if grid_step <= 0:
        raise ConfigurationError("grid_step must be positive")
    d = pk.dimension
    x = np.atleast_1d(np.asarray(x, float))
    if x.size != d:
        raise ConfigurationError(f"center has {x.size} coordinates, kernel is {d}-dimensional")
    w = pk.domain_halfwidth
    m = 2.0 * w / grid_step
    if abs(m - round(m)) > 1e-9 or round(m) < 2:
        raise ConfigurationError("grid_step must evenly divide the domain box width")
    m = int(round(m))
    ax = -w + grid_step * np.arange(m + 1)
    z = (2.0 ** j) * x
    grids = np.meshgrid(*([ax] * d), indexing="ij")
    s = np.stack([g.ravel() for g in grids], axis=-1)
    vals = kernel_K_batch(pk, z, z + s).reshape((m + 1,) * d)
    cell_vol = grid_step ** d
    lower = vals[(slice(0, -1),) * d]
    sigma = float(np.sqrt(np.sum(lower ** 2) * cell_vol))
    if d == 1:
        tv = float(np.sum(np.abs(np.diff(vals))) + abs(vals[0]) + abs(vals[-1]))
    else:
        tv = float("nan")
    return LocalizedKernel(center=x.copy(), level=j, axes=(ax,) * d,
                           values=vals, step=grid_step, sigma=sigma, tv=tv)


def cell_lower_corners(lk: LocalizedKernel) -> np.ndarray:
    """Lower-corner coordinates of each grid cell, shape (n_cells, d)."""
    d = lk.dimension
    axes = [a[:-1] for a in lk.axes]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def dyadic_centers(pk: ProjectionKernel, j: int, count: int, seed: int = 0):
    """Random centers x with 2^j x integer, for invariance checks."""
    rng = np.random.default_rng(seed)
    ints = rng.integers(-(1 << j), 1 << j, size=(count, pk.dimension))
    return ints / (1 << j)


def tensor_product(*arrays) -> np.ndarray:
    out = arrays[0]
    for a in arrays[1:]:
        out = np.multiply.outer(out, a)
    return out
