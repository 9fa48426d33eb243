import logging
import numpy as np
from dataclasses import dataclass
from typing import Optional, Tuple
from .model import KouParams, payoff


@dataclass(frozen=True, eq=False)
class Grid1D(object):
    """
    A nonuniform mesh `0 = s_0 < s_1 < ... < s_m = S_max` that is uniform inside `[0, 2K]`.
    """
    s: np.ndarray
    K: float
    S_max: float
    d: float

    @property
    def m(self) -> int:
        return len(self.s) - 1

    @property
    def h(self) -> np.ndarray:
        """Mesh widths `h_i = s_i - s_{i-1}`, `i = 1..m`, shape `(m,)`."""
        return np.diff(self.s)

    @property
    def mid(self) -> np.ndarray:
        """Cell midpoints `s_{-1/2}, s_{1/2}, ..., s_{m+1/2}`, shape `(m+2,)`."""
        half = 0.5 * (self.s[:-1] + self.s[1:])
        return np.concatenate([[-half[0]], half, [self.S_max]])

    @property
    def mid_widths(self) -> np.ndarray:
        """Midpoint widths `h_{l+1/2} = s_{l+1/2} - s_{l-1/2}`, `l = 0..m`, shape `(m+1,)`."""
        return np.diff(self.mid)


@dataclass(frozen=True, eq=False)
class Grid2D(object):
    """
    Tensor product of two meshes. Grid functions are stored as arrays `v[i, j]` of shape `(m1+1, m2+1)`; the
    lexicographic vector ordering, with the first asset index varying fastest, is given by `flatten`.
    """
    g1: Grid1D
    g2: Grid1D

    def __post_init__(self):
        assert self.g1.K == self.g2.K and self.g1.S_max == self.g2.S_max, \
            'Both meshes have to share the strike and the domain truncation'

    @property
    def m1(self) -> int:
        return self.g1.m

    @property
    def m2(self) -> int:
        return self.g2.m

    @property
    def shape(self) -> Tuple[int, int]:
        return self.g1.m + 1, self.g2.m + 1

    @property
    def size(self) -> int:
        return (self.g1.m + 1) * (self.g2.m + 1)

    @property
    def K(self) -> float:
        return self.g1.K

    @property
    def S_max(self) -> float:
        return self.g1.S_max

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Gets the arrays `(s1[i, j], s2[i, j])` of grid point coordinates."""
        return np.meshgrid(self.g1.s, self.g2.s, indexing='ij')

    def flatten(self, v: np.ndarray) -> np.ndarray:
        """Converts a grid function `v[i, j]` into the vector with entry `i + j*(m1+1)`."""
        assert v.shape == self.shape, f'Grid function shape {v.shape} does not match grid shape {self.shape}'
        return np.ravel(v, order='F')

    def unflatten(self, x: np.ndarray) -> np.ndarray:
        """Converts a lexicographic vector into a grid function `v[i, j]`."""
        assert x.shape == (self.size,), f'Vector shape {x.shape} does not match grid size {self.size}'
        return np.reshape(x, self.shape, order='F')


def stretch_bounds(K: float, S_max: float, d: float) -> Tuple[float, float]:
    """
    Gets the bounds `(xi_int, xi_max)` of the artificial uniform grid mapped onto `[0, 2K]` and `[0, S_max]`.
    """
    xi_int = 2 * K / d
    if S_max / d - xi_int <= 0:
        raise ValueError(f'S_max/d={S_max / d} has to be greater than 2K/d={xi_int}, no stretched region exists')
    return xi_int, xi_int + np.arcsinh(S_max / d - xi_int)


def transform(xi: np.ndarray, K: float, d: float) -> np.ndarray:
    """
    The smooth transformation from the artificial uniform coordinate to asset prices: linear up to `2K`, sinh beyond.
    """
    xi = np.asarray(xi, dtype=np.float64)
    xi_int = 2 * K / d
    return np.where(xi <= xi_int, d * xi, 2 * K + d * np.sinh(np.maximum(xi - xi_int, 0.)))


def build_mesh(m: int, K: float, S_max: float, d: Optional[float] = None) -> Grid1D:
    """
    Builds a nonuniform mesh by a smooth transformation of a uniform grid, placing relatively many points in `[0, 2K]`.
    :param int m: the number of cells, at least 2.
    :param float K: the strike.
    :param float S_max: the domain truncation, greater than `2K`.
    :param float d: the stretch parameter controlling the fraction of points inside `[0, 2K]`, `K/10` by default.
    :rtype: Grid1D
    :return: the mesh.
    """
    if m < 2:
        raise ValueError(f'Number of cells has to be at least 2, got {m}')
    d = K / 10. if d is None else d
    if d <= 0:
        raise ValueError(f'Stretch parameter d has to be positive, got {d}')
    _, xi_max = stretch_bounds(K, S_max, d)
    s = transform(np.linspace(0., xi_max, m + 1), K, d)
    s[0] = 0.
    s[-1] = S_max  # exact in exact arithmetic
    if np.any(np.diff(s) <= 0):
        raise ValueError(f'Mesh is not strictly increasing for m={m}, K={K}, S_max={S_max}, d={d}')
    return Grid1D(s=s, K=float(K), S_max=float(S_max), d=float(d))


def build_grid(m1: int, m2: int, params: KouParams, d: Optional[float] = None) -> Grid2D:
    """
    Builds the two-dimensional grid for the given parameters.
    """
    grid = Grid2D(build_mesh(m1, params.K, params.S_max, d), build_mesh(m2, params.K, params.S_max, d))
    logging.debug(f'Built {m1}x{m2} grid on [0,{params.S_max}]^2, '
                  f'{np.sum(grid.g1.s <= 2 * params.K)}x{np.sum(grid.g2.s <= 2 * params.K)} points in [0,2K]^2')
    return grid


def _third_antiderivative(t: np.ndarray) -> np.ndarray:
    return np.maximum(t, 0.) ** 3 / 6.


def cell_average_payoff(grid: Grid2D, params: KouParams) -> np.ndarray:
    """
    Gets the initial grid function: the payoff evaluated pointwise except on cells around grid points that straddle the
    line `s1 + s2 = 2K`, where the exact cell average of the payoff is used instead.
    :param Grid2D grid: the spatial grid.
    :param KouParams params: the model parameters (only the strike is used).
    :rtype: np.ndarray
    :return: the initial values `v[i, j]`.
    """
    K = params.K
    s1, s2 = grid.mesh()
    v = payoff(s1, s2, K)

    mid1, mid2 = grid.g1.mid, grid.g2.mid
    a1, b1 = np.meshgrid(mid1[:-1], mid2[:-1], indexing='ij')
    c1, c2 = np.meshgrid(mid1[1:], mid2[1:], indexing='ij')
    straddle = (a1 + b1 < 2 * K) & (c1 + c2 > 2 * K)

    # the payoff is (2K - s1 - s2)_+ / 2, whose integral over a rectangle is a signed sum of the third antiderivative
    # of the ramp over the four corners; all arguments are bounded by the cell size on straddling cells
    lo1, lo2, hi1, hi2 = a1[straddle], b1[straddle], c1[straddle], c2[straddle]
    L = 2 * K
    integral = (_third_antiderivative(L - lo1 - lo2) - _third_antiderivative(L - hi1 - lo2) -
                _third_antiderivative(L - lo1 - hi2) + _third_antiderivative(L - hi1 - hi2))
    area = (hi1 - lo1) * (hi2 - lo2)
    v[straddle] = 0.5 * integral / area
    logging.debug(f'Cell averaging applied at {np.sum(straddle)} grid points')
    return v
