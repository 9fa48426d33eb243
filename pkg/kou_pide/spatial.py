import numpy as np
import scipy.sparse as sp
from dataclasses import dataclass
from typing import Dict, Tuple
from .grid import Grid1D, Grid2D
from .model import KouParams

Bands = Tuple[np.ndarray, np.ndarray, np.ndarray]


def _check_widths(h0: np.ndarray, h1: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    h0, h1 = np.asarray(h0, dtype=np.float64), np.asarray(h1, dtype=np.float64)
    if np.any(h0 <= 0) or np.any(h1 <= 0):
        raise ValueError('Mesh widths have to be positive')
    return h0, h1


def fd_weights_first(h0: np.ndarray, h1: np.ndarray) -> Bands:
    """
    Gets the weights `(w_-1, w_0, w_1)` of the second-order central approximation of the first derivative at a point
    whose left and right mesh widths are `h0` and `h1`.
    """
    h0, h1 = _check_widths(h0, h1)
    return -h1 / (h0 * (h0 + h1)), (h1 - h0) / (h0 * h1), h0 / (h1 * (h0 + h1))


def fd_weights_second(h0: np.ndarray, h1: np.ndarray) -> Bands:
    """
    Gets the weights `(w_-1, w_0, w_1)` of the second-order central approximation of the second derivative at a point
    whose left and right mesh widths are `h0` and `h1`.
    """
    h0, h1 = _check_widths(h0, h1)
    return 2. / (h0 * (h0 + h1)), -2. / (h0 * h1), 2. / (h1 * (h0 + h1))


def first_derivative_bands(g: Grid1D) -> Bands:
    """
    Gets the bands `(lower, diag, upper)` of the first derivative matrix: central in the interior, a zero row at `s=0`
    and the first-order backward difference at `s=S_max`. `lower[i]` multiplies `u[i-1]` and `upper[i]` multiplies
    `u[i+1]` in row `i`.
    """
    m, h = g.m, g.h
    lower, diag, upper = np.zeros(m + 1), np.zeros(m + 1), np.zeros(m + 1)
    lower[1:m], diag[1:m], upper[1:m] = fd_weights_first(h[:-1], h[1:])
    lower[m], diag[m] = -1. / h[-1], 1. / h[-1]
    return lower, diag, upper


def second_derivative_bands(g: Grid1D) -> Bands:
    """
    Gets the bands of the second derivative matrix: central in the interior and zero rows at both boundaries, the last
    one due to the linear boundary condition at `s=S_max`.
    """
    m, h = g.m, g.h
    lower, diag, upper = np.zeros(m + 1), np.zeros(m + 1), np.zeros(m + 1)
    lower[1:m], diag[1:m], upper[1:m] = fd_weights_second(h[:-1], h[1:])
    return lower, diag, upper


def derivative_bands(g: Grid1D, order: int, one_sided: bool = False) -> Bands:
    """
    Gets the bands of the first or second derivative matrix. With `one_sided`, the first derivative uses the
    first-order forward and backward differences at `s=0` and `s=S_max` instead of the rows of the pricing operator.
    """
    if order == 2:
        return second_derivative_bands(g)
    if order != 1:
        raise ValueError(f'Derivative order has to be 1 or 2, got {order}')
    lower, diag, upper = first_derivative_bands(g)
    if one_sided:
        diag[0], upper[0] = -1. / g.h[0], 1. / g.h[0]
    return lower, diag, upper


def apply_bands(bands: Bands, v: np.ndarray, axis: int) -> np.ndarray:
    """
    Applies a tridiagonal matrix given by its bands along the given axis of a grid function.
    """
    lower, diag, upper = bands
    w = np.moveaxis(v, axis, 0)
    shape = (-1,) + (1,) * (w.ndim - 1)
    out = diag.reshape(shape) * w
    out[1:] += lower[1:].reshape(shape) * w[:-1]
    out[:-1] += upper[:-1].reshape(shape) * w[1:]
    return np.moveaxis(out, 0, axis)


def bands_to_sparse(bands: Bands) -> sp.csr_matrix:
    lower, diag, upper = bands
    return sp.diags([lower[1:], diag, upper[:-1]], offsets=[-1, 0, 1], format='csr')


@dataclass(frozen=True, eq=False)
class TriDiagOp(object):
    """
    A tridiagonal operator acting along one axis of a grid function.
    """
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    axis: int

    @property
    def bands(self) -> Bands:
        return self.lower, self.diag, self.upper

    def apply(self, v: np.ndarray) -> np.ndarray:
        return apply_bands(self.bands, v, self.axis)

    def to_sparse(self) -> sp.csr_matrix:
        """The `(m+1) x (m+1)` matrix of this operator in its own direction."""
        return bands_to_sparse(self.bands)


@dataclass(frozen=True, eq=False)
class MixedOp(object):
    """
    The mixed derivative operator in factored form, `coef * (X2 D2) (x) (X1 D1)`, with `X_k D_k` the first derivative
    scaled by the asset price in direction `k`.
    """
    d1: TriDiagOp
    d2: TriDiagOp
    coef: float

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.coef * self.d1.apply(self.d2.apply(v))

    def to_sparse(self) -> sp.csr_matrix:
        return (self.coef * sp.kron(self.d2.to_sparse(), self.d1.to_sparse())).tocsr()


@dataclass(frozen=True, eq=False)
class SpatialOperators(object):
    """
    The semidiscrete convection-diffusion-reaction operator `A_D = A_M + A_1 + A_2`, applied matrix-free.
    """
    grid: Grid2D
    mixed: MixedOp
    a1: TriDiagOp
    a2: TriDiagOp

    def apply_mixed(self, v: np.ndarray) -> np.ndarray:
        return self.mixed.apply(v)

    def apply_1(self, v: np.ndarray) -> np.ndarray:
        return self.a1.apply(v)

    def apply_2(self, v: np.ndarray) -> np.ndarray:
        return self.a2.apply(v)

    def apply_AD(self, v: np.ndarray) -> np.ndarray:
        assert v.shape == self.grid.shape, f'Grid function shape {v.shape} does not match grid {self.grid.shape}'
        return self.mixed.apply(v) + self.a1.apply(v) + self.a2.apply(v)

    def to_sparse(self) -> Dict[str, sp.csr_matrix]:
        """
        Assembles the operators as sparse matrices acting on lexicographic vectors (see `Grid2D.flatten`).
        :rtype: dict[str, sp.csr_matrix]
        :return: the matrices, keyed by `mixed`, `a1`, `a2` and `AD`.
        """
        i1 = sp.identity(self.grid.m1 + 1, format='csr')
        i2 = sp.identity(self.grid.m2 + 1, format='csr')
        mats = {
            'mixed': self.mixed.to_sparse(),
            'a1': sp.kron(i2, self.a1.to_sparse(), format='csr'),
            'a2': sp.kron(self.a2.to_sparse(), i1, format='csr'),
        }
        mats['AD'] = (mats['mixed'] + mats['a1'] + mats['a2']).tocsr()
        return mats


def _direction_operator(g: Grid1D, sigma: float, drift: float, reaction: float, axis: int) -> TriDiagOp:
    s = g.s
    d1, d2 = first_derivative_bands(g), second_derivative_bands(g)
    bands = [0.5 * sigma ** 2 * s ** 2 * b2 + drift * s * b1 for b1, b2 in zip(d1, d2)]
    bands[1] = bands[1] - 0.5 * reaction
    return TriDiagOp(bands[0], bands[1], bands[2], axis)


def _scaled_first_derivative(g: Grid1D, axis: int) -> TriDiagOp:
    lower, diag, upper = first_derivative_bands(g)
    return TriDiagOp(g.s * lower, g.s * diag, g.s * upper, axis)


def assemble_operators(grid: Grid2D, params: KouParams) -> SpatialOperators:
    """
    Assembles the mixed derivative operator and the two directional operators, with the reaction term distributed
    evenly across the directional ones.
    :param Grid2D grid: the spatial grid.
    :param KouParams params: the model parameters.
    :rtype: SpatialOperators
    :return: the assembled operators.
    """
    reaction = params.r + params.lam
    a1 = _direction_operator(grid.g1, params.sigma1, params.r - params.lam * params.kappa1, reaction, axis=0)
    a2 = _direction_operator(grid.g2, params.sigma2, params.r - params.lam * params.kappa2, reaction, axis=1)
    mixed = MixedOp(_scaled_first_derivative(grid.g1, axis=0), _scaled_first_derivative(grid.g2, axis=1),
                    params.rho * params.sigma1 * params.sigma2)
    return SpatialOperators(grid, mixed, a1, a2)


def apply_AD(ops: SpatialOperators, v: np.ndarray) -> np.ndarray:
    return ops.apply_AD(v)
