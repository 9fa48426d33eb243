"""
Evaluation of the nonlocal jump integral on the full spatial grid in O(m1*m2) operations.

The integrand is split over the four quadrants around each grid point, `nu = 1..4` for (down, down), (up, down),
(down, up) and (up, up) jumps of (asset 1, asset 2). On every cell the grid function is replaced by its bilinear
interpolant, whose weighted cell integrals `G[nu, k, l]` only depend on the four corner values. The integral at a grid
point is then a prefactor times a double cumulative (prefix or suffix) sum of these cell integrals. The bilinear
weights factor into one-dimensional linear interpolation weights per direction, which are also the weights of the
one-dimensional integrals on the zero boundaries.
"""
import logging
import time
import numpy as np
import pandas as pd
from dataclasses import dataclass
from typing import Sequence, Tuple, List
from . import M_STR, SECONDS_STR
from .grid import Grid1D, Grid2D, build_grid
from .model import KouParams

ACCUM_DTYPE = np.longdouble
NU_NAMES = ('down-down', 'up-down', 'down-up', 'up-up')


def power_integrals(s: np.ndarray, e: float) -> np.ndarray:
    """
    Gets `Z[a, k-1] = int_{s_{k-1}}^{s_k} z^(a+e-1) dz` for `a = 0, 1` and each cell `k = 1..m`. For negative `e` the
    integrals over the first cell diverge and are set to zero: they are never used.
    :param np.ndarray s: the mesh points.
    :param float e: the exponent, `eta_q` for downward jumps and `-eta_p` for upward ones.
    :rtype: np.ndarray
    :return: array of shape `(2, m)`.
    """
    z = np.zeros((2, len(s) - 1))
    for a in (0, 1):
        ex = a + e
        assert ex != 0, 'Exponent of the power integral has to be nonzero'
        if e > 0:
            p = s ** ex
            z[a] = (p[1:] - p[:-1]) / ex
        else:
            p = s[1:] ** ex
            z[a, 1:] = (p[1:] - p[:-1]) / ex
    return z


def interpolation_factors(s: np.ndarray, e: float) -> np.ndarray:
    """
    Gets the weights `g[a, k-1]` such that `int_{s_{k-1}}^{s_k} z^(e-1) u(z) dz ~ g[0] u_{k-1} + g[1] u_k` for the
    linear interpolant of `u` on each cell.
    :param np.ndarray s: the mesh points.
    :param float e: the exponent, `eta_q` for downward jumps and `-eta_p` for upward ones.
    :rtype: np.ndarray
    :return: array of shape `(2, m)`.
    """
    z = power_integrals(s, e)
    ds = np.diff(s)
    return np.stack([(s[1:] * z[0] - z[1]) / ds, (-s[:-1] * z[0] + z[1]) / ds])


def prefactor(s: np.ndarray, prob: float, eta: float, e: float) -> np.ndarray:
    """
    Gets `prob * eta * s^(-e)` at each mesh point, zero at `s=0`.
    """
    out = np.zeros_like(s)
    out[1:] = prob * eta * s[1:] ** (-e)
    return out


@dataclass(frozen=True, eq=False)
class DirectionCoeffs(object):
    """
    Coefficients of the jump integral along one direction: interpolation factors and prefactors for downward (`q`)
    and upward (`p`) jumps.
    """
    gq: np.ndarray  # (2, m)
    gp: np.ndarray  # (2, m)
    aq: np.ndarray  # (m+1,)
    ap: np.ndarray  # (m+1,)


@dataclass(frozen=True, eq=False)
class JumpCoeffs(object):
    """
    All time-independent coefficients needed to evaluate the jump integral on a grid.
    """
    grid: Grid2D
    lam: float
    dir1: DirectionCoeffs
    dir2: DirectionCoeffs

    @property
    def shape(self) -> Tuple[int, int]:
        return self.grid.shape

    def _factors(self, nu: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        assert 1 <= nu <= 4, f'Quadrant index has to be in 1..4, got {nu}'
        g1 = self.dir1.gq if nu in (1, 3) else self.dir1.gp
        g2 = self.dir2.gq if nu in (1, 2) else self.dir2.gp
        a1 = self.dir1.aq if nu in (1, 3) else self.dir1.ap
        a2 = self.dir2.aq if nu in (1, 2) else self.dir2.ap
        return g1, g2, a1, a2

    def gamma(self, nu: int) -> np.ndarray:
        """
        Materializes the bilinear weights of quadrant `nu`.
        :rtype: np.ndarray
        :return: array of shape `(2, 2, m1, m2)` with `[a, b, k-1, l-1]` the weight of `v[k-1+a, l-1+b]` in the
        weighted integral over cell `(k, l)`.
        """
        g1, g2, _, _ = self._factors(nu)
        return g1[:, None, :, None] * g2[None, :, None, :]

    def psi(self, nu: int) -> np.ndarray:
        """The prefactors of quadrant `nu` on the grid, shape `(m1+1, m2+1)`, zero on the zero boundaries."""
        _, _, a1, a2 = self._factors(nu)
        return self.lam * np.outer(a1, a2)


def _direction_coeffs(g: Grid1D, p: float, eta_p: float, eta_q: float) -> DirectionCoeffs:
    return DirectionCoeffs(gq=interpolation_factors(g.s, eta_q),
                           gp=interpolation_factors(g.s, -eta_p),
                           aq=prefactor(g.s, 1 - p, eta_q, eta_q),
                           ap=prefactor(g.s, p, eta_p, -eta_p))


def precompute(grid: Grid2D, params: KouParams) -> JumpCoeffs:
    """
    Computes the coefficients of the jump integral for the given grid and parameters.
    :param Grid2D grid: the spatial grid.
    :param KouParams params: the model parameters.
    :rtype: JumpCoeffs
    :return: the coefficients.
    """
    if params.eta_p1 <= 1 or params.eta_p2 <= 1:
        raise ValueError(f'Upward jump rates have to be greater than 1, got {params.eta_p1}, {params.eta_p2}')
    return JumpCoeffs(grid=grid, lam=params.lam,
                      dir1=_direction_coeffs(grid.g1, params.p1, params.eta_p1, params.eta_q1),
                      dir2=_direction_coeffs(grid.g2, params.p2, params.eta_p2, params.eta_q2))


def _prefix(a: np.ndarray, axis: int) -> np.ndarray:
    # sum over cells 1..i, for i = 1..m
    return np.cumsum(a, axis=axis)


def _suffix(a: np.ndarray, axis: int) -> np.ndarray:
    # sum over cells i+1..m, for i = 1..m (empty for i = m)
    rev = np.flip(np.cumsum(np.flip(a, axis=axis), axis=axis), axis=axis)
    zero = np.zeros_like(np.take(rev, [0], axis=axis))
    return np.concatenate([np.take(rev, np.arange(1, rev.shape[axis]), axis=axis), zero], axis=axis)


def _line_interpolate(g: np.ndarray, u: np.ndarray, axis: int) -> np.ndarray:
    # g[0, k-1] * u_{k-1} + g[1, k-1] * u_k along the given axis
    u = np.moveaxis(u, axis, 0)
    shape = (-1,) + (1,) * (u.ndim - 1)
    out = g[0].reshape(shape) * u[:-1] + g[1].reshape(shape) * u[1:]
    return np.moveaxis(out, 0, axis)


def _boundary_line(c: DirectionCoeffs, u: np.ndarray, lam: float) -> np.ndarray:
    # one-dimensional integral at the points s_i > 0 of a zero boundary, given the values u along it
    gq = _line_interpolate(c.gq, u, 0).astype(ACCUM_DTYPE)
    gp = _line_interpolate(c.gp, u, 0).astype(ACCUM_DTYPE)
    return lam * (c.aq[1:] * _prefix(gq, 0) + c.ap[1:] * _suffix(gp, 0))


def apply_jump(coeffs: JumpCoeffs, v: np.ndarray) -> np.ndarray:
    """
    Evaluates the jump integral of the given grid function at every grid point.
    :param JumpCoeffs coeffs: the precomputed coefficients.
    :param np.ndarray v: the grid function, shape `(m1+1, m2+1)`.
    :rtype: np.ndarray
    :return: the grid function with the integral values.
    """
    if v.shape != coeffs.shape:
        raise ValueError(f'Grid function shape {v.shape} does not match coefficients shape {coeffs.shape}')
    out = np.empty(coeffs.shape)
    c1, c2, lam = coeffs.dir1, coeffs.dir2, coeffs.lam

    # interpolate along direction 2 first, shared by the two quadrants with the same direction-2 jump sign
    w_q = _line_interpolate(c2.gq, v, 1)  # (m1+1, m2)
    w_p = _line_interpolate(c2.gp, v, 1)
    g = {1: _line_interpolate(c1.gq, w_q, 0), 2: _line_interpolate(c1.gp, w_q, 0),
         3: _line_interpolate(c1.gq, w_p, 0), 4: _line_interpolate(c1.gp, w_p, 0)}

    # running sums along direction 2 (l ascending) first, then direction 1, in extended precision
    j = (np.outer(c1.aq[1:], c2.aq[1:]) * _prefix(_prefix(g[1].astype(ACCUM_DTYPE), 1), 0) +
         np.outer(c1.ap[1:], c2.aq[1:]) * _suffix(_prefix(g[2].astype(ACCUM_DTYPE), 1), 0) +
         np.outer(c1.aq[1:], c2.ap[1:]) * _prefix(_suffix(g[3].astype(ACCUM_DTYPE), 1), 0) +
         np.outer(c1.ap[1:], c2.ap[1:]) * _suffix(_suffix(g[4].astype(ACCUM_DTYPE), 1), 0))
    out[1:, 1:] = lam * j

    out[1:, 0] = _boundary_line(c1, v[:, 0], lam)
    out[0, 1:] = _boundary_line(c2, v[0, :], lam)
    out[0, 0] = lam * v[0, 0]
    return out


def apply_jump_naive(coeffs: JumpCoeffs, v: np.ndarray) -> np.ndarray:
    """
    Evaluates the jump integral by summing the cell integrals directly for every grid point, at
    O((m1*m2)^2) cost. Meant as a reference for `apply_jump` on small grids.
    """
    if v.shape != coeffs.shape:
        raise ValueError(f'Grid function shape {v.shape} does not match coefficients shape {coeffs.shape}')
    m1, m2 = coeffs.grid.m1, coeffs.grid.m2
    corners = np.stack([np.stack([v[:-1, :-1], v[:-1, 1:]]), np.stack([v[1:, :-1], v[1:, 1:]])])  # [a, b]
    cells = {nu: np.sum(coeffs.gamma(nu) * corners, axis=(0, 1)) for nu in range(1, 5)}
    psi = {nu: coeffs.psi(nu) for nu in range(1, 5)}
    lam = coeffs.lam

    out = np.zeros(coeffs.shape)
    for i in range(1, m1 + 1):
        for j in range(1, m2 + 1):
            out[i, j] = (psi[1][i, j] * np.sum(cells[1][:i, :j]) +
                         psi[2][i, j] * np.sum(cells[2][i:, :j]) +
                         psi[3][i, j] * np.sum(cells[3][:i, j:]) +
                         psi[4][i, j] * np.sum(cells[4][i:, j:]))

    for c, u, m, idx in ((coeffs.dir1, v[:, 0], m1, lambda k: (k, 0)), (coeffs.dir2, v[0, :], m2, lambda k: (0, k))):
        gq = c.gq[0] * u[:-1] + c.gq[1] * u[1:]
        gp = c.gp[0] * u[:-1] + c.gp[1] * u[1:]
        for i in range(1, m + 1):
            out[idx(i)] = lam * (c.aq[i] * np.sum(gq[:i]) + c.ap[i] * np.sum(gp[i:]))
    out[0, 0] = lam * v[0, 0]
    return out


def benchmark(params: KouParams, ms: Sequence[int], repeats: int = 5, d: float = None) -> pd.DataFrame:
    """
    Measures the wall time of one evaluation of the jump integral on `m x m` grids.
    :param KouParams params: the model parameters.
    :param list[int] ms: the grid sizes.
    :param int repeats: the number of timed evaluations per grid size, the minimum is reported.
    :param float d: the mesh stretch parameter.
    :rtype: pd.DataFrame
    :return: a dataframe with columns `m` and `seconds`.
    """
    records: List[dict] = []
    rng = np.random.default_rng(0)
    for m in ms:
        grid = build_grid(m, m, params, d)
        coeffs = precompute(grid, params)
        v = rng.random(grid.shape)
        apply_jump(coeffs, v)  # warm-up
        times = []
        for _ in range(repeats):
            start = time.perf_counter()
            apply_jump(coeffs, v)
            times.append(time.perf_counter() - start)
        records.append({M_STR: m, SECONDS_STR: min(times)})
        logging.info(f'Jump integral, m={m}: {min(times):.3e}s')
    return pd.DataFrame.from_records(records, columns=[M_STR, SECONDS_STR])
