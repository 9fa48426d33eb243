import logging
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from dataclasses import dataclass
from typing import Optional
from .errors import SolverError
from .grid import Grid2D
from .spatial import TriDiagOp, SpatialOperators

PIVOT_TOL = 1e-300
LINEAR_SOLVERS = ('bicgstab', 'direct')


@dataclass
class SolverStats(object):
    """
    Counters of the linear solves performed during a run.
    """
    tri_solves: int = 0
    cn_solves: int = 0
    iterations: int = 0
    max_iterations: int = 0
    max_residual: float = 0.

    def summary(self) -> str:
        mean_it = self.iterations / self.cn_solves if self.cn_solves > 0 else 0.
        return (f'{self.tri_solves} tridiagonal solves, {self.cn_solves} CN solves '
                f'(mean {mean_it:.1f}, max {self.max_iterations} iterations, max residual {self.max_residual:.2e})')


@dataclass(frozen=True, eq=False)
class TriFactor(object):
    """
    LU factors, without pivoting, of `I - scale * op` for a tridiagonal operator: `L` is unit lower bidiagonal with
    subdiagonal `mult`, `U` is upper bidiagonal with diagonal `pivot` and superdiagonal `upper`.
    """
    mult: np.ndarray
    pivot: np.ndarray
    upper: np.ndarray
    axis: int
    scale: float

    def lu(self) -> np.ndarray:
        """The dense product `L U`, for checks on small grids."""
        n = len(self.pivot)
        lower = np.eye(n) + np.diag(self.mult[1:], -1)
        upper = np.diag(self.pivot) + np.diag(self.upper[:-1], 1)
        return lower @ upper


def tri_factor(op: TriDiagOp, scale: float) -> TriFactor:
    """
    Factors `I - scale * op` by the Thomas algorithm without pivoting.
    :param TriDiagOp op: the tridiagonal operator.
    :param float scale: the scaling, typically `theta * dt`, nonnegative.
    :rtype: TriFactor
    :return: the LU factors.
    """
    if scale < 0:
        raise ValueError(f'Scale has to be nonnegative, got {scale}')
    sub = -scale * op.lower
    diag = 1. - scale * op.diag
    sup = -scale * op.upper
    n = len(diag)
    mult, pivot = np.zeros(n), np.empty(n)
    pivot[0] = diag[0]
    for i in range(1, n):
        if abs(pivot[i - 1]) < PIVOT_TOL:
            raise SolverError(f'Zero pivot at row {i - 1} of tridiagonal factorization (scale={scale})')
        mult[i] = sub[i] / pivot[i - 1]
        pivot[i] = diag[i] - mult[i] * sup[i - 1]
    if abs(pivot[-1]) < PIVOT_TOL:
        raise SolverError(f'Zero pivot at row {n - 1} of tridiagonal factorization (scale={scale})')
    return TriFactor(mult, pivot, sup.copy(), op.axis, scale)


def tri_solve_all(factor: TriFactor, rhs: np.ndarray, direction: Optional[int] = None) -> np.ndarray:
    """
    Solves the factored tridiagonal system for every grid line along the factor's direction.
    :param TriFactor factor: the factors.
    :param np.ndarray rhs: the right-hand side grid function.
    :param int direction: the axis along which the systems lie, checked against the factor's if given.
    :rtype: np.ndarray
    :return: the solution grid function.
    """
    axis = factor.axis
    if direction is not None and direction != axis:
        raise ValueError(f'Factor was built for axis {axis}, not {direction}')
    if rhs.shape[axis] != len(factor.pivot):
        raise ValueError(f'Right-hand side of shape {rhs.shape} does not match factor size {len(factor.pivot)}')
    mult, pivot, upper = factor.mult, factor.pivot, factor.upper
    w = np.array(np.moveaxis(rhs, axis, 0), dtype=np.float64, order='C')
    n = len(pivot)
    for i in range(1, n):
        w[i] -= mult[i] * w[i - 1]
    w[n - 1] /= pivot[n - 1]
    for i in range(n - 2, -1, -1):
        w[i] -= upper[i] * w[i + 1]
        w[i] /= pivot[i]
    return np.moveaxis(w, 0, axis)


class CNSystem(object):
    """
    The system `I - 1/2 dt A_D` of the implicit stages of the Crank-Nicolson based schemes, solved by BiCGSTAB with an
    incomplete LU preconditioner or, optionally, by a sparse direct LU factorization.
    """

    def __init__(self,
                 ops: SpatialOperators,
                 dt: float,
                 tol: float = 1e-10,
                 max_iter: int = 1000,
                 ilu_fill: float = 1.,
                 method: str = 'bicgstab',
                 stats: Optional[SolverStats] = None):
        """
        Assembles the system matrix and its preconditioner or factorization.
        :param SpatialOperators ops: the spatial operators.
        :param float dt: the time step.
        :param float tol: the relative residual tolerance of BiCGSTAB.
        :param int max_iter: the maximum number of BiCGSTAB iterations.
        :param float ilu_fill: the fill ratio upper bound of the incomplete LU factorization, 1 for no fill.
        :param str method: either `bicgstab` or `direct`.
        :param SolverStats stats: the counters to update, a new one is created if `None`.
        """
        if method not in LINEAR_SOLVERS:
            raise ValueError(f'Unknown linear solver: {method}, options are: {LINEAR_SOLVERS}')
        if dt < 0:
            raise ValueError(f'Time step has to be nonnegative, got {dt}')
        self.grid: Grid2D = ops.grid
        self.dt = dt
        self.tol = tol
        self.max_iter = max_iter
        self.method = method
        self.stats = stats if stats is not None else SolverStats()

        n = self.grid.size
        self.matrix = (sp.identity(n, format='csc') - 0.5 * dt * ops.to_sparse()['AD']).tocsc()
        self._lu = None
        self._precond = None
        if dt == 0:
            return
        if method == 'direct':
            self._lu = spla.splu(self.matrix)
        else:
            ilu = spla.spilu(self.matrix, drop_tol=0., fill_factor=ilu_fill, permc_spec='NATURAL')
            self._precond = spla.LinearOperator((n, n), matvec=ilu.solve)
        logging.debug(f'Assembled CN system of size {n} with {self.matrix.nnz} nonzeros, dt={dt:.3e}, {method}')


def cn_solve(system: CNSystem, rhs: np.ndarray, x0: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Solves `(I - 1/2 dt A_D) x = rhs`.
    :param CNSystem system: the assembled system.
    :param np.ndarray rhs: the right-hand side grid function.
    :param np.ndarray x0: the initial guess grid function for BiCGSTAB, `rhs` if `None`.
    :rtype: np.ndarray
    :return: the solution grid function.
    """
    grid, stats = system.grid, system.stats
    if system.dt == 0:
        return np.array(rhs, dtype=np.float64)
    b = grid.flatten(rhs)
    stats.cn_solves += 1
    if system.method == 'direct':
        return grid.unflatten(system._lu.solve(b))

    b_norm = np.linalg.norm(b)
    if b_norm == 0:
        return np.zeros(grid.shape)
    guess = grid.flatten(rhs if x0 is None else x0)
    iterations = [0]

    def _count(_):
        iterations[0] += 1

    x, info = spla.bicgstab(system.matrix, b, x0=guess, rtol=system.tol, atol=0., maxiter=system.max_iter,
                            M=system._precond, callback=_count)
    residual = float(np.linalg.norm(b - system.matrix @ x) / b_norm)
    stats.iterations += iterations[0]
    stats.max_iterations = max(stats.max_iterations, iterations[0])
    stats.max_residual = max(stats.max_residual, residual)
    if info != 0:
        raise SolverError(f'BiCGSTAB did not converge (info={info}) after {iterations[0]} iterations, '
                          f'relative residual {residual:.3e}', residual=residual, iterations=iterations[0])
    if iterations[0] > system.max_iter // 2:
        logging.warning(f'BiCGSTAB needed {iterations[0]} iterations (cap {system.max_iter})')
    logging.debug(f'BiCGSTAB: {iterations[0]} iterations, relative residual {residual:.3e}')
    return grid.unflatten(x)


def dense_cn_solve(ops: SpatialOperators, dt: float, rhs: np.ndarray) -> np.ndarray:
    """
    Solves `(I - 1/2 dt A_D) x = rhs` by a dense direct solve. Only meant for checks on small grids.
    """
    grid = ops.grid
    matrix = np.eye(grid.size) - 0.5 * dt * ops.to_sparse()['AD'].toarray()
    return grid.unflatten(np.linalg.solve(matrix, grid.flatten(rhs)))
