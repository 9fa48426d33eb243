import logging
import time
import tqdm
import numpy as np
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Callable, Dict, Tuple, Union
from .errors import SolverError, ValidationError
from .grid import Grid2D, build_grid, cell_average_payoff
from .jumpint import JumpCoeffs, precompute, apply_jump
from .linsolve import SolverStats, TriFactor, CNSystem, tri_factor, tri_solve_all, cn_solve, LINEAR_SOLVERS
from .model import KouParams
from .spatial import SpatialOperators, assemble_operators

SCHEMES = ('cnfe', 'cnfi', 'ietr', 'cnab', 'mcs', 'mcs2', 'sc2a')
IMEX_SCHEMES = ('cnfe', 'cnfi', 'ietr', 'cnab')
ADI_SCHEMES = ('mcs', 'mcs2', 'sc2a')
TWO_STEP_SCHEMES = ('cnab', 'mcs2', 'sc2a')
DEFAULT_THETA = {'mcs': 1 / 3, 'mcs2': 1 / 3, 'sc2a': 3 / 4}
STARTUP_THETA = 1 / 3
DEFAULT_L = 2


def normalize_scheme(scheme: str) -> str:
    scheme = str(scheme).strip().lower()
    if scheme not in SCHEMES:
        raise ValidationError(f'Unknown scheme: {scheme}, options are: {SCHEMES}')
    return scheme


def fair_steps(scheme: str, n: int) -> int:
    """
    Gets the number of time steps giving each scheme about the same amount of work as `n` steps of the MCS scheme.
    :param str scheme: the scheme name.
    :param int n: the base number of steps, at least 1.
    :rtype: int
    :return: `n` for CNFI and MCS, `floor(3n/2)` for IETR and MCS2, `2n` for CNFE, CNAB and SC2A.
    """
    scheme = normalize_scheme(scheme)
    if n < 1:
        raise ValueError(f'Number of time steps has to be at least 1, got {n}')
    if scheme in ('cnfi', 'mcs'):
        return n
    if scheme in ('ietr', 'mcs2'):
        return (3 * n) // 2
    return 2 * n


@dataclass(frozen=True)
class SchemeSpec(object):
    """
    A time stepping scheme with its parameters and base number of steps `n`. The actual number of steps is given by
    the fair-comparison rule unless `n_prime` is set explicitly.
    """
    scheme: str
    n: int
    theta: Optional[float] = None
    l: int = DEFAULT_L
    n_prime: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'scheme', normalize_scheme(self.scheme))
        if self.theta is None:
            object.__setattr__(self, 'theta', DEFAULT_THETA.get(self.scheme))
        if self.n < 1:
            raise ValidationError(f'Number of time steps has to be at least 1, got {self.n}')
        if self.theta is not None and self.theta <= 0:
            raise ValidationError(f'theta has to be positive, got {self.theta}')
        if self.l < 1:
            raise ValidationError(f'Number of fixed-point iterations has to be at least 1, got {self.l}')
        if self.n_prime is not None and self.n_prime < 1:
            raise ValidationError(f'Number of time steps has to be at least 1, got {self.n_prime}')

    @property
    def steps(self) -> int:
        return self.n_prime if self.n_prime is not None else fair_steps(self.scheme, self.n)

    @property
    def two_step(self) -> bool:
        return self.scheme in TWO_STEP_SCHEMES


@dataclass(frozen=True)
class TimeGrid(object):
    T: float
    steps: int

    @property
    def dt(self) -> float:
        return self.T / self.steps

    def t(self, n: int) -> float:
        return n * self.dt


@dataclass(frozen=True, eq=False)
class PricingProblem(object):
    """
    The semidiscretized pricing problem: grid, operators, jump integral coefficients and initial values.
    """
    params: KouParams
    grid: Grid2D
    ops: SpatialOperators
    coeffs: JumpCoeffs
    v0: np.ndarray


def build_problem(params: KouParams, m1: int, m2: int, d: Optional[float] = None) -> PricingProblem:
    """
    Builds the grid, assembles the operators, precomputes the jump integral coefficients and the cell-averaged
    initial values.
    """
    grid = build_grid(m1, m2, params, d)
    return PricingProblem(params=params, grid=grid, ops=assemble_operators(grid, params),
                          coeffs=precompute(grid, params), v0=cell_average_payoff(grid, params))


class SemiDiscreteSystem(ABC):
    """
    The linear ODE system `V' = (A_M + A_1 + A_2 + A_J) V` as seen by the time steppers: operator actions and the
    solves of the implicit stages.
    """

    @abstractmethod
    def apply_mixed(self, v):
        pass

    @abstractmethod
    def apply_1(self, v):
        pass

    @abstractmethod
    def apply_2(self, v):
        pass

    @abstractmethod
    def apply_jump(self, v):
        pass

    def apply_pde(self, v):
        return self.apply_mixed(v) + self.apply_1(v) + self.apply_2(v)

    @abstractmethod
    def solve_pde(self, rhs, dt: float, x0=None):
        """Solves `(I - 1/2 dt A_D) x = rhs`."""
        pass

    @abstractmethod
    def solve_direction(self, k: int, rhs, scale: float):
        """Solves `(I - scale A_k) x = rhs` for direction `k = 1, 2`."""
        pass


class GridSystem(SemiDiscreteSystem):
    """
    The spatially discretized pricing problem, caching the factorizations of the implicit stages.
    """

    def __init__(self,
                 problem: PricingProblem,
                 tol: float = 1e-10,
                 max_iter: int = 1000,
                 ilu_fill: float = 1.,
                 linear_solver: str = 'bicgstab'):
        if linear_solver not in LINEAR_SOLVERS:
            raise ValidationError(f'Unknown linear solver: {linear_solver}, options are: {LINEAR_SOLVERS}')
        self.problem = problem
        self.ops = problem.ops
        self.coeffs = problem.coeffs
        self.tol = tol
        self.max_iter = max_iter
        self.ilu_fill = ilu_fill
        self.linear_solver = linear_solver
        self.stats = SolverStats()
        self.jump_evaluations = 0
        self._cn: Dict[float, CNSystem] = {}
        self._factors: Dict[Tuple[int, float], TriFactor] = {}

    def apply_mixed(self, v):
        return self.ops.apply_mixed(v)

    def apply_1(self, v):
        return self.ops.apply_1(v)

    def apply_2(self, v):
        return self.ops.apply_2(v)

    def apply_pde(self, v):
        return self.ops.apply_AD(v)

    def apply_jump(self, v):
        self.jump_evaluations += 1
        return apply_jump(self.coeffs, v)

    def solve_pde(self, rhs, dt: float, x0=None):
        if dt not in self._cn:
            self._cn[dt] = CNSystem(self.ops, dt, self.tol, self.max_iter, self.ilu_fill, self.linear_solver,
                                    self.stats)
        return cn_solve(self._cn[dt], rhs, x0)

    def solve_direction(self, k: int, rhs, scale: float):
        key = (k, scale)
        if key not in self._factors:
            self._factors[key] = tri_factor(self.ops.a1 if k == 1 else self.ops.a2, scale)
        self.stats.tri_solves += 1
        return tri_solve_all(self._factors[key], rhs)


class ScalarSystem(SemiDiscreteSystem):
    """
    The linear scalar test equation `V' = (mu_0 + mu_1 + mu_2 + lambda_0) V`, in terms of the scaled eigenvalues
    `z_j = mu_j dt` and `w0 = lambda_0 dt`, to be stepped with `dt = 1`. All quantities may be arrays of samples.
    """

    def __init__(self, z0, z1, z2, w0):
        self.z0, self.z1, self.z2, self.w0 = (np.asarray(z, dtype=np.complex128) for z in (z0, z1, z2, w0))

    def apply_mixed(self, v):
        return self.z0 * v

    def apply_1(self, v):
        return self.z1 * v

    def apply_2(self, v):
        return self.z2 * v

    def apply_jump(self, v):
        return self.w0 * v

    def solve_pde(self, rhs, dt: float, x0=None):
        return rhs / (1. - 0.5 * dt * (self.z0 + self.z1 + self.z2))

    def solve_direction(self, k: int, rhs, scale: float):
        return rhs / (1. - scale * (self.z1 if k == 1 else self.z2))


@dataclass
class StepState(object):
    """
    The current value `v = V^{n-1}`, the previous one `v_prev = V^{n-2}` for two-step schemes, and their cached
    jump integrals.
    """
    v: Union[np.ndarray, complex]
    v_prev: Optional[Union[np.ndarray, complex]] = None
    jv: Optional[Union[np.ndarray, complex]] = None
    jv_prev: Optional[Union[np.ndarray, complex]] = None
    n: int = 0

    def jump(self, system: SemiDiscreteSystem):
        if self.jv is None:
            self.jv = system.apply_jump(self.v)
        return self.jv

    def jump_prev(self, system: SemiDiscreteSystem):
        assert self.v_prev is not None, 'Two-step scheme needs the previous value'
        if self.jv_prev is None:
            self.jv_prev = system.apply_jump(self.v_prev)
        return self.jv_prev

    def advance(self, v_new):
        self.v_prev, self.jv_prev = self.v, self.jv
        self.v, self.jv = v_new, None
        self.n += 1


def imex_euler_start(system: SemiDiscreteSystem, state: StepState, dt: float):
    """
    Two half steps of the IMEX Euler scheme, implicit in the PDE part and explicit in the jump part.
    """
    v0 = state.v
    v_half = system.solve_pde(v0 + 0.5 * dt * state.jump(system), dt, x0=v0)
    return system.solve_pde(v_half + 0.5 * dt * system.apply_jump(v_half), dt, x0=v_half)


def step_cnfe(system: SemiDiscreteSystem, state: StepState, dt: float):
    """Crank-Nicolson for the PDE part, forward Euler for the jump part."""
    v = state.v
    rhs = v + 0.5 * dt * system.apply_pde(v) + dt * state.jump(system)
    return system.solve_pde(rhs, dt, x0=v)


def step_cnfi(system: SemiDiscreteSystem, state: StepState, dt: float, l: int = DEFAULT_L):
    """Crank-Nicolson with `l` fixed-point iterations on the jump part, starting from the current value."""
    v = state.v
    jv = state.jump(system)
    base = v + 0.5 * dt * system.apply_pde(v) + 0.5 * dt * jv
    y, jy = v, jv
    for k in range(l):
        if k > 0:
            jy = system.apply_jump(y)
        y = system.solve_pde(base + 0.5 * dt * jy, dt, x0=y)
    return y


def step_ietr(system: SemiDiscreteSystem, state: StepState, dt: float):
    """Implicit trapezoidal rule for the PDE part, explicit trapezoidal rule for the jump part."""
    v = state.v
    dv = system.apply_pde(v)
    y0 = v + dt * (dv + state.jump(system))
    y0 = y0 + 0.5 * dt * system.apply_jump(y0 - v)
    return system.solve_pde(y0 - 0.5 * dt * dv, dt, x0=v)


def step_cnab(system: SemiDiscreteSystem, state: StepState, dt: float):
    """Crank-Nicolson for the PDE part, two-step Adams-Bashforth for the jump part."""
    v = state.v
    rhs = v + 0.5 * dt * system.apply_pde(v) + 0.5 * dt * (3. * state.jump(system) - state.jump_prev(system))
    return system.solve_pde(rhs, dt, x0=v)


def _corrections(system: SemiDiscreteSystem, y0, a1v, a2v, dt: float, theta: float):
    # stabilizing corrections: (I - theta dt A_j) Y_j = Y_{j-1} - theta dt A_j V^{n-1}
    y1 = system.solve_direction(1, y0 - theta * dt * a1v, theta * dt)
    return system.solve_direction(2, y1 - theta * dt * a2v, theta * dt)


def step_mcs(system: SemiDiscreteSystem, state: StepState, dt: float, theta: float = DEFAULT_THETA['mcs']):
    """
    Modified Craig-Sneyd scheme with the mixed derivative and jump parts treated by the explicit trapezoidal rule.
    The two explicit correction stages are merged, so the jump part is evaluated twice per step.
    """
    v = state.v
    mv, a1v, a2v = system.apply_mixed(v), system.apply_1(v), system.apply_2(v)
    y0 = v + dt * (mv + a1v + a2v + state.jump(system))
    delta = _corrections(system, y0, a1v, a2v, dt, theta) - v
    md, jd = system.apply_mixed(delta), system.apply_jump(delta)
    dd = md + system.apply_1(delta) + system.apply_2(delta)
    y0 = y0 + theta * dt * (md + jd) + (0.5 - theta) * dt * (dd + jd)
    return _corrections(system, y0, a1v, a2v, dt, theta)


def step_mcs2(system: SemiDiscreteSystem, state: StepState, dt: float, theta: float = DEFAULT_THETA['mcs2']):
    """Modified Craig-Sneyd scheme with the jump part treated by two-step Adams-Bashforth."""
    v = state.v
    mv, a1v, a2v = system.apply_mixed(v), system.apply_1(v), system.apply_2(v)
    y0 = v + dt * (mv + a1v + a2v) + 0.5 * dt * (3. * state.jump(system) - state.jump_prev(system))
    delta = _corrections(system, y0, a1v, a2v, dt, theta) - v
    md = system.apply_mixed(delta)
    y0 = y0 + theta * dt * md + (0.5 - theta) * dt * (md + system.apply_1(delta) + system.apply_2(delta))
    return _corrections(system, y0, a1v, a2v, dt, theta)


def step_sc2a(system: SemiDiscreteSystem, state: StepState, dt: float, theta: float = DEFAULT_THETA['sc2a']):
    """
    Stabilizing correction two-step Adams-type scheme: the mixed derivative and jump parts are extrapolated with
    weights (3/2, -1/2), the directional parts with (3/2 - theta, -1/2 + theta).
    """
    v, vp = state.v, state.v_prev
    assert vp is not None, 'Two-step scheme needs the previous value'
    a1v, a2v = system.apply_1(v), system.apply_2(v)
    b1, b2 = 1.5 - theta, -0.5 + theta
    y0 = (v + dt * system.apply_mixed(1.5 * v - 0.5 * vp) +
          dt * (1.5 * state.jump(system) - 0.5 * state.jump_prev(system)) +
          dt * (b1 * (a1v + a2v) + b2 * (system.apply_1(vp) + system.apply_2(vp))))
    return _corrections(system, y0, a1v, a2v, dt, theta)


def take_step(spec: SchemeSpec, system: SemiDiscreteSystem, state: StepState, dt: float):
    """
    Performs one step of the main recurrence of the given scheme.
    """
    s = spec.scheme
    if s == 'cnfe':
        return step_cnfe(system, state, dt)
    if s == 'cnfi':
        return step_cnfi(system, state, dt, spec.l)
    if s == 'ietr':
        return step_ietr(system, state, dt)
    if s == 'cnab':
        return step_cnab(system, state, dt)
    if s == 'mcs':
        return step_mcs(system, state, dt, spec.theta)
    if s == 'mcs2':
        return step_mcs2(system, state, dt, spec.theta)
    return step_sc2a(system, state, dt, spec.theta)


def start_step(spec: SchemeSpec, system: SemiDiscreteSystem, state: StepState, dt: float):
    """
    Performs the first step: IMEX Euler for the IMEX schemes, MCS for MCS itself and MCS with theta=1/3 for the
    two-step ADI schemes.
    """
    if spec.scheme in IMEX_SCHEMES:
        return imex_euler_start(system, state, dt)
    if spec.scheme == 'mcs':
        return step_mcs(system, state, dt, spec.theta)
    return step_mcs(system, state, dt, STARTUP_THETA)


def integrate(spec: SchemeSpec,
              system: SemiDiscreteSystem,
              v0,
              T: float,
              progress: bool = False,
              callback: Optional[Callable[[int, float, np.ndarray], None]] = None):
    """
    Advances the initial value to time `T` with `spec.steps` steps, the first of which is the start step.
    :param SchemeSpec spec: the scheme.
    :param SemiDiscreteSystem system: the semidiscrete system.
    :param v0: the initial value.
    :param float T: the final time.
    :param bool progress: whether to show a progress bar.
    :param callable callback: called as `callback(n, t_n, V^n)` after every step.
    :return: the approximation at time `T`.
    """
    time_grid = TimeGrid(T, spec.steps)
    dt = time_grid.dt
    state = StepState(v0)
    for n in tqdm.tqdm(range(1, time_grid.steps + 1), disable=not progress, desc=spec.scheme.upper()):
        v_new = start_step(spec, system, state, dt) if n == 1 else take_step(spec, system, state, dt)
        if not np.all(np.isfinite(v_new)):
            raise SolverError(f'Non-finite values after step {n} of {spec.scheme.upper()} (dt={dt:.3e})')
        state.advance(v_new)
        if callback is not None:
            callback(n, time_grid.t(n), v_new)
    return state.v


def run(spec: SchemeSpec,
        problem: PricingProblem,
        tol: float = 1e-10,
        max_iter: int = 1000,
        ilu_fill: float = 1.,
        linear_solver: str = 'bicgstab',
        progress: bool = False,
        callback: Optional[Callable[[int, float, np.ndarray], None]] = None) -> np.ndarray:
    """
    Solves the pricing problem up to maturity with the given scheme.
    :param SchemeSpec spec: the scheme.
    :param PricingProblem problem: the semidiscretized problem.
    :param float tol: the BiCGSTAB relative residual tolerance.
    :param int max_iter: the BiCGSTAB iteration cap.
    :param float ilu_fill: the ILU fill ratio bound.
    :param str linear_solver: `bicgstab` or `direct`, for the Crank-Nicolson systems.
    :param bool progress: whether to show a progress bar.
    :param callable callback: called as `callback(n, t_n, V^n)` after every step.
    :rtype: np.ndarray
    :return: the option values `v[i, j]` at maturity.
    """
    system = GridSystem(problem, tol, max_iter, ilu_fill, linear_solver)
    start = time.perf_counter()
    v = integrate(spec, system, problem.v0, problem.params.T, progress, callback)
    logging.info(f'{spec.scheme.upper()} (theta={spec.theta}, N={spec.n}, N\'={spec.steps}) on '
                 f'{problem.grid.m1}x{problem.grid.m2} grid took {time.perf_counter() - start:.2f}s, '
                 f'{system.jump_evaluations} jump integral evaluations')
    logging.debug(system.stats.summary())
    return v


def scalar_amplification(scheme: str, z0, z1, z2, w0, theta: Optional[float] = None, l: int = DEFAULT_L):
    """
    Applies one step of the main recurrence of a scheme to the scalar test equation.
    :rtype: np.ndarray or tuple[np.ndarray, np.ndarray]
    :return: `R` for one-step schemes, `(R1, R0)` with `V^n = R1 V^{n-1} + R0 V^{n-2}` for two-step schemes.
    """
    spec = SchemeSpec(scheme, 1, theta, l)
    system = ScalarSystem(z0, z1, z2, w0)
    one = np.ones(np.broadcast(system.z0, system.z1, system.z2, system.w0).shape, dtype=np.complex128)
    if not spec.two_step:
        return take_step(spec, system, StepState(one), 1.)
    r1 = take_step(spec, system, StepState(one, 0. * one), 1.)
    r0 = take_step(spec, system, StepState(0. * one, one), 1.)
    return r1, r0
