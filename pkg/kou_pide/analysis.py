import hashlib
import logging
import os
import time
import numpy as np
import pandas as pd
from dataclasses import dataclass
from scipy.interpolate import CubicSpline
from typing import Optional, Dict, List, Sequence, Tuple, Union
from . import SCHEME_STR, QUANTITY_STR, M_STR, N_STR, N_PRIME_STR, ERROR_STR, SECONDS_STR, S1_STR, S2_STR, \
    VALUE_STR, CONVERGENCE_COLUMNS, GREEK_ERROR_COLUMNS, SURFACE_COLUMNS, GREEK_SURFACE_COLUMNS
from .grid import Grid2D
from .model import KouParams
from .spatial import derivative_bands, apply_bands
from .steppers import SchemeSpec, PricingProblem, build_problem, run
from .util.io import get_cache_dir, save_object, load_object
from .util.mp import run_parallel

ROI_LOW = 0.5  # fraction of the strike
ROI_HIGH = 1.5
REFERENCE_STEPS = 3000
REFERENCE_SCHEME = 'mcs2'
GREEKS = ('delta1', 'delta2', 'gamma11', 'gamma22', 'gamma12')


def roi_mask(grid: Grid2D) -> np.ndarray:
    """
    Gets the grid points strictly inside the region of interest `(K/2, 3K/2)^2`.
    """
    s1, s2 = grid.mesh()
    lo, hi = ROI_LOW * grid.K, ROI_HIGH * grid.K
    return (s1 > lo) & (s1 < hi) & (s2 > lo) & (s2 < hi)


def e_roi(v_ref: np.ndarray, v: np.ndarray, grid: Grid2D) -> float:
    """
    Gets the maximum absolute difference between two grid functions over the region of interest.
    :param np.ndarray v_ref: the reference grid function.
    :param np.ndarray v: the approximating grid function.
    :param Grid2D grid: the spatial grid.
    :rtype: float
    :return: the maximum-norm error in the region of interest.
    """
    if v_ref.shape != grid.shape or v.shape != grid.shape:
        raise ValueError(f'Grid function shapes {v_ref.shape} and {v.shape} do not match grid {grid.shape}')
    mask = roi_mask(grid)
    if not np.any(mask):
        raise ValueError(f'No grid point inside the region of interest for the {grid.m1}x{grid.m2} grid')
    return float(np.max(np.abs(v_ref[mask] - v[mask])))


def greeks(v: np.ndarray, grid: Grid2D) -> Dict[str, np.ndarray]:
    """
    Approximates the Deltas and Gammas of the option value by the central finite differences of the pricing
    operator, first-order one-sided differences for the Deltas at the boundaries and, for the Gammas, the
    three-point one-sided second differences there.
    :param np.ndarray v: the option values at maturity.
    :param Grid2D grid: the spatial grid.
    :rtype: dict[str, np.ndarray]
    :return: the Greek grid functions keyed by `delta1`, `delta2`, `gamma11`, `gamma22` and `gamma12`.
    """
    if v.shape != grid.shape:
        raise ValueError(f'Grid function shape {v.shape} does not match grid {grid.shape}')
    d1 = derivative_bands(grid.g1, 1, one_sided=True)
    d2 = derivative_bands(grid.g2, 1, one_sided=True)
    delta2 = apply_bands(d2, v, axis=1)
    return {
        'delta1': apply_bands(d1, v, axis=0),
        'delta2': delta2,
        'gamma11': _second_derivative(grid.g1, v, axis=0),
        'gamma22': _second_derivative(grid.g2, v, axis=1),
        'gamma12': apply_bands(d1, delta2, axis=0),
    }


def _second_derivative(g, v: np.ndarray, axis: int) -> np.ndarray:
    out = np.moveaxis(apply_bands(derivative_bands(g, 2), v, axis), axis, 0).copy()
    # the quadratic through three points has constant second derivative
    out[0], out[-1] = out[1], out[-2]
    return np.moveaxis(out, 0, axis)


def interpolate_price(v: np.ndarray,
                      grid: Grid2D,
                      s1: Union[float, np.ndarray],
                      s2: Union[float, np.ndarray],
                      bc_type: str = 'natural') -> Union[float, np.ndarray]:
    """
    Evaluates the tensor-product cubic spline through the grid values at the given spot(s).
    :param np.ndarray v: the grid function.
    :param Grid2D grid: the spatial grid.
    :param float s1: the price(s) of asset 1, in `[0, S_max]`.
    :param float s2: the price(s) of asset 2, in `[0, S_max]`, same shape as `s1`.
    :param str bc_type: the spline end conditions, see `scipy.interpolate.CubicSpline`.
    :return: the interpolated value(s).
    """
    s1, s2 = np.broadcast_arrays(np.asarray(s1, dtype=np.float64), np.asarray(s2, dtype=np.float64))
    for s in (s1, s2):
        if np.any(s < 0) or np.any(s > grid.S_max):
            raise ValueError(f'Spot(s) {s} outside the domain [0, {grid.S_max}]')
    # spline along s1 for every grid line, then along s2 at each spot
    lines = CubicSpline(grid.g1.s, v, axis=0, bc_type=bc_type)(np.ravel(s1))
    values = np.array([CubicSpline(grid.g2.s, lines[k], bc_type=bc_type)(x) for k, x in enumerate(np.ravel(s2))])
    return float(values[0]) if s1.ndim == 0 else values.reshape(s1.shape)


def surface_frame(v: np.ndarray, grid: Grid2D, upper: Optional[float] = None) -> pd.DataFrame:
    """
    Gets the grid function restricted to `[0, upper]^2` as a (s1, s2, value) table, `upper = 3K` by default.
    """
    upper = 3 * grid.K if upper is None else upper
    s1, s2 = grid.mesh()
    mask = (s1 <= upper) & (s2 <= upper)
    return pd.DataFrame({S1_STR: s1[mask], S2_STR: s2[mask], VALUE_STR: v[mask]}, columns=SURFACE_COLUMNS)


def greeks_frame(surfaces: Dict[str, np.ndarray], grid: Grid2D, upper: Optional[float] = None) -> pd.DataFrame:
    frames = []
    for name, surface in surfaces.items():
        df = surface_frame(surface, grid, upper)
        df.insert(0, QUANTITY_STR, name)
        frames.append(df)
    return pd.concat(frames, ignore_index=True)[GREEK_SURFACE_COLUMNS]


def is_monotone(v: np.ndarray, K: float, rtol: float = 1e-8) -> bool:
    """
    Checks that the put value is nonincreasing along every grid line in both directions, up to `rtol * K`.
    """
    tol = rtol * K
    return bool(np.all(np.diff(v, axis=0) <= tol) and np.all(np.diff(v, axis=1) <= tol))


def _params_digest(params: KouParams) -> str:
    return hashlib.md5(repr(sorted(params.to_dict().items())).encode()).hexdigest()[:10]


def reference_solution(problem: PricingProblem,
                       label: str = 'custom',
                       n_prime: int = REFERENCE_STEPS,
                       cache_dir: Optional[str] = None,
                       use_cache: bool = True,
                       **solver_kwargs) -> np.ndarray:
    """
    Computes, or loads from the cache, the reference solution of the problem by the MCS2 scheme with many steps.
    :param PricingProblem problem: the semidiscretized problem.
    :param str label: the parameter set label, used in the cache file name.
    :param int n_prime: the number of time steps.
    :param str cache_dir: the cache directory, overridden by the `KOU_PIDE_CACHE` environment variable.
    :param bool use_cache: whether to read and write the cache.
    :param solver_kwargs: the linear solver options passed to `steppers.run`.
    :rtype: np.ndarray
    :return: the reference option values at maturity.
    """
    grid, params = problem.grid, problem.params
    header = {'m1': grid.m1, 'm2': grid.m2, 'set': label, 'scheme': REFERENCE_SCHEME, 'Nprime': n_prime,
              'S_max': grid.S_max, 'K': grid.K, 'd': grid.g1.d, 'params': params.to_dict()}
    file_path = None
    if use_cache:
        file_name = (f'reference_{label}_{_params_digest(params)}_{grid.m1}x{grid.m2}_d{grid.g1.d:g}_'
                     f'{REFERENCE_SCHEME}_{n_prime}.pkl.gz')
        file_path = os.path.join(get_cache_dir(cache_dir), file_name)
        if os.path.isfile(file_path):
            cached = load_object(file_path)
            if cached.get('header') == header:
                logging.info(f'Loaded reference solution from {file_path}')
                return cached['values']
            logging.warning(f'Ignoring reference cache {file_path} with a different header')

    v = run(SchemeSpec(REFERENCE_SCHEME, n_prime, n_prime=n_prime), problem, **solver_kwargs)
    if file_path is not None:
        save_object({'header': header, 'values': v}, file_path)
        logging.info(f'Saved reference solution to {file_path}')
    return v


@dataclass(frozen=True)
class ConvergenceRecord(object):
    scheme: str
    m: int
    n: int
    n_prime: int
    error: float
    seconds: float
    quantity: Optional[str] = None

    def to_dict(self) -> Dict:
        d = {SCHEME_STR: self.scheme, M_STR: self.m, N_STR: self.n, N_PRIME_STR: self.n_prime,
             ERROR_STR: self.error, SECONDS_STR: self.seconds}
        if self.quantity is not None:
            d[QUANTITY_STR] = self.quantity
        return d


def _timed_run(spec: SchemeSpec, problem: PricingProblem, solver_kwargs: Dict) -> Tuple[np.ndarray, float]:
    start = time.perf_counter()
    v = run(spec, problem, **solver_kwargs)
    return v, time.perf_counter() - start


def _convergence_task(params: KouParams, m: int, d: Optional[float], spec: SchemeSpec, v_ref: np.ndarray,
                      solver_kwargs: Dict) -> ConvergenceRecord:
    problem = build_problem(params, m, m, d)
    v, seconds = _timed_run(spec, problem, solver_kwargs)
    return ConvergenceRecord(spec.scheme.upper(), m, spec.n, spec.steps, e_roi(v_ref, v, problem.grid), seconds)


def _greek_error_task(params: KouParams, m: int, d: Optional[float], spec: SchemeSpec,
                      ref_greeks: Dict[str, np.ndarray], solver_kwargs: Dict) -> List[ConvergenceRecord]:
    problem = build_problem(params, m, m, d)
    v, seconds = _timed_run(spec, problem, solver_kwargs)
    surfaces = greeks(v, problem.grid)
    return [ConvergenceRecord(spec.scheme.upper(), m, spec.n, spec.steps,
                              e_roi(ref_greeks[name], surfaces[name], problem.grid), seconds, name)
            for name in ref_greeks]


def _scheme_specs(schemes: Sequence[str], ns: Sequence[int], thetas: Optional[Dict[str, float]], l: int):
    thetas = thetas or {}
    return [SchemeSpec(s, n, thetas.get(s.lower()), l) for s in schemes for n in ns]


def convergence_study(params: KouParams,
                      schemes: Sequence[str],
                      ns: Sequence[int],
                      m: int,
                      label: str = 'custom',
                      d: Optional[float] = None,
                      thetas: Optional[Dict[str, float]] = None,
                      l: int = 2,
                      reference_steps: int = REFERENCE_STEPS,
                      cache_dir: Optional[str] = None,
                      processes: Optional[int] = None,
                      **solver_kwargs) -> pd.DataFrame:
    """
    Measures the temporal discretization error in the region of interest for each scheme and number of steps,
    with respect to the reference solution on the same grid.
    :param KouParams params: the model parameters.
    :param list[str] schemes: the schemes.
    :param list[int] ns: the base numbers of time steps.
    :param int m: the number of cells in each direction.
    :param str label: the parameter set label, used for caching the reference solution.
    :param float d: the grid stretch parameter.
    :param dict thetas: the theta of each ADI scheme, defaults are used for missing schemes.
    :param int l: the number of fixed-point iterations of CNFI.
    :param int reference_steps: the number of MCS2 steps of the reference solution.
    :param str cache_dir: the reference cache directory.
    :param int processes: the number of parallel processes, see `run_parallel`.
    :param solver_kwargs: the linear solver options passed to `steppers.run`.
    :rtype: pd.DataFrame
    :return: one row per scheme and number of steps, with columns `CONVERGENCE_COLUMNS`.
    """
    specs = _scheme_specs(schemes, ns, thetas, l)
    v_ref = reference_solution(build_problem(params, m, m, d), label, reference_steps, cache_dir, **solver_kwargs)
    args = [(params, m, d, spec, v_ref, solver_kwargs) for spec in specs]
    records = run_parallel(_convergence_task, args, processes=processes, desc='Convergence')
    return pd.DataFrame([r.to_dict() for r in records], columns=CONVERGENCE_COLUMNS)


def greek_error_study(params: KouParams,
                      schemes: Sequence[str],
                      ns: Sequence[int],
                      m: int,
                      label: str = 'custom',
                      d: Optional[float] = None,
                      thetas: Optional[Dict[str, float]] = None,
                      l: int = 2,
                      quantities: Sequence[str] = GREEKS,
                      reference_steps: int = REFERENCE_STEPS,
                      cache_dir: Optional[str] = None,
                      processes: Optional[int] = None,
                      **solver_kwargs) -> pd.DataFrame:
    """
    Measures the temporal discretization error of the Greeks in the region of interest, as `convergence_study` does
    for the option values.
    :rtype: pd.DataFrame
    :return: one row per scheme, number of steps and Greek, with columns `GREEK_ERROR_COLUMNS`.
    """
    unknown = set(quantities) - set(GREEKS)
    if len(unknown) > 0:
        raise ValueError(f'Unknown Greek(s): {sorted(unknown)}, options are: {GREEKS}')
    problem = build_problem(params, m, m, d)
    v_ref = reference_solution(problem, label, reference_steps, cache_dir, **solver_kwargs)
    ref_greeks = {name: surface for name, surface in greeks(v_ref, problem.grid).items() if name in quantities}
    args = [(params, m, d, spec, ref_greeks, solver_kwargs) for spec in _scheme_specs(schemes, ns, thetas, l)]
    records = [r for rs in run_parallel(_greek_error_task, args, processes=processes, desc='Greek errors') for r in rs]
    return pd.DataFrame([r.to_dict() for r in records], columns=GREEK_ERROR_COLUMNS)
