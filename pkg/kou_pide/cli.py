"""
The logic of the command-line programs: each `cmd_*` function runs one subcommand for a validated configuration,
writes its CSV outputs to the configuration's output directory and returns the program's exit status.
"""
import functools
import logging
import os
import numpy as np
import pandas as pd
from typing import Callable, Dict, Optional
from . import SET_STR, SCHEME_STR, M_STR, N_STR, N_PRIME_STR, S1_STR, S2_STR, PRICE_STR, PATHS_STR, STDERR_STR, \
    PRICE_COLUMNS, MC_COLUMNS, BENCH_COLUMNS, CONVERGENCE_COLUMNS, GREEK_ERROR_COLUMNS, STABILITY_COLUMNS, \
    SURFACE_COLUMNS, GREEK_SURFACE_COLUMNS, ERROR_STR, QUANTITY_STR
from .analysis import interpolate_price, surface_frame, greeks, greeks_frame, convergence_study, \
    greek_error_study, is_monotone
from .config import RunConfig
from .errors import ValidationError, SolverError
from .jumpint import benchmark
from .mc_oracle import McConfig, mc_price
from .stability import verify_bounds, report_frame, DEFAULT_PART_THETA
from .steppers import ADI_SCHEMES, build_problem, run
from .util.data import records_to_frame, save_csv
from .util.io import create_clear_dir
from .util.math import convergence_slope

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2

PRICES_FILE = 'prices.csv'
SURFACE_FILE = 'surface.csv'
CONVERGENCE_FILE = 'convergence.csv'
GREEKS_FILE = 'greeks.csv'
GREEK_ERRORS_FILE = 'greek-errors.csv'
STABILITY_FILE = 'stability.csv'
MC_FILE = 'mc.csv'
BENCH_FILE = 'bench-integral.csv'


def exit_status(func: Callable[[RunConfig], int]) -> Callable[[RunConfig], int]:
    """
    Validates the configuration before running the command and maps validation and solver failures to exit codes.
    """

    @functools.wraps(func)
    def wrapper(config: RunConfig) -> int:
        try:
            config.validate()
            create_clear_dir(config.output)
            return func(config)
        except ValidationError as e:
            logging.error(f'Invalid configuration: {e}')
            return EXIT_VALIDATION
        except SolverError as e:
            logging.error(f'Solver failure: {e}')
            return EXIT_SOLVER

    return wrapper


def study_thetas(config: RunConfig) -> Optional[Dict[str, float]]:
    """
    Gets the theta of each ADI scheme of a study: a configured theta applies to all of them.
    """
    if config.theta is None:
        return None
    return {s: config.theta for s in config.schemes if s in ADI_SCHEMES}


def _log_slopes(df: pd.DataFrame, group_cols):
    for key, group in df.groupby(group_cols, sort=False):
        if len(group) < 2 or np.any(group[ERROR_STR] <= 0):
            continue
        slope = convergence_slope(group[N_STR], group[ERROR_STR])
        logging.info(f'Observed order of {key}: {slope:.2f}')


@exit_status
def cmd_price(config: RunConfig) -> int:
    """
    Prices the option at the configured spots and optionally saves the value surface on `[0, 3K]^2`.
    """
    params = config.params()
    spec = config.scheme_spec()
    problem = build_problem(params, config.m1, config.m2, config.d)
    v = run(spec, problem, progress=True, **config.solver_kwargs())
    if not is_monotone(v, params.K):
        logging.warning('Option values are not monotone along the grid lines')

    records = []
    for s1, s2 in config.spots:
        price = interpolate_price(v, problem.grid, s1, s2)
        records.append({SET_STR: config.param_set, SCHEME_STR: spec.scheme.upper(), M_STR: config.m1,
                        N_STR: spec.n, N_PRIME_STR: spec.steps, S1_STR: s1, S2_STR: s2, PRICE_STR: price})
        print(f'{config.param_set} {spec.scheme.upper()} ({s1:g}, {s2:g}): {price:.4f}')
    save_csv(records_to_frame(records, PRICE_COLUMNS), os.path.join(config.output, PRICES_FILE))
    if config.surface:
        save_csv(surface_frame(v, problem.grid), os.path.join(config.output, SURFACE_FILE), SURFACE_COLUMNS)
    return EXIT_OK


@exit_status
def cmd_converge(config: RunConfig) -> int:
    """
    Measures the temporal errors in the region of interest of the configured schemes over a sequence of step counts.
    """
    df = convergence_study(config.params(), config.schemes, config.ns, config.m1, config.param_set, config.d,
                           study_thetas(config), config.l, config.reference_steps, config.cache_dir, config.threads,
                           **config.solver_kwargs())
    save_csv(df, os.path.join(config.output, CONVERGENCE_FILE), CONVERGENCE_COLUMNS)
    _log_slopes(df, SCHEME_STR)
    return EXIT_OK


@exit_status
def cmd_greeks(config: RunConfig) -> int:
    """
    Saves the Greek surfaces of the configured run and, optionally, the temporal errors of the Greeks.
    """
    params = config.params()
    problem = build_problem(params, config.m1, config.m2, config.d)
    v = run(config.scheme_spec(), problem, progress=True, **config.solver_kwargs())
    save_csv(greeks_frame(greeks(v, problem.grid), problem.grid), os.path.join(config.output, GREEKS_FILE),
             GREEK_SURFACE_COLUMNS)
    if config.greek_errors:
        df = greek_error_study(params, config.schemes, config.ns, config.m1, config.param_set, config.d,
                               study_thetas(config), config.l, reference_steps=config.reference_steps,
                               cache_dir=config.cache_dir, processes=config.threads, **config.solver_kwargs())
        save_csv(df, os.path.join(config.output, GREEK_ERRORS_FILE), GREEK_ERROR_COLUMNS)
        _log_slopes(df, [SCHEME_STR, QUANTITY_STR])
    return EXIT_OK


@exit_status
def cmd_stability(config: RunConfig) -> int:
    """
    Verifies the configured stability results, failing with the solver exit status if any bound is violated.
    """
    reports = []
    for part in config.parts:
        theta = config.theta if part in DEFAULT_PART_THETA else None
        reports.append(verify_bounds(part, config.samples, config.n_max, theta, config.l, config.gamma,
                                     config.w0_max, config.z_max, config.seed, processes=config.threads))
    save_csv(report_frame(reports), os.path.join(config.output, STABILITY_FILE), STABILITY_COLUMNS)
    failed = [r.part for r in reports if not r.passed]
    if len(failed) > 0:
        logging.error(f'Stability bounds violated for: {failed}')
        return EXIT_SOLVER
    return EXIT_OK


@exit_status
def cmd_mc(config: RunConfig) -> int:
    """
    Prices the option at the configured spots by Monte Carlo simulation.
    """
    params = config.params()
    for s1, s2 in config.spots:
        if s1 <= 0 or s2 <= 0:
            raise ValidationError(f'Monte Carlo spots have to be positive, got ({s1}, {s2})')
    cfg = McConfig(paths=config.paths, seed=config.seed, antithetic=config.antithetic)
    records = []
    for s1, s2 in config.spots:
        res = mc_price(params, s1, s2, cfg, processes=config.threads)
        records.append({SET_STR: config.param_set, S1_STR: s1, S2_STR: s2, PATHS_STR: res.paths,
                        PRICE_STR: res.price, STDERR_STR: res.stderr})
        print(f'{config.param_set} MC ({s1:g}, {s2:g}): {res.price:.4f} +- {res.stderr:.4f}')
    save_csv(records_to_frame(records, MC_COLUMNS), os.path.join(config.output, MC_FILE))
    return EXIT_OK


@exit_status
def cmd_bench_integral(config: RunConfig) -> int:
    """
    Times the evaluation of the jump integral for the configured grid sizes.
    """
    df = benchmark(config.params(), config.bench_ms, config.repeats, config.d)
    save_csv(df, os.path.join(config.output, BENCH_FILE), BENCH_COLUMNS)
    for (m0, t0), (m1, t1) in zip(df.values[:-1], df.values[1:]):
        logging.info(f'Time ratio m={int(m1)} / m={int(m0)}: {t1 / t0:.2f}')
    return EXIT_OK
