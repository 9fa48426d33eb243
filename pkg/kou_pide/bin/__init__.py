import logging
import os
from typing import Dict, Callable
from absl import app, flags
from kou_pide.config import RunConfig
from kou_pide.errors import ValidationError
from kou_pide.util.cmd_line import save_args, str2bool, str2log_level, str2spot, str2int_list
from kou_pide.util.io import create_clear_dir
from kou_pide.util.logging import change_log_handler

# flags shared by all programs, values given on the command line override those of the config file
FLAGS = flags.FLAGS
flags.DEFINE_string('config', None, 'Path to a JSON run configuration file; defaults are used if not given.')
flags.DEFINE_string('output', None, 'Path to the directory in which to save the results.')
flags.DEFINE_bool('clear', False, 'Whether to clear the output directory before generating results.')
flags.DEFINE_string('set', None, 'Parameter set: 1, 2 or 3.')
flags.DEFINE_integer('m', None, 'Number of grid cells in both directions.')
flags.DEFINE_integer('m1', None, 'Number of grid cells in the direction of asset 1.')
flags.DEFINE_integer('m2', None, 'Number of grid cells in the direction of asset 2.')
flags.DEFINE_float('d', None, 'Grid stretch parameter, K/10 by default.')
flags.DEFINE_string('scheme', None, 'Time stepping scheme: cnfe, cnfi, ietr, cnab, mcs, mcs2 or sc2a.')
flags.DEFINE_integer('n', None, 'Base number of time steps.')
flags.DEFINE_float('theta', None, 'Parameter of the ADI schemes.')
flags.DEFINE_integer('l', None, 'Number of fixed-point iterations of CNFI.')
flags.DEFINE_float('tol', None, 'Relative residual tolerance of BiCGSTAB.')
flags.DEFINE_integer('max_iter', None, 'Maximum number of BiCGSTAB iterations.')
flags.DEFINE_float('ilu_fill', None, 'Fill ratio bound of the ILU preconditioner.')
flags.DEFINE_string('linear_solver', None, 'Solver of the Crank-Nicolson systems: bicgstab or direct.')
flags.DEFINE_multi_string('spot', None, 'Spot "s1,s2" at which to report prices, can be repeated.')
flags.DEFINE_bool('surface', None, 'Whether to save the option value surface.')
flags.DEFINE_bool('greek_errors', None, 'Whether to run the temporal error study of the Greeks.')
flags.DEFINE_string('ns', None, 'Comma-separated base numbers of time steps of convergence studies.')
flags.DEFINE_list('schemes', None, 'Schemes of convergence studies.')
flags.DEFINE_integer('reference_steps', None, 'Number of MCS2 steps of the reference solution.')
flags.DEFINE_integer('samples', None, 'Number of sampled eigenvalue quadruples per stability result.')
flags.DEFINE_integer('n_max', None, 'Maximum power checked by the stability verification.')
flags.DEFINE_float('gamma', None, 'Relative mixed derivative bound of the stability sampler.')
flags.DEFINE_float('w0_max', None, 'Maximum modulus of sampled jump eigenvalues.')
flags.DEFINE_float('z_max', None, 'Maximum modulus of sampled directional eigenvalues.')
flags.DEFINE_list('parts', None, 'Stability results to verify, e.g., 1a,2a,3b.')
flags.DEFINE_integer('paths', None, 'Number of Monte Carlo paths.')
flags.DEFINE_integer('seed', None, 'Random seed.')
flags.DEFINE_bool('antithetic', None, 'Whether to use antithetic variates.')
flags.DEFINE_string('bench_ms', None, 'Comma-separated grid sizes of the jump integral benchmark.')
flags.DEFINE_integer('repeats', None, 'Number of timed repetitions of the benchmark.')
flags.DEFINE_integer('threads', None, 'Number of parallel processes, -1 for all cores.')
flags.DEFINE_string('cache_dir', None, 'Directory where reference solutions are cached.')
flags.DEFINE_string('log_level', None, 'Logging level: 0, 1 or 2 (warning, info, debug) or a level name.')

ARGS_FILE = 'args.json'
CONFIG_FILE = 'config.json'

# flag name -> (config attribute, parser)
_OVERRIDES: Dict[str, tuple] = {
    'output': ('output', str),
    'set': ('param_set', str),
    'm1': ('m1', int),
    'm2': ('m2', int),
    'd': ('d', float),
    'scheme': ('scheme', str),
    'n': ('n', int),
    'theta': ('theta', float),
    'l': ('l', int),
    'tol': ('tol', float),
    'max_iter': ('max_iter', int),
    'ilu_fill': ('ilu_fill', float),
    'linear_solver': ('linear_solver', str),
    'spot': ('spots', lambda v: [str2spot(s) for s in v]),
    'surface': ('surface', str2bool),
    'greek_errors': ('greek_errors', str2bool),
    'ns': ('ns', str2int_list),
    'schemes': ('schemes', list),
    'reference_steps': ('reference_steps', int),
    'samples': ('samples', int),
    'n_max': ('n_max', int),
    'gamma': ('gamma', float),
    'w0_max': ('w0_max', float),
    'z_max': ('z_max', float),
    'parts': ('parts', list),
    'paths': ('paths', int),
    'seed': ('seed', int),
    'antithetic': ('antithetic', str2bool),
    'bench_ms': ('bench_ms', str2int_list),
    'repeats': ('repeats', int),
    'threads': ('threads', int),
    'cache_dir': ('cache_dir', str),
    'log_level': ('log_level', str2log_level),
}


def load_run_config(args: flags.FlagValues) -> RunConfig:
    """
    Loads the run configuration from the config file, if given, and overrides it with the flags given on the command
    line.
    :param flags.FlagValues args: the parsed flags.
    :rtype: RunConfig
    :return: the run configuration.
    """
    if args.config is not None:
        if not os.path.exists(args.config):
            raise ValidationError(f'Config file does not exist: {args.config}.')
        config = RunConfig.load_json(args.config)
    else:
        config = RunConfig()
    try:
        if args['m'].present:
            config.m1 = config.m2 = int(args.m)
        for name, (attr, parse) in _OVERRIDES.items():
            if args[name].present:
                setattr(config, attr, parse(args[name].value))
        config.log_level = str2log_level(config.log_level)
    except ValueError as e:
        raise ValidationError(str(e))
    return config


def run_program(command: Callable[[RunConfig], int], name: str) -> int:
    """
    Runs a command as the main function of a program: loads and validates the configuration, prepares the output
    directory and logging, saves the arguments and configuration, and runs the command.
    :param callable command: one of the `kou_pide.cli.cmd_*` functions.
    :param str name: the name of the program, used for the log file.
    :rtype: int
    :return: the exit status of the command.
    """
    args = flags.FLAGS
    try:
        config = load_run_config(args).validate()
    except ValidationError as e:
        raise app.UsageError(str(e))

    # checks output dir and files
    create_clear_dir(config.output, args.clear)
    change_log_handler(os.path.join(config.output, f'{name}.log'), config.log_level)
    own_flags = {f.name: f.value for f in args.get_flags_for_module(__name__)}
    save_args(own_flags, os.path.join(config.output, ARGS_FILE))
    config.save_json(os.path.join(config.output, CONFIG_FILE))

    logging.info(f'Running {name} for {config.param_set}, results in: {config.output}')
    return command(config)
