import copy
import logging
import jsonpickle
from typing import List, Dict, Optional, Tuple, Union
from .errors import ValidationError
from .linsolve import LINEAR_SOLVERS
from .model import KouParams, TABLE_SPOTS, get_parameter_set, normalize_set_label
from .stability import THEOREM_PARTS
from .steppers import SCHEMES, SchemeSpec, normalize_scheme


class RunConfig(object):
    """
    Contains the parameters of a run of any of the pricing engine's programs. Fields that do not apply to a program
    are ignored by it.
    """

    def __init__(self,
                 param_set: str = 'set1',
                 param_overrides: Optional[Dict[str, float]] = None,
                 m1: int = 400,
                 m2: int = 400,
                 d: Optional[float] = None,
                 scheme: str = 'mcs2',
                 n: int = 200,
                 theta: Optional[float] = None,
                 l: int = 2,
                 tol: float = 1e-10,
                 max_iter: int = 1000,
                 ilu_fill: float = 1.,
                 linear_solver: str = 'bicgstab',
                 spots: Optional[List[Tuple[float, float]]] = None,
                 surface: bool = False,
                 greek_errors: bool = False,
                 ns: Optional[List[int]] = None,
                 schemes: Optional[List[str]] = None,
                 reference_steps: int = 3000,
                 samples: int = 10000,
                 n_max: int = 100,
                 gamma: float = 1.,
                 w0_max: float = 0.1,
                 z_max: float = 1e3,
                 parts: Optional[List[str]] = None,
                 paths: int = 10 ** 6,
                 seed: int = 0,
                 antithetic: bool = False,
                 bench_ms: Optional[List[int]] = None,
                 repeats: int = 5,
                 threads: int = -1,
                 output: str = 'output',
                 cache_dir: Optional[str] = None,
                 log_level: Union[int, str] = logging.INFO):
        """
        Creates a new run configuration.
        :param str param_set: the label of the parameter set, `set1`, `set2` or `set3`.
        :param dict[str,float] param_overrides: values replacing fields of the parameter set.
        :param int m1: the number of grid cells in the direction of asset 1.
        :param int m2: the number of grid cells in the direction of asset 2.
        :param float d: the grid stretch parameter, `K/10` if `None`.
        :param str scheme: the time stepping scheme.
        :param int n: the base number of time steps.
        :param float theta: the ADI parameter, the scheme's default if `None`.
        :param int l: the number of fixed-point iterations of CNFI.
        :param float tol: the BiCGSTAB relative residual tolerance.
        :param int max_iter: the BiCGSTAB iteration cap.
        :param float ilu_fill: the fill ratio bound of the ILU preconditioner.
        :param str linear_solver: `bicgstab` or `direct`.
        :param list[tuple[float,float]] spots: the spots at which prices are reported, the 3x3 table spots if `None`.
        :param bool surface: whether to save the option value surface.
        :param bool greek_errors: whether to run the temporal error study of the Greeks.
        :param list[int] ns: the base numbers of steps of convergence studies.
        :param list[str] schemes: the schemes of convergence studies.
        :param int reference_steps: the number of MCS2 steps of reference solutions.
        :param int samples: the number of sampled eigenvalue quadruples per stability result.
        :param int n_max: the maximum power checked by the stability verification.
        :param float gamma: the relative mixed derivative bound of the stability sampler.
        :param float w0_max: the maximum modulus of sampled jump eigenvalues.
        :param float z_max: the maximum modulus of sampled directional eigenvalues.
        :param list[str] parts: the stability results to verify, all if `None`.
        :param int paths: the number of Monte Carlo paths.
        :param int seed: the random seed.
        :param bool antithetic: whether to use antithetic variates.
        :param list[int] bench_ms: the grid sizes of the jump integral benchmark.
        :param int repeats: the number of timed repetitions of the benchmark.
        :param int threads: the number of parallel processes, `-1` for all cores.
        :param str output: the output directory.
        :param str cache_dir: the reference solution cache directory.
        :param int or str log_level: the logging level.
        """
        self.param_set = param_set
        self.param_overrides = param_overrides or {}
        self.m1 = m1
        self.m2 = m2
        self.d = d
        self.scheme = scheme
        self.n = n
        self.theta = theta
        self.l = l
        self.tol = tol
        self.max_iter = max_iter
        self.ilu_fill = ilu_fill
        self.linear_solver = linear_solver
        self.spots = spots if spots is not None else [(s1, s2) for s2 in TABLE_SPOTS for s1 in TABLE_SPOTS]
        self.surface = surface
        self.greek_errors = greek_errors
        self.ns = ns if ns is not None else [20, 40, 80, 160]
        self.schemes = schemes if schemes is not None else list(SCHEMES)
        self.reference_steps = reference_steps
        self.samples = samples
        self.n_max = n_max
        self.gamma = gamma
        self.w0_max = w0_max
        self.z_max = z_max
        self.parts = parts if parts is not None else list(THEOREM_PARTS.keys())
        self.paths = paths
        self.seed = seed
        self.antithetic = antithetic
        self.bench_ms = bench_ms if bench_ms is not None else [250, 500, 1000]
        self.repeats = repeats
        self.threads = threads
        self.output = output
        self.cache_dir = cache_dir
        self.log_level = log_level

    def params(self) -> KouParams:
        """Gets the validated model parameters of this configuration."""
        params = get_parameter_set(self.param_set).params
        return params.replace(**self.param_overrides) if len(self.param_overrides) > 0 else params.validate()

    def scheme_spec(self) -> SchemeSpec:
        return SchemeSpec(self.scheme, self.n, self.theta, self.l)

    def solver_kwargs(self) -> Dict:
        return dict(tol=self.tol, max_iter=self.max_iter, ilu_fill=self.ilu_fill, linear_solver=self.linear_solver)

    def validate(self) -> 'RunConfig':
        """
        Checks every parameter before any computation takes place, raising a `ValidationError` naming the first
        invalid one.
        :rtype: RunConfig
        :return: this config, with normalized labels.
        """
        self.param_set = normalize_set_label(self.param_set)
        params = self.params()
        self.scheme = normalize_scheme(self.scheme)
        self.schemes = [normalize_scheme(s) for s in self.schemes]
        self.scheme_spec()
        if self.m1 < 2 or self.m2 < 2:
            raise ValidationError(f'Number of grid cells has to be at least 2, got {self.m1}x{self.m2}')
        if self.d is not None and self.d <= 0:
            raise ValidationError(f'Stretch parameter d has to be positive, got {self.d}')
        if self.tol <= 0 or self.max_iter < 1 or self.ilu_fill < 1:
            raise ValidationError(f'Invalid linear solver settings: tol={self.tol}, max_iter={self.max_iter}, '
                                  f'ilu_fill={self.ilu_fill}')
        if self.linear_solver not in LINEAR_SOLVERS:
            raise ValidationError(f'Unknown linear solver: {self.linear_solver}, options are: {LINEAR_SOLVERS}')
        for s1, s2 in self.spots:
            if not (0 <= s1 <= params.S_max and 0 <= s2 <= params.S_max):
                raise ValidationError(f'Spot ({s1}, {s2}) outside the domain [0, {params.S_max}]^2')
        if len(self.ns) == 0 or any(n < 1 for n in self.ns):
            raise ValidationError(f'Numbers of steps have to be positive, got {self.ns}')
        if self.reference_steps < 1:
            raise ValidationError(f'Number of reference steps has to be positive, got {self.reference_steps}')
        unknown = set(self.parts) - set(THEOREM_PARTS.keys())
        if len(unknown) > 0:
            raise ValidationError(f'Unknown stability result(s): {sorted(unknown)}, '
                                  f'options are: {list(THEOREM_PARTS.keys())}')
        if self.samples < 1 or self.n_max < 1 or self.gamma <= 0 or self.w0_max < 0 or self.z_max <= 0:
            raise ValidationError(f'Invalid stability sampling settings: samples={self.samples}, '
                                  f'n_max={self.n_max}, gamma={self.gamma}, w0_max={self.w0_max}, z_max={self.z_max}')
        if self.paths < 1 or (self.antithetic and self.paths % 2 != 0):
            raise ValidationError(f'Invalid number of paths: {self.paths} (antithetic={self.antithetic})')
        if len(self.bench_ms) == 0 or any(m < 2 for m in self.bench_ms) or self.repeats < 1:
            raise ValidationError(f'Invalid benchmark settings: ms={self.bench_ms}, repeats={self.repeats}')
        return self

    def save_json(self, json_file_path: str):
        """
        Saves a text file representing this config in a JSON format.
        :param str json_file_path: the path to the JSON file in which to save this config.
        """
        jsonpickle.set_preferred_backend('json')
        jsonpickle.set_encoder_options('json', indent=4, sort_keys=False)
        with open(json_file_path, 'w') as json_file:
            json_str = jsonpickle.encode(self.convert_serialize())
            json_file.write(json_str)

    def convert_serialize(self):
        # tuples become lists so the files stay plain JSON
        config = copy.copy(self)
        config.spots = [[float(s1), float(s2)] for s1, s2 in self.spots]
        return config

    @staticmethod
    def load_json(json_file_path: str) -> 'RunConfig':
        """
        Loads a config object from the given JSON formatted file.
        :param str json_file_path: the path to the JSON file from which to load a config.
        :rtype: RunConfig
        :return: the config object stored in the given JSON file.
        """
        with open(json_file_path) as json_file:
            conf = jsonpickle.decode(json_file.read())
            if not isinstance(conf, RunConfig):
                raise ValidationError(f'File {json_file_path} does not contain a run configuration')
            conf.convert_deserialize()
            return conf

    def convert_deserialize(self):
        # fields missing from older files take their default values
        for name, value in vars(RunConfig()).items():
            if not hasattr(self, name):
                setattr(self, name, value)
        self.spots = [(float(s1), float(s2)) for s1, s2 in self.spots]
