import dataclasses
import numpy as np
from dataclasses import dataclass
from typing import Dict, Union
from .errors import ValidationError

SET_LABELS = ('set1', 'set2', 'set3')
TABLE_SPOTS = (90., 100., 110.)


@dataclass(frozen=True)
class KouParams(object):
    """
    Market and model parameters of the two-asset Kou jump-diffusion model together with the European
    put-on-the-average option being priced and the truncation of the spatial domain.
    """
    sigma1: float  # volatility of asset 1, per sqrt(year)
    sigma2: float  # volatility of asset 2, per sqrt(year)
    r: float  # risk-free interest rate, per year
    rho: float  # correlation between the two Brownian motions
    lam: float  # jump intensity, per year
    p1: float  # probability of an upward jump of asset 1
    p2: float  # probability of an upward jump of asset 2
    eta_p1: float
    eta_q1: float
    eta_p2: float
    eta_q2: float
    K: float = 100.  # strike
    T: float = 1.  # maturity, in years
    S_max: float = 2000.  # truncation of the spatial domain

    @property
    def q1(self) -> float:
        return 1. - self.p1

    @property
    def q2(self) -> float:
        return 1. - self.p2

    @property
    def kappa1(self) -> float:
        return kappa(self.p1, self.eta_p1, self.eta_q1)

    @property
    def kappa2(self) -> float:
        return kappa(self.p2, self.eta_p2, self.eta_q2)

    def validate(self) -> 'KouParams':
        """
        Checks the parameter invariants, raising a `ValidationError` naming the first violated one.
        :rtype: KouParams
        :return: this object, to allow chaining.
        """
        checks = [
            (self.sigma1 > 0, f'sigma1 has to be positive, got {self.sigma1}'),
            (self.sigma2 > 0, f'sigma2 has to be positive, got {self.sigma2}'),
            (-1 <= self.rho <= 1, f'rho has to be in [-1,1], got {self.rho}'),
            (self.lam >= 0, f'lam has to be nonnegative, got {self.lam}'),
            (0 <= self.p1 <= 1, f'p1 has to be in [0,1], got {self.p1}'),
            (0 <= self.p2 <= 1, f'p2 has to be in [0,1], got {self.p2}'),
            (self.eta_p1 > 1, f'eta_p1 has to be greater than 1, got {self.eta_p1}'),
            (self.eta_p2 > 1, f'eta_p2 has to be greater than 1, got {self.eta_p2}'),
            (self.eta_q1 > 0, f'eta_q1 has to be positive, got {self.eta_q1}'),
            (self.eta_q2 > 0, f'eta_q2 has to be positive, got {self.eta_q2}'),
            (self.K > 0, f'K has to be positive, got {self.K}'),
            (self.T > 0, f'T has to be positive, got {self.T}'),
            (self.S_max > 2 * self.K, f'S_max has to be greater than 2K={2 * self.K}, got {self.S_max}'),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValidationError(msg)
        return self

    def replace(self, **overrides) -> 'KouParams':
        """
        Creates a validated copy of these parameters with the given fields replaced.
        :param overrides: the field names and new values.
        :rtype: KouParams
        :return: the new parameters.
        """
        unknown = set(overrides) - set(f.name for f in dataclasses.fields(self))
        if len(unknown) > 0:
            raise ValidationError(f'Unknown Kou parameter(s): {sorted(unknown)}')
        return dataclasses.replace(self, **{k: float(v) for k, v in overrides.items()}).validate()

    def to_dict(self) -> Dict[str, float]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ParameterSet(object):
    label: str
    params: KouParams


PARAMETER_SETS: Dict[str, ParameterSet] = {
    'set1': ParameterSet('set1', KouParams(
        sigma1=0.12, sigma2=0.15, r=0.05, rho=0.30, lam=0.50, p1=0.40, p2=0.60,
        eta_p1=1 / 0.20, eta_q1=1 / 0.15, eta_p2=1 / 0.18, eta_q2=1 / 0.14,
        K=100., T=1., S_max=20 * 100.)),
    'set2': ParameterSet('set2', KouParams(
        sigma1=0.15, sigma2=0.20, r=0.05, rho=0.50, lam=0.20, p1=0.3445, p2=0.50,
        eta_p1=3.0465, eta_q1=3.0775, eta_p2=3., eta_q2=2.,
        K=100., T=0.2, S_max=10 * 100.)),
    'set3': ParameterSet('set3', KouParams(
        sigma1=0.20, sigma2=0.30, r=0.05, rho=0.70, lam=8., p1=0.60, p2=0.65,
        eta_p1=5., eta_q1=4., eta_p2=4., eta_q2=3.,
        K=100., T=1., S_max=30 * 100.)),
}

# accurate option values at the spots in `TABLE_SPOTS`, rows indexed by s2 and columns by s1
REFERENCE_PRICES: Dict[str, np.ndarray] = {
    'set1': np.array([[8.9385, 6.0316, 3.8757],
                      [5.9655, 3.8038, 2.3370],
                      [3.7641, 2.2978, 1.3771]]),
    'set2': np.array([[9.6863, 5.5616, 2.6400],
                      [5.6162, 2.6929, 1.1264],
                      [2.7570, 1.1670, 0.5246]]),
    'set3': np.array([[32.7459, 31.0984, 29.5758],
                      [30.5796, 29.0181, 27.5770],
                      [28.5830, 27.1033, 25.7396]]),
}


def normalize_set_label(label: Union[str, int]) -> str:
    """
    Normalizes a parameter set label, accepting e.g. `1`, `"1"`, `"Set1"` or `"set1"`.
    :param str or int label: the label to normalize.
    :rtype: str
    :return: the normalized label, one of `SET_LABELS`.
    """
    label = str(label).strip().lower().replace(' ', '').replace('_', '')
    if not label.startswith('set'):
        label = f'set{label}'
    if label not in PARAMETER_SETS:
        raise ValidationError(f'Unknown parameter set: {label}, options are: {SET_LABELS}')
    return label


def get_parameter_set(label: Union[str, int]) -> ParameterSet:
    return PARAMETER_SETS[normalize_set_label(label)]


def reference_price(label: Union[str, int], s1: float, s2: float) -> float:
    """
    Gets the tabulated accurate option value for the given set and spot, where each spot is one of `TABLE_SPOTS`.
    """
    table = REFERENCE_PRICES[normalize_set_label(label)]
    return float(table[TABLE_SPOTS.index(float(s2)), TABLE_SPOTS.index(float(s1))])


def kappa(p: float, eta_p: float, eta_q: float) -> float:
    """
    Gets the expected relative jump size `E[Y-1]` of a log-double-exponential jump.
    :param float p: the probability of an upward jump.
    :param float eta_p: the rate of upward log-jumps, greater than 1 for a finite mean.
    :param float eta_q: the rate of downward log-jumps.
    :rtype: float
    :return: the expected relative jump size.
    """
    if eta_p <= 1:
        raise ValueError(f'eta_p has to be greater than 1 for a finite mean jump size, got {eta_p}')
    if eta_q <= 0:
        raise ValueError(f'eta_q has to be positive, got {eta_q}')
    if not 0 <= p <= 1:
        raise ValueError(f'p has to be a probability, got {p}')
    return p * eta_p / (eta_p - 1) + (1 - p) * eta_q / (eta_q + 1) - 1


def marginal_density(y: np.ndarray, p: float, eta_p: float, eta_q: float) -> np.ndarray:
    """
    Gets the density of a single log-double-exponential relative jump size `Y`, i.e., `log Y` has density
    `p eta_p e^{-eta_p x}` for `x >= 0` and `q eta_q e^{eta_q x}` for `x < 0`.
    :param np.ndarray y: the relative jump sizes, positive.
    :rtype: np.ndarray
    :return: the density at each `y`.
    """
    y = np.asarray(y, dtype=np.float64)
    if np.any(y <= 0):
        raise ValueError('Relative jump sizes have to be positive')
    out = np.empty_like(y)
    up = y >= 1
    out[up] = p * eta_p * y[up] ** (-eta_p - 1)
    out[~up] = (1 - p) * eta_q * y[~up] ** (eta_q - 1)
    return out


def marginal_cdf(y: np.ndarray, p: float, eta_p: float, eta_q: float) -> np.ndarray:
    """
    Gets the distribution function `P(Y <= y)` of a single log-double-exponential relative jump size, with `inf`
    mapped to 1.
    """
    y = np.asarray(y, dtype=np.float64)
    out = np.zeros_like(y)
    up = y >= 1
    low = (y > 0) & ~up
    out[low] = (1 - p) * y[low] ** eta_q
    with np.errstate(divide='ignore'):
        out[up] = 1. - p * y[up] ** (-eta_p)
    return out


def density(y1: np.ndarray, y2: np.ndarray, params: KouParams) -> np.ndarray:
    """
    Gets the joint density of the relative jump sizes of the two assets, which jump contemporaneously with independent
    log-double-exponential sizes. The partition boundaries `y_i = 1` belong to the upward-jump branches.
    :param np.ndarray y1: the relative jump sizes of asset 1, positive.
    :param np.ndarray y2: the relative jump sizes of asset 2, positive.
    :param KouParams params: the model parameters.
    :rtype: np.ndarray
    :return: the joint density at each `(y1, y2)`.
    """
    y1, y2 = np.broadcast_arrays(np.asarray(y1, dtype=np.float64), np.asarray(y2, dtype=np.float64))
    if np.any(y1 <= 0) or np.any(y2 <= 0):
        raise ValueError('Relative jump sizes have to be positive')
    f1 = marginal_density(y1, params.p1, params.eta_p1, params.eta_q1)
    f2 = marginal_density(y2, params.p2, params.eta_p2, params.eta_q2)
    return f1 * f2


def truncated_mass(s1: np.ndarray, s2: np.ndarray, params: KouParams) -> np.ndarray:
    """
    Gets the probability that a jump keeps both assets inside the truncated domain, i.e., the mass of the joint
    density over `[0, S_max/s1] x [0, S_max/s2]`, where a zero asset price has unit mass.
    :param np.ndarray s1: the prices of asset 1.
    :param np.ndarray s2: the prices of asset 2.
    :param KouParams params: the model parameters.
    :rtype: np.ndarray
    :return: the truncated mass at each `(s1, s2)`.
    """
    s1, s2 = np.broadcast_arrays(np.asarray(s1, dtype=np.float64), np.asarray(s2, dtype=np.float64))
    with np.errstate(divide='ignore'):
        x1 = np.where(s1 > 0, params.S_max / np.where(s1 > 0, s1, 1.), np.inf)
        x2 = np.where(s2 > 0, params.S_max / np.where(s2 > 0, s2, 1.), np.inf)
    return (marginal_cdf(x1, params.p1, params.eta_p1, params.eta_q1) *
            marginal_cdf(x2, params.p2, params.eta_p2, params.eta_q2))


def payoff(s1: np.ndarray, s2: np.ndarray, K: float) -> np.ndarray:
    """
    Gets the payoff of the European put-on-the-average option, `max(0, K - (s1 + s2) / 2)`.
    """
    return np.maximum(0., K - 0.5 * (np.asarray(s1, dtype=np.float64) + np.asarray(s2, dtype=np.float64)))
