import logging
import numpy as np
from dataclasses import dataclass
from typing import Optional, Tuple
from .errors import ValidationError
from .model import KouParams, payoff
from .util.mp import run_parallel

MIN_REPORTED_PATHS = 10 ** 4


@dataclass(frozen=True)
class McConfig(object):
    """
    Monte Carlo settings. With antithetic variates, the Gaussian increments of every pair of paths have opposite
    signs while the jumps are shared.
    """
    paths: int = 10 ** 6
    seed: int = 0
    antithetic: bool = False
    batch_size: int = 10 ** 5

    def validate(self) -> 'McConfig':
        if self.paths < 1 or self.batch_size < 1:
            raise ValidationError(f'Number of paths and batch size have to be positive, got {self.paths}, '
                                  f'{self.batch_size}')
        if self.antithetic and (self.paths % 2 != 0 or self.batch_size % 2 != 0):
            raise ValidationError(f'Antithetic sampling needs even numbers of paths, got {self.paths}, '
                                  f'{self.batch_size}')
        return self


@dataclass(frozen=True)
class McResult(object):
    price: float
    stderr: float
    paths: int


def _log_jump_sums(rng: np.random.Generator, counts: np.ndarray, p: float, eta_p: float, eta_q: float) -> np.ndarray:
    # a sum of k exponentials with rate eta is Gamma(k, 1/eta) distributed
    ups = rng.binomial(counts, p)
    return rng.gamma(ups, 1. / eta_p) - rng.gamma(counts - ups, 1. / eta_q)


def sample_relative_jumps(params: KouParams, n: int, seed=0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Samples the relative jump sizes `(Y1, Y2)` of single contemporaneous jumps of the two assets.
    """
    rng = np.random.default_rng(seed)
    ones = np.ones(n, dtype=np.int64)
    return (np.exp(_log_jump_sums(rng, ones, params.p1, params.eta_p1, params.eta_q1)),
            np.exp(_log_jump_sums(rng, ones, params.p2, params.eta_p2, params.eta_q2)))


def simulate_terminal(params: KouParams, s1_0: float, s2_0: float, n: int, rng: np.random.Generator,
                      antithetic: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """
    Samples the asset prices at maturity exactly: correlated Brownian motions, a common Poisson number of jumps and
    independent log-double-exponential jump sizes per asset, under the risk-neutral drift `r - lambda kappa_i`.
    :param KouParams params: the model parameters.
    :param float s1_0: the initial price of asset 1.
    :param float s2_0: the initial price of asset 2.
    :param int n: the number of paths, even when `antithetic`.
    :param np.random.Generator rng: the random generator.
    :param bool antithetic: whether the second half of the paths uses the negated Gaussian increments of the first.
    :rtype: tuple[np.ndarray, np.ndarray]
    :return: the terminal prices of both assets.
    """
    T, rho = params.T, params.rho
    n_gauss = n // 2 if antithetic else n
    z1 = rng.standard_normal(n_gauss)
    z2 = rho * z1 + np.sqrt(1. - rho ** 2) * rng.standard_normal(n_gauss)
    counts = rng.poisson(params.lam * T, n_gauss)
    j1 = _log_jump_sums(rng, counts, params.p1, params.eta_p1, params.eta_q1)
    j2 = _log_jump_sums(rng, counts, params.p2, params.eta_p2, params.eta_q2)
    if antithetic:
        z1, z2 = np.concatenate([z1, -z1]), np.concatenate([z2, -z2])
        j1, j2 = np.tile(j1, 2), np.tile(j2, 2)

    x1 = (params.r - 0.5 * params.sigma1 ** 2 - params.lam * params.kappa1) * T + params.sigma1 * np.sqrt(T) * z1
    x2 = (params.r - 0.5 * params.sigma2 ** 2 - params.lam * params.kappa2) * T + params.sigma2 * np.sqrt(T) * z2
    return s1_0 * np.exp(x1 + j1), s2_0 * np.exp(x2 + j2)


def _price_batch(params: KouParams, s1_0: float, s2_0: float, n: int, seed: np.random.SeedSequence,
                 antithetic: bool) -> Tuple[float, float, int]:
    rng = np.random.default_rng(seed)
    s1, s2 = simulate_terminal(params, s1_0, s2_0, n, rng, antithetic)
    values = np.exp(-params.r * params.T) * payoff(s1, s2, params.K)
    if antithetic:
        values = 0.5 * (values[:n // 2] + values[n // 2:])
    return float(np.sum(values)), float(np.sum(values ** 2)), len(values)


def mc_price(params: KouParams, s1_0: float, s2_0: float, cfg: Optional[McConfig] = None,
             processes: Optional[int] = None) -> McResult:
    """
    Prices the European put on the average of two assets by Monte Carlo simulation of the terminal prices. Paths are
    simulated in batches with independent streams spawned from the seed, so results are reproducible regardless of
    the number of processes.
    :param KouParams params: the model parameters.
    :param float s1_0: the initial price of asset 1.
    :param float s2_0: the initial price of asset 2.
    :param McConfig cfg: the simulation settings.
    :param int processes: the number of parallel processes, see `run_parallel`.
    :rtype: McResult
    :return: the price estimate and its standard error.
    """
    cfg = (cfg or McConfig()).validate()
    params.validate()
    if s1_0 <= 0 or s2_0 <= 0:
        raise ValidationError(f'Initial prices have to be positive, got ({s1_0}, {s2_0})')
    if cfg.paths < MIN_REPORTED_PATHS:
        logging.warning(f'Only {cfg.paths} paths, results are not meant to be reported')

    sizes = [cfg.batch_size] * (cfg.paths // cfg.batch_size)
    if cfg.paths % cfg.batch_size > 0:
        sizes.append(cfg.paths % cfg.batch_size)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    args = [(params, s1_0, s2_0, size, s, cfg.antithetic) for size, s in zip(sizes, seeds)]
    results = run_parallel(_price_batch, args, processes=processes, use_tqdm=False)

    # batches are reduced in a fixed order
    total, total_sq, count = 0., 0., 0
    for s, sq, c in results:
        total += s
        total_sq += sq
        count += c
    mean = total / count
    var = max(total_sq / count - mean ** 2, 0.) * count / max(count - 1, 1)
    result = McResult(mean, float(np.sqrt(var / count)), cfg.paths)
    logging.info(f'MC price at ({s1_0}, {s2_0}): {result.price:.4f} +- {result.stderr:.4f} ({cfg.paths} paths)')
    return result
