import numpy as np
from typing import Sequence


def convergence_slope(ns: Sequence[float], errors: Sequence[float]) -> float:
    """
    Gets the observed order of convergence as minus the least-squares slope of `log(error)` against `log(n)`.
    :param list[float] ns: the numbers of steps (or grid sizes).
    :param list[float] errors: the errors obtained for each number of steps, all positive.
    :rtype: float
    :return: the observed order, e.g., `2` for errors decaying like `n^-2`.
    """
    ns = np.asarray(ns, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    assert ns.shape == errors.shape and len(ns) >= 2, \
        f'Need at least two (n, error) pairs of equal length, got {ns.shape} and {errors.shape}'
    if np.any(errors <= 0) or np.any(ns <= 0):
        raise ValueError(f'Errors and step counts have to be positive to compute a slope: {errors}')
    slope, _ = np.polyfit(np.log(ns), np.log(errors), deg=1)
    return float(-slope)


def log_uniform(rng: np.random.Generator, low: float, high: float, size) -> np.ndarray:
    """
    Samples values whose logarithm is uniformly distributed in `[log(low), log(high)]`.
    :param np.random.Generator rng: the random generator.
    :param float low: the lower bound, positive.
    :param float high: the upper bound.
    :param size: the output shape.
    :rtype: np.ndarray
    :return: the samples.
    """
    assert 0 < low < high, f'Invalid log-uniform bounds: ({low}, {high})'
    return np.exp(rng.uniform(np.log(low), np.log(high), size))


def max_row_sum_norm(a: np.ndarray) -> np.ndarray:
    """
    Gets the maximum norm of the given (batch of) matrices, i.e., the maximum absolute row sum.
    :param np.ndarray a: array of shape `(..., n, n)`.
    :rtype: np.ndarray
    :return: array of shape `(...)` with the norm of each matrix.
    """
    return np.max(np.sum(np.abs(a), axis=-1), axis=-1)
