import logging
import numpy as np
import pandas as pd
from dataclasses import dataclass, field
from typing import Optional, Tuple, List, Dict
from . import SCHEME_STR, PART_STR, SAMPLES_STR, MAX_RATIO_STR, PASSED_STR, STABILITY_COLUMNS
from .errors import BoundViolation, ValidationError
from .util.math import log_uniform, max_row_sum_norm
from .util.mp import run_parallel

RATIO_TOL = 1e-10
MAX_VIOLATIONS = 10
Z_MIN = 1e-3


def _denominator(den: np.ndarray, name: str) -> np.ndarray:
    if np.any(den == 0):
        raise ValueError(f'Stability function evaluated at its pole ({name} = 0)')
    return den


def _as_complex(*zs) -> Tuple[np.ndarray, ...]:
    return tuple(np.asarray(z, dtype=np.complex128) for z in zs)


def stab_cnfe(w, w0) -> np.ndarray:
    w, w0 = _as_complex(w, w0)
    den = _denominator(1. - 0.5 * w, '1 - w/2')
    return (1. + 0.5 * w + w0) / den


def stab_cnfi(w, w0, l: int = 2) -> np.ndarray:
    if l < 1:
        raise ValueError(f'Number of fixed-point iterations has to be at least 1, got {l}')
    w, w0 = _as_complex(w, w0)
    den = _denominator(1. - 0.5 * w, '1 - w/2')
    a = 0.5 * w0 / den
    b = (1. + 0.5 * w + 0.5 * w0) / den
    return a ** l + sum(a ** k for k in range(l)) * b


def stab_ietr(w, w0) -> np.ndarray:
    w, w0 = _as_complex(w, w0)
    den = _denominator(1. - 0.5 * w, '1 - w/2')
    return (1. + 0.5 * w + w0 + 0.5 * (w + w0) * w0) / den


def stab_cnab(w, w0) -> Tuple[np.ndarray, np.ndarray]:
    """
    :return: the coefficients `(R1, R0)` of the two-step recurrence.
    """
    w, w0 = _as_complex(w, w0)
    den = _denominator(1. - 0.5 * w, '1 - w/2')
    return (1. + 0.5 * w + 1.5 * w0) / den, -0.5 * w0 / den


def _p(z1, z2, theta: float) -> np.ndarray:
    return _denominator((1. - theta * z1) * (1. - theta * z2), 'p')


def stab_mcs(z0, z1, z2, w0, theta: float = 1 / 3) -> np.ndarray:
    z0, z1, z2, w0 = _as_complex(z0, z1, z2, w0)
    p = _p(z1, z2, theta)
    s = z0 + z1 + z2 + w0
    return 1. + s / p + theta * (z0 + w0) * s / p ** 2 + (0.5 - theta) * s ** 2 / p ** 2


def stab_mcs2(z0, z1, z2, w0, theta: float = 1 / 3) -> Tuple[np.ndarray, np.ndarray]:
    z0, z1, z2, w0 = _as_complex(z0, z1, z2, w0)
    p = _p(z1, z2, theta)
    w = z0 + z1 + z2
    f = 1. / p + theta * z0 / p ** 2 + (0.5 - theta) * w / p ** 2
    return 1. + (w + 1.5 * w0) * f, -0.5 * w0 * f


def stab_sc2a(z0, z1, z2, w0, theta: float = 3 / 4) -> Tuple[np.ndarray, np.ndarray]:
    z0, z1, z2, w0 = _as_complex(z0, z1, z2, w0)
    p = _p(z1, z2, theta)
    return (1. + (1.5 * (z0 + w0) + (1.5 - theta) * (z1 + z2)) / p,
            (-0.5 * (z0 + w0) + (-0.5 + theta) * (z1 + z2)) / p)


def companion(r1, r0) -> np.ndarray:
    """
    Gets the companion matrices `((R1, R0), (1, 0))` of a two-step recurrence.
    :rtype: np.ndarray
    :return: array of shape `(..., 2, 2)`.
    """
    r1, r0 = np.broadcast_arrays(*_as_complex(r1, r0))
    c = np.zeros(r1.shape + (2, 2), dtype=np.complex128)
    c[..., 0, 0] = r1
    c[..., 0, 1] = r0
    c[..., 1, 0] = 1.
    return c


@dataclass(frozen=True)
class EigQuadruple(object):
    """
    Scaled eigenvalues `z_j = mu_j dt` of the mixed derivative and directional operators and `w0 = lambda_0 dt` of
    the jump operator, possibly arrays of samples.
    """
    z0: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    w0: np.ndarray

    @property
    def w(self) -> np.ndarray:
        return self.z0 + self.z1 + self.z2

    def __len__(self):
        return np.size(self.z0)


def check_condition(q: EigQuadruple, gamma: float = 1.) -> np.ndarray:
    """
    Checks the ADI stability condition `|z0| <= 2 gamma sqrt(Re z1 Re z2)`, `Re z1 <= 0`, `Re z2 <= 0`.
    :param EigQuadruple q: the quadruple(s).
    :param float gamma: the relative mixed derivative bound, `1` for the standard condition.
    :rtype: np.ndarray
    :return: boolean flag(s).
    """
    re1, re2 = np.real(q.z1), np.real(q.z2)
    nonpos = (re1 <= 0) & (re2 <= 0)
    return nonpos & (np.abs(q.z0) <= 2 * gamma * np.sqrt(np.where(nonpos, re1 * re2, 0.)))


def _left_half_plane(rng: np.random.Generator, n: int, z_max: float, complex_z: bool) -> np.ndarray:
    mag = log_uniform(rng, Z_MIN, z_max, n)
    if not complex_z:
        return -mag
    return mag * np.exp(1j * rng.uniform(0.5 * np.pi, 1.5 * np.pi, n))


def sample_quadruples(n: int,
                      domain: str = 'complex',
                      gamma: float = 1.,
                      w0_max: float = 0.1,
                      z_max: float = 1e3,
                      seed=0) -> EigQuadruple:
    """
    Samples eigenvalue quadruples satisfying the hypothesis of a stability result.
    :param int n: the number of samples.
    :param str domain: `halfplane` for `Re w <= 0` (mixed and second directional eigenvalues zero), `real` for real
    `z_j` satisfying the ADI stability condition, `complex` for complex ones.
    :param float gamma: the relative mixed derivative bound of the ADI stability condition.
    :param float w0_max: the maximum modulus of the (complex) jump eigenvalue.
    :param float z_max: the maximum modulus of the directional eigenvalues, sampled log-uniformly.
    :param seed: the seed or `np.random.SeedSequence`.
    :rtype: EigQuadruple
    :return: the samples.
    """
    if domain not in ('halfplane', 'real', 'complex'):
        raise ValueError(f'Unknown sampling domain: {domain}')
    if n < 1 or w0_max < 0 or z_max <= Z_MIN or gamma <= 0:
        raise ValueError(f'Invalid sampling parameters: n={n}, w0_max={w0_max}, z_max={z_max}, gamma={gamma}')
    rng = np.random.default_rng(seed)
    w0 = w0_max * np.sqrt(rng.uniform(0., 1., n)) * np.exp(2j * np.pi * rng.uniform(0., 1., n))
    zeros = np.zeros(n, dtype=np.complex128)
    if domain == 'halfplane':
        return EigQuadruple(zeros, _left_half_plane(rng, n, z_max, True).astype(np.complex128), zeros, w0)

    complex_z = domain == 'complex'
    z1 = _left_half_plane(rng, n, z_max, complex_z).astype(np.complex128)
    z2 = _left_half_plane(rng, n, z_max, complex_z).astype(np.complex128)
    radius = 2 * gamma * np.sqrt(np.real(z1) * np.real(z2)) * rng.uniform(0., 1., n)
    if complex_z:
        z0 = radius * np.exp(2j * np.pi * rng.uniform(0., 1., n))
    else:
        z0 = (radius * rng.choice([-1., 1.], n)).astype(np.complex128)
    return EigQuadruple(z0, z1, z2, w0)


@dataclass(frozen=True)
class TheoremPart(object):
    """
    A stability result: the scheme, the sampling domain of its hypothesis, the admissible range of theta and the
    factor multiplying `|lambda_0| t_n` in the exponential bound.
    """
    name: str
    scheme: str
    domain: str
    theta_range: Optional[Tuple[float, float]] = None
    two_step: bool = False
    factor: float = 1.

    def check_theta(self, theta: Optional[float]):
        if self.theta_range is None:
            return
        lo, hi = self.theta_range
        if theta is None or not lo <= theta <= hi:
            raise ValidationError(f'Part {self.name} requires theta in [{lo}, {hi}], got {theta}')

    def constant(self, w0_abs: np.ndarray, n_max: int, theta: Optional[float], l: int) -> np.ndarray:
        """Gets the constant `c` of the bound `exp(factor * c * |w0| n)`."""
        if self.scheme == 'cnfi':
            half = 0.5 * w0_abs * n_max
            return sum(half ** k for k in range(l))
        if self.scheme in ('mcs', 'mcs2'):
            return np.full_like(w0_abs, max(1. / theta, 2.))
        return np.ones_like(w0_abs)


THEOREM_PARTS: Dict[str, TheoremPart] = {p.name: p for p in [
    TheoremPart('1a', 'cnfe', 'halfplane'),
    TheoremPart('1b', 'cnfi', 'halfplane'),
    TheoremPart('1c', 'ietr', 'halfplane'),
    TheoremPart('1d', 'cnab', 'halfplane', two_step=True, factor=2.),
    TheoremPart('2a', 'mcs', 'real', theta_range=(1 / 3, np.inf)),
    TheoremPart('2b', 'mcs', 'complex', theta_range=(0.5, 1.)),
    TheoremPart('3a', 'mcs2', 'real', theta_range=(1 / 3, np.inf), two_step=True, factor=2.),
    TheoremPart('3b', 'mcs2', 'complex', theta_range=(0.5, 1.), two_step=True, factor=2.),
]}

DEFAULT_PART_THETA = {'2a': 1 / 3, '2b': 0.5, '3a': 1 / 3, '3b': 0.5}


def cnfi_constant_small_step(c0: float) -> float:
    """
    Gets the alternative constant `(1 - c0/2)^-1` of the fixed-point iteration bound, valid whenever
    `|lambda_0| dt <= c0` with `c0` in `(0, 2)`, independently of the number of iterations.
    """
    if not 0 < c0 < 2:
        raise ValueError(f'c0 has to be in (0, 2), got {c0}')
    return 1. / (1. - 0.5 * c0)


def amplification(part: TheoremPart, q: EigQuadruple, theta: Optional[float], l: int = 2) -> np.ndarray:
    """
    Gets the amplification factors `R`, or companion matrices, of the scheme of the given stability result.
    """
    s = part.scheme
    if s == 'cnfe':
        return stab_cnfe(q.w, q.w0)
    if s == 'cnfi':
        return stab_cnfi(q.w, q.w0, l)
    if s == 'ietr':
        return stab_ietr(q.w, q.w0)
    if s == 'cnab':
        return companion(*stab_cnab(q.w, q.w0))
    if s == 'mcs':
        return stab_mcs(q.z0, q.z1, q.z2, q.w0, theta)
    return companion(*stab_mcs2(q.z0, q.z1, q.z2, q.w0, theta))


def power_ratios(part: TheoremPart, q: EigQuadruple, n_max: int, theta: Optional[float], l: int = 2) -> np.ndarray:
    """
    Gets the ratios between the powers `|R^n|` (or `||C^n||` in the maximum norm) and the bound
    `exp(factor * c * |w0| n)`, for `n = 1..n_max`.
    :rtype: np.ndarray
    :return: array of shape `(n_max, samples)`.
    """
    w0_abs = np.abs(q.w0)
    rate = part.factor * part.constant(w0_abs, n_max, theta, l) * w0_abs
    amp = amplification(part, q, theta, l)
    ratios = np.empty((n_max, len(q)))
    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        if not part.two_step:
            log_r = np.log(np.abs(amp))
            for n in range(1, n_max + 1):
                ratios[n - 1] = np.exp(n * (log_r - rate))
        else:
            power = amp.copy()
            for n in range(1, n_max + 1):
                ratios[n - 1] = max_row_sum_norm(power) * np.exp(-n * rate)
                power = np.matmul(power, amp)
    return np.where(np.isfinite(ratios), ratios, np.inf)


def _verify_batch(part_name: str, seed: np.random.SeedSequence, size: int, n_max: int, theta: Optional[float],
                  l: int, gamma: float, w0_max: float, z_max: float) -> Tuple[float, List[BoundViolation]]:
    part = THEOREM_PARTS[part_name]
    q = sample_quadruples(size, part.domain, gamma, w0_max, z_max, seed)
    ratios = power_ratios(part, q, n_max, theta, l)
    worst_n = np.argmax(ratios, axis=0)
    worst = ratios[worst_n, np.arange(size)]
    violations = [BoundViolation(part_name, complex(q.z0[i]), complex(q.z1[i]), complex(q.z2[i]), complex(q.w0[i]),
                                 int(worst_n[i]) + 1, float(worst[i]))
                  for i in np.flatnonzero(worst > 1. + RATIO_TOL)[:MAX_VIOLATIONS]]
    return float(np.max(worst)), violations


@dataclass
class BoundReport(object):
    scheme: str
    part: str
    samples: int
    max_ratio: float
    violations: List[BoundViolation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return len(self.violations) == 0


def verify_bounds(part: str,
                  samples: int = 10000,
                  n_max: int = 100,
                  theta: Optional[float] = None,
                  l: int = 2,
                  gamma: float = 1.,
                  w0_max: float = 0.1,
                  z_max: float = 1e3,
                  seed: int = 0,
                  batch_size: int = 1000,
                  processes: Optional[int] = None) -> BoundReport:
    """
    Numerically verifies a stability result by sampling eigenvalue quadruples satisfying its hypothesis and checking
    every power up to `n_max` against the exponential bound.
    :param str part: the name of the result, one of `THEOREM_PARTS`, e.g., `2a`.
    :param int samples: the number of sampled quadruples.
    :param int n_max: the maximum power checked.
    :param float theta: the ADI parameter, defaults to the smallest admissible value of the result.
    :param int l: the number of fixed-point iterations of CNFI.
    :param float gamma: the relative mixed derivative bound used by the sampler.
    :param float w0_max: the maximum modulus of the sampled jump eigenvalues.
    :param float z_max: the maximum modulus of the sampled directional eigenvalues.
    :param int seed: the seed of the random source, split across batches.
    :param int batch_size: the number of samples per batch.
    :param int processes: the number of parallel processes, see `run_parallel`.
    :rtype: BoundReport
    :return: the report with the maximum observed ratio and the first violations found, if any.
    """
    if part not in THEOREM_PARTS:
        raise ValidationError(f'Unknown stability result: {part}, options are: {list(THEOREM_PARTS.keys())}')
    tp = THEOREM_PARTS[part]
    if theta is None:
        theta = DEFAULT_PART_THETA.get(part)
    tp.check_theta(theta)
    if samples < 1 or n_max < 1 or batch_size < 1:
        raise ValidationError(f'Invalid verification sizes: samples={samples}, n_max={n_max}, batch={batch_size}')

    sizes = [batch_size] * (samples // batch_size)
    if samples % batch_size > 0:
        sizes.append(samples % batch_size)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    args = [(part, s, size, n_max, theta, l, gamma, w0_max, z_max) for s, size in zip(seeds, sizes)]
    results = run_parallel(_verify_batch, args, processes=processes, use_tqdm=False)

    violations = [v for _, vs in results for v in vs][:MAX_VIOLATIONS]
    report = BoundReport(tp.scheme, part, samples, max(r for r, _ in results), violations)
    level = logging.INFO if report.passed else logging.ERROR
    logging.log(level, f'Stability result {part} ({tp.scheme.upper()}, theta={theta}): {samples} samples, '
                       f'max ratio {report.max_ratio:.6f}, {len(violations)} violation(s)')
    for v in violations:
        logging.error(f'\t{v}')
    return report


def report_frame(reports: List[BoundReport]) -> pd.DataFrame:
    return pd.DataFrame([{SCHEME_STR: r.scheme, PART_STR: r.part, SAMPLES_STR: r.samples,
                          MAX_RATIO_STR: r.max_ratio, PASSED_STR: r.passed} for r in reports],
                        columns=STABILITY_COLUMNS)
