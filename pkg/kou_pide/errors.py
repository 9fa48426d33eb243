from dataclasses import dataclass
from typing import Optional


class PricingError(Exception):
    """
    Base class of the errors raised by the pricing engine.
    """
    pass


class ValidationError(PricingError, ValueError):
    """
    Raised when model parameters or a run configuration fail validation, before any computation takes place.
    """
    pass


class SolverError(PricingError, RuntimeError):
    """
    Raised when a linear solve or a time stepper fails, e.g., a zero pivot in a tridiagonal factorization, BiCGSTAB not
    converging within the maximum number of iterations, or non-finite values in a stepper output.
    """

    def __init__(self, message: str, residual: Optional[float] = None, iterations: Optional[int] = None):
        """
        Creates a new solver error.
        :param str message: the error message.
        :param float residual: the relative residual achieved when the solver stopped, if applicable.
        :param int iterations: the number of iterations performed, if applicable.
        """
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class BoundViolation(object):
    """
    A sampled eigenvalue quadruple `(z0, z1, z2, w0)` for which a power of the amplification factor, or of the
    companion matrix, exceeded the theoretical stability bound. Reported, not raised.
    """
    part: str
    z0: complex
    z1: complex
    z2: complex
    w0: complex
    n: int
    ratio: float
