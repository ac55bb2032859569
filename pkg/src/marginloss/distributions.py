"""Symmetric CDFs G(w) = 1 - G(-w) and the odds transform q(w) = G/(1 - G).

All evaluators accept a scalar or an array and return the same shape
(a Python float for scalar input).  Logistic quantities go through the
``e^{-|w|}`` branch (``expit``/``logaddexp``) so they stay finite for
``|w| > 700``; Gaussian tails use ``ndtr``/``log_ndtr``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, ParameterError

__all__ = [
    "CdfKind",
    "SymmetricCdf",
    "LOGISTIC",
    "UNIFORM",
    "GAUSSIAN",
    "cdf_eval",
    "cdf_density",
    "odds",
    "get_cdf",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class CdfKind(str, enum.Enum):
    LOGISTIC = "logistic"
    UNIFORM_PM1 = "uniform"
    GAUSSIAN = "gaussian"


def _as_array(w):
    arr = np.asarray(w, dtype=float)
    if np.isnan(arr).any():
        raise DomainError("argument is NaN")
    return arr


def _ret(arr, like):
    if np.ndim(like) == 0:
        return float(arr)
    return arr


@dataclass(frozen=True)
class SymmetricCdf:
    """A continuous CDF symmetric about one half.

    ``kind`` selects the standard logistic, the uniform on (-1, 1) or the
    standard normal.  The uniform support is the *open* interval because
    the odds diverge at the endpoints.
    """

    kind: CdfKind

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def support(self) -> tuple[float, float]:
        if self.kind is CdfKind.UNIFORM_PM1:
            return (-1.0, 1.0)
        return (-math.inf, math.inf)

    @property
    def bounded(self) -> bool:
        return self.kind is CdfKind.UNIFORM_PM1

    def check_domain(self, w) -> np.ndarray:
        arr = _as_array(w)
        if self.kind is CdfKind.UNIFORM_PM1:
            if (np.abs(arr) >= 1.0).any():
                raise DomainError(f"uniform CDF requires |w| < 1, got {_first_bad(arr)}")
        return arr

    # -- values -------------------------------------------------------------

    def cdf(self, w):
        arr = self.check_domain(w)
        if self.kind is CdfKind.LOGISTIC:
            out = special.expit(arr)
        elif self.kind is CdfKind.GAUSSIAN:
            out = special.ndtr(arr)
        else:
            out = 0.5 * (arr + 1.0)
        return _ret(out, w)

    def sf(self, w):
        """``1 - G(w)`` without cancellation (equals ``G(-w)``)."""
        arr = self.check_domain(w)
        if self.kind is CdfKind.LOGISTIC:
            out = special.expit(-arr)
        elif self.kind is CdfKind.GAUSSIAN:
            out = special.ndtr(-arr)
        else:
            out = 0.5 * (1.0 - arr)
        return _ret(out, w)

    def density(self, w):
        arr = self.check_domain(w)
        if self.kind is CdfKind.LOGISTIC:
            out = special.expit(arr) * special.expit(-arr)
        elif self.kind is CdfKind.GAUSSIAN:
            out = np.exp(-0.5 * arr * arr - _LOG_SQRT_2PI)
        else:
            out = np.full_like(arr, 0.5)
        return _ret(out, w)

    # -- logs ---------------------------------------------------------------

    def log_cdf(self, w):
        arr = self.check_domain(w)
        if self.kind is CdfKind.LOGISTIC:
            out = -np.logaddexp(0.0, -arr)
        elif self.kind is CdfKind.GAUSSIAN:
            out = special.log_ndtr(arr)
        else:
            out = np.log1p(arr) - math.log(2.0)
        return _ret(out, w)

    def log_sf(self, w):
        return self.log_cdf(np.negative(w))

    def log_density(self, w):
        arr = self.check_domain(w)
        if self.kind is CdfKind.LOGISTIC:
            out = -np.logaddexp(0.0, -arr) - np.logaddexp(0.0, arr)
        elif self.kind is CdfKind.GAUSSIAN:
            out = -0.5 * arr * arr - _LOG_SQRT_2PI
        else:
            out = np.full_like(arr, -math.log(2.0))
        return _ret(out, w)

    def log_odds(self, w):
        arr = self.check_domain(w)
        if self.kind is CdfKind.LOGISTIC:
            out = arr
        elif self.kind is CdfKind.GAUSSIAN:
            out = special.log_ndtr(arr) - special.log_ndtr(-arr)
        else:
            out = np.log1p(arr) - np.log1p(-arr)
        return _ret(out, w)

    def odds(self, w):
        return _ret(np.exp(np.asarray(self.log_odds(w))), w)

    # -- derivatives --------------------------------------------------------

    def dlog_density(self, w):
        """d/dw log G'(w)."""
        arr = self.check_domain(w)
        if self.kind is CdfKind.LOGISTIC:
            out = -np.tanh(0.5 * arr)
        elif self.kind is CdfKind.GAUSSIAN:
            out = -arr
        else:
            out = np.zeros_like(arr)
        return _ret(out, w)

    def dlog_odds(self, w):
        """d/dw log q(w) = G'(w) / (G(w)(1 - G(w)))."""
        arr = self.check_domain(w)
        if self.kind is CdfKind.LOGISTIC:
            out = np.ones_like(arr)
        elif self.kind is CdfKind.GAUSSIAN:
            out = np.exp(-0.5 * arr * arr - _LOG_SQRT_2PI
                         - special.log_ndtr(arr) - special.log_ndtr(-arr))
        else:
            out = 2.0 / (1.0 - arr * arr)
        return _ret(out, w)


def _first_bad(arr):
    flat = np.atleast_1d(arr)
    return float(flat[np.abs(flat) >= 1.0][0])


LOGISTIC = SymmetricCdf(CdfKind.LOGISTIC)
UNIFORM = SymmetricCdf(CdfKind.UNIFORM_PM1)
GAUSSIAN = SymmetricCdf(CdfKind.GAUSSIAN)

_BY_NAME = {
    "logistic": LOGISTIC,
    "uniform": UNIFORM,
    "uniform_pm1": UNIFORM,
    "gaussian": GAUSSIAN,
    "normal": GAUSSIAN,
}


def get_cdf(name: str | SymmetricCdf) -> SymmetricCdf:
    """Look up a CDF by its CLI identifier."""
    if isinstance(name, SymmetricCdf):
        return name
    try:
        return _BY_NAME[name.lower()]
    except KeyError:
        raise ParameterError(f"unknown CDF {name!r}; expected logistic, uniform or gaussian") from None


def cdf_eval(dist: SymmetricCdf, w):
    return dist.cdf(w)


def cdf_density(dist: SymmetricCdf, w):
    return dist.density(w)


def odds(dist: SymmetricCdf, w):
    return dist.odds(w)
