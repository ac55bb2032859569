"""Even, nonnegative weight functions g(w) indexing losses of a conformable class.

A loss conformable to G has derivative ``-q(w)^{-1/2} g(w)``; everything
that distinguishes, say, logistic loss from exponential loss lives in ``g``.

Named weights carry analytic log-derivatives (needed by the convexity
criterion).  Every weight may be rescaled and raised to a power:
``g(w) = scale * base(w) ** power``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

import numpy as np

from .distributions import LOGISTIC, SymmetricCdf
from .errors import DomainError, ParameterError, UnsupportedError

__all__ = [
    "WeightKind",
    "WeightFn",
    "EvenReport",
    "weight_eval",
    "weight_log_derivative",
    "check_even",
    "parse_weight",
]

_LOG_2PI = math.log(2.0 * math.pi)


class WeightKind(str, enum.Enum):
    CONSTANT = "constant"
    LIKELIHOOD = "likelihood"
    SAVAGE = "savage"
    GAUSSIAN_KERNEL = "gauss"
    LAPLACE_KERNEL = "laplace"
    BUZAS2009 = "buzas2009"
    CUSTOM = "custom"


_NEEDS_M = {WeightKind.GAUSSIAN_KERNEL, WeightKind.LAPLACE_KERNEL, WeightKind.BUZAS2009}


@dataclass(frozen=True)
class WeightFn:
    """A weight function g(w).

    Use the classmethod constructors rather than building one directly.
    ``func``/``dlog_func`` are only used by custom weights and must accept
    numpy arrays.
    """

    kind: WeightKind
    m: Optional[float] = None
    c: float = 1.0
    scale: float = 1.0
    power: float = 1.0
    name: str = ""
    func: Optional[Callable] = field(default=None, compare=False, repr=False)
    dlog_func: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind in _NEEDS_M:
            if self.m is None or not (self.m > 0) or not math.isfinite(self.m):
                raise ParameterError(f"{self.kind.value} weight requires m > 0, got {self.m}")
        if self.kind is WeightKind.CONSTANT and not (self.c >= 0 and math.isfinite(self.c)):
            raise ParameterError(f"constant weight requires c >= 0, got {self.c}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ParameterError(f"weight scale must be positive, got {self.scale}")
        if not (self.power > 0 and math.isfinite(self.power)):
            raise ParameterError(f"weight power must be positive, got {self.power}")
        if self.kind is WeightKind.CUSTOM and self.func is None:
            raise ParameterError("custom weight needs an evaluator")
        if not self.name:
            object.__setattr__(self, "name", self._default_name())

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c: float = 0.5) -> "WeightFn":
        return cls(WeightKind.CONSTANT, c=float(c))

    @classmethod
    def likelihood(cls) -> "WeightFn":
        return cls(WeightKind.LIKELIHOOD)

    @classmethod
    def savage(cls) -> "WeightFn":
        return cls(WeightKind.SAVAGE)

    @classmethod
    def gaussian_kernel(cls, m: float = 1.0) -> "WeightFn":
        return cls(WeightKind.GAUSSIAN_KERNEL, m=float(m))

    @classmethod
    def laplace_kernel(cls, m: float = 2.0) -> "WeightFn":
        return cls(WeightKind.LAPLACE_KERNEL, m=float(m))

    @classmethod
    def buzas2009(cls, m: float = 1.0) -> "WeightFn":
        return cls(WeightKind.BUZAS2009, m=float(m))

    @classmethod
    def custom(cls, func: Callable, dlog_func: Optional[Callable] = None, *,
               symmetrize: bool = False, name: str = "custom") -> "WeightFn":
        """Wrap a user function.

        With ``symmetrize=False`` the caller asserts ``func`` is even and
        loss construction verifies it with :func:`check_even`.  With
        ``symmetrize=True`` the even part ``(f(w) + f(-w)) / 2`` is used.
        """
        if symmetrize:
            func, dlog_func = _symmetrized(func, dlog_func)
        return cls(WeightKind.CUSTOM, name=name, func=func, dlog_func=dlog_func)

    def with_power(self, power: float) -> "WeightFn":
        return replace(self, power=self.power * power, name="")

    def scaled(self, factor: float) -> "WeightFn":
        return replace(self, scale=self.scale * factor, name="")

    # -- evaluation ---------------------------------------------------------

    def log_value(self, dist: SymmetricCdf, w):
        """log g(w); ``-inf`` where g vanishes."""
        arr = dist.check_domain(w)
        if self.kind is WeightKind.CUSTOM:
            base = np.asarray(self.func(arr), dtype=float)
            if (base < 0).any():
                raise DomainError("custom weight returned a negative value")
            with np.errstate(divide="ignore"):
                lb = np.log(base)
        else:
            lb = self._log_base(dist, arr)
        out = math.log(self.scale) + self.power * lb
        return float(out) if np.ndim(w) == 0 else np.broadcast_to(out, arr.shape).copy()

    def value(self, dist: SymmetricCdf, w):
        lv = self.log_value(dist, w)
        return float(np.exp(lv)) if np.ndim(w) == 0 else np.exp(lv)

    def log_derivative(self, dist: SymmetricCdf, w):
        """d/dw log g(w), analytic for named kinds."""
        arr = dist.check_domain(w)
        if self.kind is WeightKind.CUSTOM:
            if self.dlog_func is None:
                raise UnsupportedError(f"weight {self.name!r} has no log-derivative")
            if (np.asarray(self.log_value(dist, arr)) == -np.inf).any():
                raise DomainError("log-derivative undefined where the weight is zero")
            base = np.asarray(self.dlog_func(arr), dtype=float)
        else:
            base = self._dlog_base(dist, arr)
        out = self.power * base
        return float(out) if np.ndim(w) == 0 else np.broadcast_to(out, arr.shape).copy()

    @property
    def has_log_derivative(self) -> bool:
        return self.kind is not WeightKind.CUSTOM or self.dlog_func is not None

    # -- named forms --------------------------------------------------------

    def _log_base(self, dist, w):
        k, m = self.kind, self.m
        if k is WeightKind.CONSTANT:
            with np.errstate(divide="ignore"):
                return np.full_like(w, math.log(self.c) if self.c > 0 else -np.inf)
        if k is WeightKind.LIKELIHOOD:
            return dist.log_density(w) - 0.5 * (dist.log_cdf(w) + dist.log_sf(w))
        if k is WeightKind.SAVAGE:
            return 1.5 * LOGISTIC.log_density(w)
        if k is WeightKind.GAUSSIAN_KERNEL:
            return -0.5 * (_LOG_2PI + math.log(m)) - w * w / (2.0 * m) - m / 8.0
        if k is WeightKind.LAPLACE_KERNEL:
            return math.log((m + 1.0) / 2.0) - 0.5 * m * np.abs(w)
        if k is WeightKind.BUZAS2009:
            z = w / m
            return (-math.log(m) - 0.5 * z * z - 0.5 * _LOG_2PI
                    - 0.5 * LOGISTIC.log_density(w))
        raise AssertionError(k)

    def _dlog_base(self, dist, w):
        k, m = self.kind, self.m
        if k is WeightKind.CONSTANT:
            if self.c == 0:
                raise DomainError("log-derivative undefined for the zero weight")
            return np.zeros_like(w)
        if k is WeightKind.LIKELIHOOD:
            # d/dw [log G' - (log G + log(1-G))/2]
            return dist.dlog_density(w) - 0.5 * dist.dlog_odds(w) * (1.0 - 2.0 * dist.cdf(w))
        if k is WeightKind.SAVAGE:
            return -1.5 * np.tanh(0.5 * w)
        if k is WeightKind.GAUSSIAN_KERNEL:
            return -w / m
        if k is WeightKind.LAPLACE_KERNEL:
            return -0.5 * m * np.sign(w)
        if k is WeightKind.BUZAS2009:
            return -w / (m * m) + 0.5 * np.tanh(0.5 * w)
        raise AssertionError(k)

    def _default_name(self) -> str:
        k = self.kind
        if k is WeightKind.CONSTANT:
            base = f"constant:{self.c:g}"
        elif k in _NEEDS_M:
            base = f"{k.value}:{self.m:g}"
        else:
            base = k.value
        if self.power != 1.0:
            base = f"({base})^{self.power:g}"
        if self.scale != 1.0:
            base = f"{self.scale:g}*{base}"
        return base


def _symmetrized(func, dlog_func):
    def even(w):
        w = np.asarray(w, dtype=float)
        return 0.5 * (np.asarray(func(w), dtype=float) + np.asarray(func(-w), dtype=float))

    if dlog_func is None:
        return even, None

    def even_dlog(w):
        w = np.asarray(w, dtype=float)
        fp, fm = np.asarray(func(w), dtype=float), np.asarray(func(-w), dtype=float)
        # (f(w) + f(-w))' = f(w) L(w) - f(-w) L(-w)
        return (fp * dlog_func(w) - fm * dlog_func(-w)) / (fp + fm)

    return even, even_dlog


class EvenReport(NamedTuple):
    passed: bool
    max_asymmetry: float


def check_even(wf: WeightFn, dist: SymmetricCdf, grid) -> EvenReport:
    """Numerical evenness test: ``|g(w) - g(-w)| <= 1e-9 (1 + |g(w)|)`` on ``grid``."""
    w = np.asarray(grid, dtype=float).ravel()
    if w.size == 0:
        return EvenReport(True, 0.0)
    gp = np.asarray(wf.value(dist, w))
    gm = np.asarray(wf.value(dist, -w))
    diff = np.abs(gp - gm)
    if not np.isfinite(diff).all():
        return EvenReport(False, math.inf)
    passed = bool((diff <= 1e-9 * (1.0 + np.abs(gp))).all())
    return EvenReport(passed, float(diff.max()))


def weight_eval(wf: WeightFn, dist: SymmetricCdf, w):
    return wf.value(dist, w)


def weight_log_derivative(wf: WeightFn, dist: SymmetricCdf, w):
    return wf.log_derivative(dist, w)


def parse_weight(text: str) -> WeightFn:
    """Parse a CLI weight identifier such as ``constant:0.5`` or ``laplace:2``."""
    head, _, arg = text.strip().partition(":")
    head = head.lower()
    try:
        value = float(arg) if arg else None
    except ValueError:
        raise ParameterError(f"bad weight parameter in {text!r}") from None
    if head == "constant":
        return WeightFn.constant(0.5 if value is None else value)
    if head == "likelihood":
        return WeightFn.likelihood()
    if head == "savage":
        return WeightFn.savage()
    if head in ("gauss", "gaussian"):
        return WeightFn.gaussian_kernel(1.0 if value is None else value)
    if head == "laplace":
        return WeightFn.laplace_kernel(2.0 if value is None else value)
    if head == "buzas2009":
        return WeightFn.buzas2009(1.0 if value is None else value)
    raise ParameterError(f"unknown weight {text!r}")
