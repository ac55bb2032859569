"""Conformable margin losses ``phi(v) = k - int_0^v q(w)^{-1/2} g(w) dw``.

A :class:`ConformableLoss` is fixed by a symmetric CDF ``G``, an even weight
``g`` and the value ``k = phi(0)``.  Its derivative ``-q(v)^{-1/2} g(v)`` is
always evaluated exactly.  Values come from a registered closed form when
``(G, g)`` is one of the tabulated pairs and from adaptive quadrature
otherwise; either route can be requested explicitly so the two can be
checked against each other.

``margin_scale`` ``s`` turns ``phi`` into ``v -> phi(s v)``.  That is how
the unit-exponent exponential loss ``e^{-v}`` (``s = 2``) and the p-norm
objectives ``e^{-v p/2}`` (``s = p``) are expressed; such a loss is
conformable to ``G(s w)`` rather than to ``G``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy import special

from . import quadrature
from .distributions import LOGISTIC, UNIFORM, CdfKind, SymmetricCdf, get_cdf
from .errors import DomainError, ParameterError, UnsupportedError
from .weights import WeightFn, WeightKind, check_even

__all__ = [
    "ConformableLoss",
    "LossTable",
    "ConformabilityReport",
    "ConvexityReport",
    "make_loss",
    "named_loss",
    "parse_loss",
    "squared_weight",
    "density_weight",
    "loss_eval",
    "loss_derivative",
    "conformability_check",
    "convexity_check",
    "reparameterize",
    "tabulate",
    "default_grid",
    "exponential_power",
    "LOSS_NAMES",
]

LOSS_NAMES = ("exponential", "exp-unit", "logistic", "savage", "gaussian", "laplace", "squared")


def squared_weight() -> WeightFn:
    """``2 sqrt((1 + w)(1 - w))``: with the uniform CDF and ``k = 1`` gives ``(1 - v)^2``."""

    def g(w):
        return 2.0 * np.sqrt((1.0 + w) * (1.0 - w))

    def dlog(w):
        return -w / ((1.0 + w) * (1.0 - w))

    return WeightFn.custom(g, dlog, name="squared")


def density_weight(dist: SymmetricCdf, base: Optional[WeightFn] = None) -> WeightFn:
    """The weight ``G'(w)``, optionally multiplied by another weight."""

    def g(w):
        out = dist.density(w)
        return out if base is None else out * base.value(dist, w)

    def dlog(w):
        out = dist.dlog_density(w)
        return out if base is None else out + base.log_derivative(dist, w)

    has_dlog = base is None or base.has_log_derivative
    label = "density" if base is None else f"density*{base.name}"
    return WeightFn.custom(g, dlog if has_dlog else None, name=label)


def _closed_form_of(dist: SymmetricCdf, weight: WeightFn) -> Optional[str]:
    if weight.power != 1.0 and weight.kind is not WeightKind.CONSTANT:
        return None
    if dist.kind is CdfKind.LOGISTIC:
        return {
            WeightKind.CONSTANT: "exponential",
            WeightKind.LIKELIHOOD: "logistic_ll",
            WeightKind.SAVAGE: "savage",
            WeightKind.GAUSSIAN_KERNEL: "gaussian_loss",
            WeightKind.LAPLACE_KERNEL: "laplace_loss",
        }.get(weight.kind)
    if dist.kind is CdfKind.UNIFORM_PM1 and weight.kind is WeightKind.CUSTOM and weight.name == "squared":
        return "squared"
    return None


def _laplace_shape(u, m):
    """Tabulated Laplace-loss shape with value 1 at the origin."""
    shape = np.shape(u)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.empty_like(u)
    pos = u > 0
    out[pos] = np.exp(-u[pos] * (1.0 + m) / 2.0)
    neg = ~pos
    if m == 1.0:
        out[neg] = 1.0 - u[neg]
    else:
        out[neg] = 1.0 - (m + 1.0) * np.expm1(u[neg] * (m - 1.0) / 2.0) / (m - 1.0)
    return out.reshape(shape)


def _canonical(form: str, weight: WeightFn, u):
    """Antiderivative shape ``phi0`` with ``phi0' = -h``; returns ``(phi0(u), phi0(0))``."""
    a = weight.scale
    m = weight.m
    if form == "exponential":
        amp = 2.0 * a * weight.c ** weight.power
        return amp * np.exp(-0.5 * u), amp
    if form == "logistic_ll":
        return a * np.logaddexp(0.0, -u), a * math.log(2.0)
    if form == "savage":
        return 0.5 * a * special.expit(-u) ** 2, a / 8.0
    if form == "gaussian_loss":
        rm = math.sqrt(m)
        return a * special.ndtr(-(u + m / 2.0) / rm), a * special.ndtr(-rm / 2.0)
    if form == "laplace_loss":
        return a * _laplace_shape(u, m), a
    if form == "squared":
        return a * (1.0 - u) ** 2, a
    raise AssertionError(form)


def _ret(out, like):
    return float(np.asarray(out).reshape(-1)[0]) if np.ndim(like) == 0 else out


@dataclass(frozen=True)
class ConformableLoss:
    """A margin loss conformable to ``G(margin_scale * w)``.

    Build with :func:`make_loss`, :func:`named_loss` or :func:`reparameterize`.
    """

    dist: SymmetricCdf
    weight: WeightFn
    k: float
    closed_form: Optional[str] = None
    margin_scale: float = 1.0
    name: str = ""
    _codes: Optional[tuple] = field(default=None, compare=False, repr=False)

    @property
    def domain(self) -> tuple[float, float]:
        lo, hi = self.dist.support
        return (lo / self.margin_scale, hi / self.margin_scale)

    def check_domain(self, v) -> np.ndarray:
        arr = np.asarray(v, dtype=float)
        if np.isnan(arr).any():
            raise DomainError("margin is NaN")
        if self.dist.bounded:
            lo, hi = self.domain
            if ((arr <= lo) | (arr >= hi)).any():
                raise DomainError(f"loss {self.name!r} is defined for margins in ({lo:g}, {hi:g})")
        return arr

    # -- evaluation ---------------------------------------------------------

    def log_h(self, w):
        """log of the integrand ``q(w)^{-1/2} g(w)`` on the unscaled axis."""
        return self.weight.log_value(self.dist, w) - 0.5 * np.asarray(self.dist.log_odds(w))

    def derivative(self, v):
        """``phi'(v) = -s q(s v)^{-1/2} g(s v)``, no differencing."""
        arr = self.check_domain(v)
        u = self.margin_scale * arr
        out = -self.margin_scale * np.exp(self.log_h(u))
        return _ret(out, v)

    def value(self, v, method: str = "auto"):
        """``phi(v)``; ``method`` is ``"auto"``, ``"closed"`` or ``"quadrature"``."""
        arr = self.check_domain(v)
        u = self.margin_scale * arr
        if method == "auto":
            method = "closed" if self.closed_form else "quadrature"
        if method == "closed":
            if not self.closed_form:
                raise UnsupportedError(f"loss {self.name!r} has no closed form")
            phi_u, phi_0 = _canonical(self.closed_form, self.weight, u)
            out = (self.k - phi_0) + phi_u
        elif method == "quadrature":
            out = self.k - self._integral(u)
        else:
            raise ParameterError(f"unknown evaluation method {method!r}")
        return _ret(out, v)

    __call__ = value

    def _integral(self, u):
        if self._codes is not None:
            return quadrature.integrate_named_batch(self._codes, u)
        h = lambda w: np.exp(self.log_h(w))
        flat = np.asarray(u, dtype=float).reshape(-1)
        out = np.array([quadrature.integrate(h, 0.0, b) for b in flat])
        return out.reshape(np.shape(u))

    # -- bookkeeping --------------------------------------------------------

    @property
    def convex(self) -> Optional[bool]:
        """Convexity verdict on the default grid; ``None`` without a log-derivative."""
        if not self.weight.has_log_derivative:
            return None
        return convexity_check(self).convex

    def describe(self) -> dict:
        return {
            "name": self.name,
            "cdf": self.dist.name,
            "weight": self.weight.name,
            "k": self.k,
            "margin_scale": self.margin_scale,
            "closed_form": self.closed_form,
        }


def default_grid(loss: ConformableLoss) -> np.ndarray:
    """Built-in check grid: ``{+-0.25 j, j=1..40}`` plus a neighbourhood of 0
    (``{+-0.05 j, j=1..19}`` for the uniform CDF), on the loss's own axis."""
    if loss.dist.bounded:
        pos = 0.05 * np.arange(1, 20)
    else:
        pos = np.concatenate([[0.01, 0.1], 0.25 * np.arange(1, 41)])
    grid = np.concatenate([-pos[::-1], [0.0], pos])
    return grid / loss.margin_scale


def _even_grid(dist: SymmetricCdf) -> np.ndarray:
    if dist.bounded:
        pos = 0.05 * np.arange(1, 20)
    else:
        pos = 0.25 * np.arange(1, 41)
    return np.concatenate([-pos, pos])


def make_loss(dist: SymmetricCdf | str, weight: WeightFn, k: float, *,
              margin_scale: float = 1.0, name: str = "") -> ConformableLoss:
    """Construct ``phi(v) = k - int_0^v q^{-1/2} g``; rejects odd weights and ``k <= 0``."""
    dist = get_cdf(dist)
    k = float(k)
    if not (k > 0 and math.isfinite(k)):
        raise ParameterError(f"k must be a positive finite constant, got {k}")
    if not (margin_scale > 0 and math.isfinite(margin_scale)):
        raise ParameterError(f"margin_scale must be positive, got {margin_scale}")
    report = check_even(weight, dist, _even_grid(dist))
    if not report.passed:
        raise ParameterError(
            f"weight {weight.name!r} is not even (max |g(w) - g(-w)| = {report.max_asymmetry:.3g}); "
            "pass symmetrize=True to use its even part"
        )
    return ConformableLoss(
        dist=dist,
        weight=weight,
        k=k,
        closed_form=_closed_form_of(dist, weight),
        margin_scale=float(margin_scale),
        name=name or f"{dist.name}/{weight.name}",
        _codes=quadrature.named_codes(dist, weight),
    )


def named_loss(name: str, m: Optional[float] = None) -> ConformableLoss:
    """The tabulated losses plus ``squared`` and ``exp-unit`` (``e^{-v}``)."""
    name = name.lower()
    if name == "exponential":
        return make_loss(LOGISTIC, WeightFn.constant(0.5), 1.0, name="exponential")
    if name == "exp-unit":
        return make_loss(LOGISTIC, WeightFn.constant(0.5), 1.0, margin_scale=2.0, name="exp-unit")
    if name == "logistic":
        return make_loss(LOGISTIC, WeightFn.likelihood(), math.log(2.0), name="logistic")
    if name == "savage":
        # factor 2 so the antiderivative is exactly (1 + e^v)^{-2}
        return make_loss(LOGISTIC, WeightFn.savage().scaled(2.0), 0.25, name="savage")
    if name == "gaussian":
        m = 1.0 if m is None else float(m)
        k = float(special.ndtr(-math.sqrt(m) / 2.0)) if m > 0 else 1.0
        return make_loss(LOGISTIC, WeightFn.gaussian_kernel(m), k, name=f"gaussian:{m:g}")
    if name == "laplace":
        m = 2.0 if m is None else float(m)
        return make_loss(LOGISTIC, WeightFn.laplace_kernel(m), 1.0, name=f"laplace:{m:g}")
    if name == "squared":
        return make_loss(UNIFORM, squared_weight(), 1.0, name="squared")
    raise ParameterError(f"unknown loss {name!r}; expected one of {', '.join(LOSS_NAMES)}")


def parse_loss(text: str) -> ConformableLoss:
    """Parse ``name`` or ``name:m`` (e.g. ``laplace:5``)."""
    head, _, arg = text.strip().partition(":")
    m = None
    if arg:
        try:
            m = float(arg)
        except ValueError:
            raise ParameterError(f"bad loss parameter in {text!r}") from None
        if head.lower() not in ("gaussian", "laplace"):
            raise ParameterError(f"loss {head!r} takes no parameter")
    return named_loss(head, m)


def exponential_power(p: float) -> ConformableLoss:
    """``e^{-v p / 2}`` = ``|S|^p`` in terms of the standardized logistic residual."""
    if not (p > 0 and math.isfinite(p)):
        raise ParameterError(f"p must be positive, got {p}")
    return make_loss(LOGISTIC, WeightFn.constant(0.5), 1.0, margin_scale=float(p), name=f"pnorm:{p:g}")


def loss_eval(loss: ConformableLoss, v, method: str = "auto"):
    return loss.value(v, method)


def loss_derivative(loss: ConformableLoss, v):
    return loss.derivative(v)


class ConformabilityReport(NamedTuple):
    passed: bool
    max_rel_err: float
    skipped: tuple
    n_points: int


class ConvexityReport(NamedTuple):
    convex: bool
    max_violation: float
    n_points: int


def conformability_check(loss: ConformableLoss, grid=None, rtol: float = 1e-8) -> ConformabilityReport:
    """Ratio test ``phi'(-v)/phi'(v) = q(s v)`` on ``grid``.

    Points where either derivative underflows to zero are skipped and listed.
    """
    v = loss.check_domain(default_grid(loss) if grid is None else grid).ravel()
    d_pos = np.asarray(loss.derivative(v))
    d_neg = np.asarray(loss.derivative(-v))
    usable = (d_pos != 0) & (d_neg != 0)
    vs = v[usable]
    q = np.asarray(loss.dist.odds(loss.margin_scale * vs))
    rel = np.abs(d_neg[usable] / d_pos[usable] - q) / q
    max_rel = float(rel.max()) if rel.size else 0.0
    ok = bool(np.isfinite(rel).all() and max_rel <= rtol)
    return ConformabilityReport(ok, max_rel, tuple(float(x) for x in v[~usable]), int(v.size))


def convexity_check(loss: ConformableLoss, grid=None, atol: float = 1e-12) -> ConvexityReport:
    """Convex iff ``d/dw log g(w) <= (1/2) d/dw log q(w)`` at every grid point.

    ``max_violation`` is the largest value of the left side minus the right
    side; it is negative when the inequality holds strictly everywhere.
    """
    if not loss.weight.has_log_derivative:
        raise UnsupportedError(f"weight {loss.weight.name!r} has no log-derivative")
    v = loss.check_domain(default_grid(loss) if grid is None else grid).ravel()
    u = loss.margin_scale * v
    if np.isneginf(np.asarray(loss.weight.log_value(loss.dist, u))).any():
        raise DomainError("convexity criterion needs g > 0 on the grid")
    gap = np.asarray(loss.weight.log_derivative(loss.dist, u)) - 0.5 * np.asarray(loss.dist.dlog_odds(u))
    worst = float(gap.max())
    return ConvexityReport(worst <= atol, worst, int(v.size))


def reparameterize(dist: SymmetricCdf | str, b: Callable, g: WeightFn, k: float = 1.0, *,
                   b_log_derivative: Optional[Callable] = None, name: str = "") -> ConformableLoss:
    """Loss generated by ``h*(w) = q(w)^{-1/2} b(G(w)) g(w)``.

    ``b`` maps (0, 1) to positive reals with ``b(x) = b(1 - x)``; it must
    accept arrays.  ``b_log_derivative`` (d/dx log b) enables convexity checks.
    """
    dist = get_cdf(dist)
    x = np.linspace(1e-3, 1.0 - 1e-3, 999)
    bx, bmx = np.asarray(b(x), dtype=float), np.asarray(b(1.0 - x), dtype=float)
    if (np.abs(bx - bmx) > 1e-9 * (1.0 + np.abs(bx))).any():
        raise ParameterError("b must satisfy b(x) = b(1 - x)")
    if (bx < 0).any():
        raise ParameterError("b must be nonnegative")

    def g_star(w):
        return np.asarray(b(dist.cdf(w)), dtype=float) * g.value(dist, w)

    dlog = None
    if b_log_derivative is not None and g.has_log_derivative:
        def dlog(w):
            return (np.asarray(b_log_derivative(dist.cdf(w))) * dist.density(w)
                    + g.log_derivative(dist, w))

    weight = WeightFn.custom(g_star, dlog, name=f"b(G)*{g.name}")
    return make_loss(dist, weight, k, name=name or f"reparam/{dist.name}/{g.name}")


@dataclass(frozen=True)
class LossTable:
    grid: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray

    def rows(self):
        return zip(self.grid.tolist(), self.values.tolist(), self.derivatives.tolist())


def tabulate(loss: ConformableLoss, v_min: float, v_max: float, n_points: int,
             method: str = "auto") -> LossTable:
    """Uniform grid with ``phi`` and ``phi'`` columns."""
    if n_points < 2:
        raise ParameterError("n_points must be at least 2")
    if not v_min < v_max:
        raise ParameterError("v_min must be below v_max")
    grid = np.linspace(float(v_min), float(v_max), int(n_points))
    loss.check_domain(grid)
    return LossTable(grid, np.asarray(loss.value(grid, method)), np.asarray(loss.derivative(grid)))
