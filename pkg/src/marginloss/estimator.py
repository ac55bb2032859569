"""Empirical risk minimisation for models linear in their coefficients.

The score is ``f(x; beta) = z(x)^T beta`` where ``z`` is either the raw
features or a fixed basis expansion ``(b_1(x), ..., b_M(x))``, optionally
with a leading intercept column.  Risk and gradient sums are reduced over
fixed-size row chunks in chunk order, so results do not depend on the
number of worker threads.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .data import Dataset
from .distributions import LOGISTIC, SymmetricCdf
from .errors import DomainError, EmptyDatasetError, ParameterError
from .losses import ConformableLoss, exponential_power

__all__ = [
    "ModelSpec",
    "FitOptions",
    "FitResult",
    "FitStatus",
    "empirical_risk",
    "risk_gradient",
    "fit",
    "pnorm_fit",
    "pnorm_objective",
    "score_at",
    "expected_score",
    "score_variance",
    "score_sensitivity",
    "predict",
    "classify",
    "soft_probability",
    "exp_empirical_risk",
]

CHUNK_ROWS = 8192


@dataclass(frozen=True)
class ModelSpec:
    """``kind`` is ``"linear"`` or ``"basis_expansion"``.

    Basis functions map an ``(n, p)`` feature array to ``n`` values and are
    fixed; only their coefficients are fitted.
    """

    kind: str = "linear"
    basis: tuple = field(default=(), compare=False)
    intercept: bool = False

    def __post_init__(self):
        if self.kind not in ("linear", "basis_expansion"):
            raise ParameterError(f"unknown model kind {self.kind!r}")
        if self.kind == "basis_expansion" and len(self.basis) < 1:
            raise ParameterError("a basis expansion needs at least one basis function")
        object.__setattr__(self, "basis", tuple(self.basis))

    @classmethod
    def linear(cls, intercept: bool = False) -> "ModelSpec":
        return cls("linear", intercept=intercept)

    @classmethod
    def expansion(cls, basis: Sequence[Callable], intercept: bool = False) -> "ModelSpec":
        return cls("basis_expansion", basis=tuple(basis), intercept=intercept)

    def design(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if self.kind == "linear":
            Z = X
        else:
            Z = np.column_stack([np.asarray(b(X), dtype=float).reshape(-1) for b in self.basis])
            if not np.isfinite(Z).all():
                raise DomainError("basis functions returned non-finite values")
        if self.intercept:
            Z = np.column_stack([np.ones(Z.shape[0]), Z])
        return Z

    def n_coef(self, p: int) -> int:
        base = p if self.kind == "linear" else len(self.basis)
        return base + int(self.intercept)

    def components(self, X, beta) -> np.ndarray:
        """``(n, M)`` per-term contributions ``theta_m b_m(x)``; rows sum to ``f``."""
        return self.design(X) * np.asarray(beta, dtype=float)

    def to_dict(self) -> dict:
        if self.kind != "linear":
            raise ParameterError("only linear models serialise to JSON")
        return {"kind": "linear", "intercept": self.intercept}


def _check_beta(spec: ModelSpec, beta, p: int) -> np.ndarray:
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if beta.size != spec.n_coef(p):
        raise ParameterError(f"beta has {beta.size} entries, model needs {spec.n_coef(p)}")
    return beta


class _Objective:
    """Chunked ``(1/n) sum phi(y z^T beta)`` and its gradient."""

    def __init__(self, loss: ConformableLoss, spec: ModelSpec, data: Dataset, threads: int = 1):
        self.loss = loss
        self.Z = spec.design(data.X)
        self.y = data.y.astype(float)
        self.n = data.n
        self.threads = max(1, int(threads))
        self.bounds = [(i, min(i + CHUNK_ROWS, self.n)) for i in range(0, self.n, CHUNK_ROWS)]

    def margins(self, beta) -> np.ndarray:
        return self.y * (self.Z @ beta)

    def _map(self, fn):
        if self.threads == 1 or len(self.bounds) == 1:
            return [fn(b) for b in self.bounds]
        with ThreadPoolExecutor(self.threads) as ex:
            return list(ex.map(fn, self.bounds))

    def risk(self, beta) -> float:
        def part(bounds):
            a, b = bounds
            v = self.y[a:b] * (self.Z[a:b] @ beta)
            return float(np.sum(self.loss.value(v)))

        total = 0.0
        for s in self._map(part):
            total += s
        return total / self.n

    def gradient(self, beta) -> np.ndarray:
        def part(bounds):
            a, b = bounds
            v = self.y[a:b] * (self.Z[a:b] @ beta)
            w = np.asarray(self.loss.derivative(v)) * self.y[a:b]
            return w @ self.Z[a:b]

        total = np.zeros(self.Z.shape[1])
        for s in self._map(part):
            total = total + s
        return total / self.n


def empirical_risk(loss: ConformableLoss, spec: ModelSpec, beta, data: Dataset, threads: int = 1) -> float:
    """``(1/n) sum_i phi(y*_i f(x_i; beta))``."""
    beta = _check_beta(spec, beta, data.p)
    return _Objective(loss, spec, data, threads).risk(beta)


def risk_gradient(loss: ConformableLoss, spec: ModelSpec, beta, data: Dataset, threads: int = 1) -> np.ndarray:
    """``(1/n) sum_i phi'(y*_i f_i) y*_i z(x_i)``."""
    beta = _check_beta(spec, beta, data.p)
    return _Objective(loss, spec, data, threads).gradient(beta)


class FitStatus(str, enum.Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    DIVERGED_SEPARABLE = "diverged_separable"


@dataclass(frozen=True)
class FitOptions:
    tolerance: float = 1e-8
    max_iter: int = 20000
    restarts: int = 5
    seed: int = 0
    threads: int = 1
    armijo: float = 1e-4
    shrink: float = 0.5
    initial_step: float = 1.0
    divergence_threshold: float = 1e4

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ParameterError("tolerance must be positive")
        if self.max_iter < 1 or self.restarts < 1:
            raise ParameterError("max_iter and restarts must be at least 1")
        if not 0 < self.shrink < 1 or not 0 < self.armijo < 1:
            raise ParameterError("shrink and armijo must lie in (0, 1)")


@dataclass
class FitResult:
    beta: np.ndarray
    status: FitStatus
    iterations: int
    final_risk: float
    gradient_norm: float
    restarts: int = 1
    risk_history: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "beta": [float(b) for b in self.beta],
            "status": self.status.value,
            "iterations": self.iterations,
            "final_risk": self.final_risk,
            "gradient_norm": self.gradient_norm,
            "restarts": self.restarts,
        }


def _safe_risk(obj: _Objective, beta) -> float:
    try:
        r = obj.risk(beta)
    except DomainError:
        return math.inf
    return r if not math.isnan(r) else math.inf


def _descend(obj: _Objective, beta0: np.ndarray, opts: FitOptions) -> FitResult:
    beta = beta0.copy()
    risk = obj.risk(beta)
    if not math.isfinite(risk):
        raise DomainError(f"non-finite risk {risk} at the starting point")
    history = [risk]
    ray_ok = not obj.loss.dist.bounded
    it = 0
    while True:
        grad = obj.gradient(beta)
        gnorm = float(np.max(np.abs(grad)))
        if not math.isfinite(gnorm):
            raise DomainError("non-finite gradient encountered")
        if gnorm <= opts.tolerance:
            return FitResult(beta, FitStatus.CONVERGED, it, risk, gnorm, risk_history=history)
        if it >= opts.max_iter:
            return FitResult(beta, FitStatus.MAX_ITERATIONS, it, risk, gnorm, risk_history=history)
        if ray_ok and np.all(obj.margins(beta) > 0):
            return _follow_ray(obj, beta, risk, it, opts, history)
        if np.max(np.abs(beta)) > opts.divergence_threshold:
            return FitResult(beta, FitStatus.DIVERGED_SEPARABLE, it, risk, gnorm, risk_history=history)

        g2 = float(grad @ grad)
        step = opts.initial_step
        while True:
            trial = beta - step * grad
            r_trial = _safe_risk(obj, trial)
            if r_trial <= risk - opts.armijo * step * g2:
                break
            step *= opts.shrink
            if step < 1e-30:
                # no representable decrease along -grad: report where we are
                return FitResult(beta, FitStatus.MAX_ITERATIONS, it, risk, gnorm, risk_history=history)
        beta, risk = trial, r_trial
        history.append(risk)
        it += 1


def _follow_ray(obj, beta, risk, it, opts, history) -> FitResult:
    # Every margin is positive and phi is strictly decreasing, so the risk
    # keeps falling along t * beta: no finite minimiser exists.
    while np.max(np.abs(beta)) <= opts.divergence_threshold:
        beta = 2.0 * beta
        risk = min(risk, _safe_risk(obj, beta))
        history.append(risk)
        it += 1
    gnorm = float(np.max(np.abs(obj.gradient(beta))))
    return FitResult(beta, FitStatus.DIVERGED_SEPARABLE, it, risk, gnorm, risk_history=history)


def fit(loss: ConformableLoss, spec: ModelSpec, data: Dataset,
        options: Optional[FitOptions] = None, beta_init=None) -> FitResult:
    """Gradient descent with Armijo backtracking.

    Convex losses start from zero (or ``beta_init``).  Other losses run
    ``options.restarts`` descents from ``U[-1, 1]`` starting points drawn
    with ``options.seed`` and keep the lowest final risk.
    """
    opts = options or FitOptions()
    if data.n == 0:
        raise EmptyDatasetError("empty dataset")
    obj = _Objective(loss, spec, data, opts.threads)
    d = spec.n_coef(data.p)
    if beta_init is not None:
        return _descend(obj, _check_beta(spec, beta_init, data.p), opts)
    if loss.convex:
        return _descend(obj, np.zeros(d), opts)
    rng = np.random.Generator(np.random.PCG64(opts.seed))
    starts = rng.uniform(-1.0, 1.0, (opts.restarts, d))
    best = None
    total_iter = 0
    for s in starts:
        res = _descend(obj, s, opts)
        total_iter += res.iterations
        if best is None or res.final_risk < best.final_risk:
            best = res
    best.restarts = opts.restarts
    return best


def pnorm_objective(spec: ModelSpec, beta, data: Dataset, p: float) -> float:
    """``||S||_p^p = sum_i exp(-y*_i f_i p / 2)``."""
    beta = _check_beta(spec, beta, data.p)
    v = data.y * (spec.design(data.X) @ beta)
    return float(np.sum(np.exp(-0.5 * p * v)))


def pnorm_fit(spec: ModelSpec, data: Dataset, p: float, options: Optional[FitOptions] = None) -> FitResult:
    """Minimise ``||S||_p^p``; ``p = 2`` is the unit-exponent exponential loss."""
    return fit(exponential_power(p), spec, data, options)


# -- estimating-score diagnostics ---------------------------------------------

def _row(spec: ModelSpec, beta, x_row):
    z = spec.design(np.asarray(x_row, dtype=float).reshape(1, -1))[0]
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if beta.size != z.size:
        raise ParameterError(f"beta has {beta.size} entries, model needs {z.size}")
    return z, float(z @ beta)


def score_at(loss: ConformableLoss, spec: ModelSpec, beta, x_row, y_star) -> np.ndarray:
    """``d/dbeta phi(y* f(x; beta))`` for one observation."""
    if y_star not in (-1, 1):
        raise ParameterError(f"label must be -1 or +1, got {y_star!r}")
    z, f = _row(spec, beta, x_row)
    return loss.derivative(y_star * f) * y_star * z


def expected_score(loss: ConformableLoss, spec: ModelSpec, beta, x_row, prob: Optional[float] = None) -> np.ndarray:
    """Score averaged over ``y*`` with ``Pr(y* = 1) = prob`` (default ``G(f)``)."""
    z, f = _row(spec, beta, x_row)
    p1 = loss.dist.cdf(loss.margin_scale * f) if prob is None else prob
    return (p1 * loss.derivative(f) - (1.0 - p1) * loss.derivative(-f)) * z


def _require_unscaled(loss):
    if loss.margin_scale != 1.0:
        raise ParameterError("score variance and sensitivity need margin_scale = 1")


def score_variance(loss: ConformableLoss, spec: ModelSpec, beta, x_row) -> np.ndarray:
    """``g(f)^2 (df/dbeta)(df/dbeta)^T`` under ``Pr(y* = 1 | x) = G(f)``."""
    _require_unscaled(loss)
    z, f = _row(spec, beta, x_row)
    g = loss.weight.value(loss.dist, f)
    return g * g * np.outer(z, z)


def score_sensitivity(loss: ConformableLoss, spec: ModelSpec, beta, x_row) -> np.ndarray:
    """``[G'(f) g(f) / sqrt(G(f)(1 - G(f)))] (df/dbeta)(df/dbeta)^T``."""
    _require_unscaled(loss)
    z, f = _row(spec, beta, x_row)
    dist = loss.dist
    g = loss.weight.value(dist, f)
    factor = math.exp(dist.log_density(f) - 0.5 * (dist.log_cdf(f) + dist.log_sf(f))) * g
    return factor * np.outer(z, z)


# -- prediction ---------------------------------------------------------------

class Classification(NamedTuple):
    labels: np.ndarray
    degenerate: np.ndarray


def predict(spec: ModelSpec, beta, X) -> np.ndarray:
    Z = spec.design(X)
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if beta.size != Z.shape[1]:
        raise ParameterError(f"beta has {beta.size} entries, model needs {Z.shape[1]}")
    return Z @ beta


def classify(spec: ModelSpec, beta, X) -> Classification:
    """``sign(f)`` with ``sign(0) = +1``; ``degenerate`` marks the zero scores."""
    f = predict(spec, beta, X)
    return Classification(np.where(f >= 0, 1, -1).astype(np.int8), f == 0)


def soft_probability(spec: ModelSpec, beta, X, dist: SymmetricCdf = LOGISTIC) -> np.ndarray:
    """``F(f(x))`` by default; pass the loss's CDF for the ``G``-scale probability."""
    return np.asarray(dist.cdf(predict(spec, beta, X)))


def exp_empirical_risk(spec: ModelSpec, beta, data: Dataset) -> float:
    """``R_Emp = (1/n) sum_i exp(-y*_i f(x_i))``; near 1 at the population logit."""
    v = data.y * predict(spec, beta, data.X)
    return float(np.mean(np.exp(-v)))
