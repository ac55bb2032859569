"""AdaBoost with decision stumps as forward stagewise exponential-loss fitting.

At stage ``m`` each row carries weight ``exp(-y*_i f_{m-1}(x_i))``, which
is the product of the squared residuals ``S^2(theta_k G_k(x_i))`` of the
earlier stages.  Weights are kept in log space and normalised before the
stump search; the unnormalised log weights of every stage are retained.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import logsumexp

from ._backend import kernels as _default_kernels
from .data import Dataset
from .errors import DegenerateStageError, ParameterError

__all__ = [
    "Stump",
    "BoostModel",
    "BoostStatus",
    "DiagnosticRow",
    "train_adaboost",
    "boost_predict",
    "boost_classify",
    "staged_diagnostics",
    "THETA_EPS",
]

THETA_EPS = 1e-10


@dataclass(frozen=True)
class Stump:
    """Predicts ``polarity`` where ``x[feature_index] > threshold``, else ``-polarity``."""

    feature_index: int
    threshold: float
    polarity: int = 1

    def __post_init__(self):
        if self.polarity not in (-1, 1):
            raise ParameterError("stump polarity must be -1 or +1")
        if self.feature_index < 0:
            raise ParameterError("feature_index must be nonnegative")

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        above = X[:, self.feature_index] > self.threshold
        return np.where(above, self.polarity, -self.polarity).astype(float)


class BoostStatus(str, enum.Enum):
    COMPLETED = "completed"
    EARLY_STOPPED = "early_stopped"
    DEGENERATE = "degenerate"


@dataclass
class BoostModel:
    stages: list = field(default_factory=list)
    staged_r_emp: list = field(default_factory=list)
    status: BoostStatus = BoostStatus.COMPLETED
    stage_log_weights: list = field(default_factory=list, repr=False)
    errors: list = field(default_factory=list)
    seed: int = 0

    def __len__(self):
        return len(self.stages)

    def truncated(self, m: int) -> "BoostModel":
        return BoostModel(list(self.stages[:m]), list(self.staged_r_emp[: m + 1]), self.status)

    def to_dict(self) -> dict:
        return {
            "kind": "adaboost_stumps",
            "status": self.status.value,
            "seed": self.seed,
            "stages": [
                {"theta": t, "feature_index": s.feature_index, "threshold": s.threshold,
                 "polarity": s.polarity, "weighted_error": e}
                for (t, s), e in zip(self.stages, self.errors)
            ],
            "staged_r_emp": list(self.staged_r_emp),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoostModel":
        stages = [(float(s["theta"]), Stump(int(s["feature_index"]), float(s["threshold"]), int(s["polarity"])))
                  for s in d["stages"]]
        errs = [float(s.get("weighted_error", math.nan)) for s in d["stages"]]
        return cls(stages, list(d.get("staged_r_emp", [])), BoostStatus(d.get("status", "completed")),
                   errors=errs, seed=int(d.get("seed", 0)))


def _theta(err: float) -> float:
    err = min(max(err, THETA_EPS), 1.0 - THETA_EPS)
    return 0.5 * math.log((1.0 - err) / err)


def train_adaboost(data: Dataset, n_stages: int, r_emp_stop: Optional[float] = None,
                   seed: int = 0, kernels=None, strict: bool = False) -> BoostModel:
    """Fit ``n_stages`` stumps by forward stagewise exponential-loss minimisation.

    Training halts early with status ``early_stopped`` once the training
    ``R_Emp`` is at or below ``r_emp_stop``, and with ``degenerate`` when no
    stump has weighted error below one half (``strict=True`` raises
    :class:`DegenerateStageError` instead).  The search is deterministic, so
    ``seed`` is only recorded in the model.
    """
    if n_stages < 1:
        raise ParameterError("n_stages must be at least 1")
    y = data.y.astype(float)
    if data.n < 2 or np.unique(y).size < 2:
        raise ParameterError("boosting needs at least 2 rows with both labels")
    k = kernels or _default_kernels
    X = np.ascontiguousarray(data.X)
    order = np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T)

    model = BoostModel(seed=seed, staged_r_emp=[1.0])
    f = np.zeros(data.n)
    for _ in range(n_stages):
        log_w = -y * f
        model.stage_log_weights.append(log_w.copy())
        w = np.exp(log_w - logsumexp(log_w))
        j, thr, pol, _err = k.best_stump(X, y, w, order)
        if j < 0:
            return _halt(model, strict, "every feature is constant")
        stump = Stump(int(j), float(thr), int(pol))
        pred = stump.predict(X)
        err = float(np.sum(w[pred != y]))
        if err >= 0.5:
            return _halt(model, strict, f"best weighted error {err:.6g} is not below 1/2")
        theta = _theta(err)
        f = f + theta * pred
        model.stages.append((theta, stump))
        model.errors.append(err)
        r_emp = float(np.mean(np.exp(-y * f)))
        model.staged_r_emp.append(r_emp)
        if r_emp_stop is not None and r_emp <= r_emp_stop:
            model.status = BoostStatus.EARLY_STOPPED
            return model
    return model


def _halt(model: BoostModel, strict: bool, why: str) -> BoostModel:
    if strict:
        raise DegenerateStageError(why)
    model.status = BoostStatus.DEGENERATE
    model.stage_log_weights.pop()
    return model


def boost_predict(model: BoostModel, X) -> np.ndarray:
    """``f(x) = sum_m theta_m G_m(x)``."""
    if not model.stages:
        raise ParameterError("empty boosting model")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    f = np.zeros(X.shape[0])
    for theta, stump in model.stages:
        f = f + theta * stump.predict(X)
    return f


class Classification(NamedTuple):
    labels: np.ndarray
    degenerate: np.ndarray


def boost_classify(model: BoostModel, X) -> Classification:
    f = boost_predict(model, X)
    return Classification(np.where(f >= 0, 1, -1).astype(np.int8), f == 0)


class DiagnosticRow(NamedTuple):
    stage: int
    train_risk: float
    r_emp: float
    misclassification: float


def staged_diagnostics(model: BoostModel, data: Dataset) -> list:
    """One row per stage ``0..M``.

    ``train_risk`` is the mean unit-exponent exponential loss, ``r_emp``
    the mean squared residual ``S^2(f_m)`` and ``misclassification`` the
    training error rate of ``sign(f_m)`` with ``sign(0) = +1``.
    """
    y = data.y.astype(float)
    f = np.zeros(data.n)
    rows = []
    for m in range(len(model.stages) + 1):
        if m:
            theta, stump = model.stages[m - 1]
            f = f + theta * stump.predict(data.X)
        margin = y * f
        s = y * np.exp(-0.5 * margin)
        labels = np.where(f >= 0, 1.0, -1.0)
        rows.append(DiagnosticRow(m, float(np.mean(np.exp(-margin))), float(np.mean(s * s)),
                                  float(np.mean(labels != y))))
    return rows
