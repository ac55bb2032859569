"""Standardized logistic regression residuals (SLRRs) and the margin.

For a label ``y* in {-1, +1}`` and score ``f`` the residual
``S = (y - F(f)) / sqrt(F(f)(1 - F(f)))`` (``y = (y* + 1)/2``) collapses to
``y* exp(-y* f / 2)``, so ``-log S^2`` is exactly the margin ``y* f``.
Everything here is a consequence of that identity.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np
from scipy import special

from .errors import DegenerateMarginError, DomainError, EmptyDatasetError, LabelError

__all__ = [
    "SlrrValue",
    "Partition",
    "check_labels",
    "slrr",
    "slrr_definitional",
    "margin_of",
    "partition",
    "contribution_ratio",
    "geometric_mean_contrast",
    "component_log_s2",
    "loss_on_residual_scale",
]

LOG_SPACE_THRESHOLD = 60.0


def check_labels(y_star) -> np.ndarray:
    arr = np.asarray(y_star)
    if arr.size and not np.isin(arr, (-1, 1)).all():
        bad = arr[~np.isin(arr, (-1, 1))].ravel()[0]
        raise LabelError(f"labels must be -1 or +1, got {bad!r}")
    return arr.astype(float)


class SlrrValue(NamedTuple):
    """Signed residual ``s`` with the margin it came from."""

    s: float
    margin: float
    y_star: float

    @property
    def s_squared(self):
        return np.exp(-np.asarray(self.margin)) if np.ndim(self.margin) else math.exp(-self.margin)

    @property
    def log_s_squared(self):
        return -self.margin


def slrr(y_star, f) -> SlrrValue:
    """``s = y* exp(-y* f / 2)``; vectorised over matching shapes."""
    y = check_labels(y_star)
    f = np.asarray(f, dtype=float)
    if not np.isfinite(f).all():
        raise DomainError("score must be finite")
    margin = y * f
    with np.errstate(over="ignore"):
        s = y * np.exp(-0.5 * margin)
    if np.ndim(margin) == 0:
        return SlrrValue(float(s), float(margin), float(y))
    return SlrrValue(s, margin, np.broadcast_to(y, margin.shape))


def slrr_definitional(y_star, f):
    """The residual from its definition ``(y - F(f)) / sqrt(F(f)(1 - F(f)))``."""
    y01 = (check_labels(y_star) + 1.0) / 2.0
    f = np.asarray(f, dtype=float)
    p, p_bar = special.expit(f), special.expit(-f)
    # y - F(f) is 1 - F(f) = F(-f) for y = 1 and -F(f) for y = 0; no cancellation
    out = (y01 * p_bar - (1.0 - y01) * p) / np.sqrt(p * p_bar)
    return float(out) if np.ndim(out) == 0 else out


def margin_of(s) -> float:
    """``-log(s^2)``.

    Given an :class:`SlrrValue` with ``|margin| > 60`` the stored margin is
    returned, since ``s`` itself may have under- or overflowed.
    """
    if isinstance(s, SlrrValue):
        stored = np.asarray(s.margin, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            recomputed = -2.0 * np.log(np.abs(np.asarray(s.s, dtype=float)))
        out = np.where(np.abs(stored) > LOG_SPACE_THRESHOLD, stored, recomputed)
        return float(out) if out.ndim == 0 else out
    arr = np.asarray(s, dtype=float)
    if (arr == 0).any():
        raise DomainError("margin undefined for a zero residual")
    out = -2.0 * np.log(np.abs(arr))
    return float(out) if out.ndim == 0 else out


class Partition(NamedTuple):
    total_s2: float
    factor_s2: np.ndarray
    total_s: float
    factor_s: np.ndarray


def partition(y_star: int, components: Sequence[tuple[float, float]]) -> Partition:
    """Split ``S^2(sum theta_m b_m)`` into the per-component ``S^2(theta_m b_m)``.

    ``components`` holds ``(theta_m, b_m(x))`` pairs for one observation.
    The product of ``factor_s2`` equals ``total_s2``; the signed residuals
    satisfy ``S(f) = (y*)^(M+1) prod S(theta_m b_m)``.
    """
    if len(components) == 0:
        raise EmptyDatasetError("partition needs at least one component")
    y = float(check_labels(y_star))
    contrib = _contributions(components)
    if not np.isfinite(contrib).all():
        raise DomainError("components must be finite")
    total = slrr(y, contrib.sum())
    parts = slrr(np.full(contrib.shape, y), contrib)
    return Partition(total.s_squared, np.asarray(parts.s_squared), total.s, np.asarray(parts.s))


def _contributions(components) -> np.ndarray:
    return np.array([float(t) * float(b) for t, b in components])


def contribution_ratio(y_star: int, components, k: int) -> float:
    """Share of component ``k`` in the log squared residual:
    ``log S^2(theta_k b_k) / log S^2(f) = theta_k b_k / sum_m theta_m b_m``."""
    check_labels(y_star)
    contrib = _contributions(components)
    total = contrib.sum()
    if total == 0.0:
        raise DegenerateMarginError("contribution ratio undefined: total margin is zero")
    return float(contrib[k] / total)


def geometric_mean_contrast(y_star: int, components, k: int) -> float:
    """``log(S^2(theta_k b_k) / S^2(f)^(1/M))`` for one observation.

    Equals ``-y* (theta_k b_k - mean_m theta_m b_m)``.
    """
    y = float(check_labels(y_star))
    contrib = _contributions(components)
    log_s2 = -y * contrib
    return float(log_s2[k] - log_s2.sum() / contrib.size)


def component_log_s2(y_star, contributions) -> np.ndarray:
    """Per-row, per-component ``log S^2 = -y* theta_m b_m(x)`` for an ``(n, M)`` array."""
    y = check_labels(y_star)
    return -y[:, None] * np.asarray(contributions, dtype=float)


def loss_on_residual_scale(loss, s_abs):
    """``phi(-log S^2)``: the loss written as a function of ``|S|``."""
    s = np.asarray(s_abs, dtype=float)
    if not (s > 0).all():
        raise DomainError("|S| must be positive")
    return loss.value(-2.0 * np.log(s)) if s.ndim else loss.value(-2.0 * math.log(float(s)))
