"""Adaptive Gauss-Kronrod quadrature of loss integrands.

Named (G, g) pairs go through the selected kernel backend in one batch;
arbitrary callables use the numpy implementation panel by panel.
"""

from __future__ import annotations

import numpy as np

from . import _backend
from ._fallback import DIST_CODES, WEIGHT_CODES, adaptive_gk
from .errors import QuadratureError

ABS_TOL = 1e-10
MAX_PANELS = 400


def integrate(func, a: float, b: float, tol: float = ABS_TOL, limit: int = MAX_PANELS) -> float:
    """Integrate a vectorised ``func`` over ``[a, b]`` to absolute ``tol``."""
    value, err, ok = adaptive_gk(func, float(a), float(b), tol, limit)
    if not ok:
        raise QuadratureError(f"integral over [{a}, {b}] missed tolerance {tol:g} (estimate {err:.3g})")
    return value


def named_codes(dist, weight):
    """Kernel codes for a (dist, weight) pair, or ``None`` for custom weights."""
    code = WEIGHT_CODES.get(weight.kind.value)
    if code is None:
        return None
    return (DIST_CODES[dist.kind.value], code, float(weight.m or 0.0), float(weight.c),
            float(np.log(weight.scale)), float(weight.power))


def integrate_named_batch(codes, upper, tol: float = ABS_TOL, limit: int = MAX_PANELS,
                          kernels=None):
    """``int_0^u h`` for each ``u`` in ``upper`` using compiled or fallback kernels."""
    kernels = kernels or _backend.kernels
    values, errors, ok = kernels.quad_named_batch(*codes, upper, tol, limit)
    if not np.all(ok):
        bad = np.asarray(upper).reshape(-1)[~np.asarray(ok).reshape(-1)][0]
        raise QuadratureError(f"integral over [0, {bad}] missed tolerance {tol:g}")
    return values
