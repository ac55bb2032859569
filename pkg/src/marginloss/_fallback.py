"""Pure-numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` operation for operation.  The stump search
performs the same additions in the same order, so both backends select the
same stump bit-for-bit; quadrature results agree to rounding (the compiled
path calls libm where this one calls numpy ufuncs).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Nodes on [-1, 1] in the order used for one vectorised call.
_NODES = np.concatenate([-XGK[:7], [0.0], XGK[6::-1]])
_KW = np.concatenate([WGK[:7], [WGK[7]], WGK[6::-1]])
# Gauss weights sit on the odd Kronrod indices 1, 3, 5 and the centre.
_GW = np.zeros(15)
_GW[[1, 3, 5]] = WG[:3]
_GW[7] = WG[3]
_GW[[9, 11, 13]] = WG[2::-1]

DIST_CODES = {"logistic": 0, "uniform": 1, "gaussian": 2}
WEIGHT_CODES = {"constant": 0, "likelihood": 1, "savage": 2, "gauss": 3, "laplace": 4, "buzas2009": 5}

_LOG2 = math.log(2.0)
_LOG2PI = math.log(2.0 * math.pi)


def gk15(f, a, b):
    """One Gauss-Kronrod 7/15 panel: ``(kronrod, |kronrod - gauss|)``."""
    half = 0.5 * (b - a)
    centre = 0.5 * (a + b)
    fx = np.asarray(f(centre + half * _NODES), dtype=float)
    k = half * float(np.dot(_KW, fx))
    g = half * float(np.dot(_GW, fx))
    return k, abs(k - g)


def adaptive_gk(f, a, b, tol, limit):
    """Globally adaptive bisection; returns ``(value, error_estimate, ok)``.

    ``f`` must accept an array of 15 abscissae.  The panel with the largest
    error estimate (first one on ties) is bisected until the summed
    estimate drops below ``tol`` or ``limit`` panels exist.
    """
    if a == b:
        return 0.0, 0.0, True
    k, e = gk15(f, a, b)
    lo, hi, res, err = [a], [b], [k], [e]
    while True:
        total_err = math.fsum(err)
        if not math.isfinite(total_err) or not all(map(math.isfinite, res)):
            return math.fsum(res), math.inf, False
        if total_err <= tol:
            return math.fsum(res), total_err, True
        if len(res) >= limit:
            return math.fsum(res), total_err, False
        i = max(range(len(err)), key=err.__getitem__)
        a0, b0 = lo[i], hi[i]
        mid = 0.5 * (a0 + b0)
        if mid == a0 or mid == b0:
            return math.fsum(res), total_err, False
        k1, e1 = gk15(f, a0, mid)
        k2, e2 = gk15(f, mid, b0)
        lo[i], hi[i], res[i], err[i] = a0, mid, k1, e1
        lo.append(mid)
        hi.append(b0)
        res.append(k2)
        err.append(e2)


def _log_logistic(w):
    return -np.logaddexp(0.0, -w)


def log_integrand(dist_code, weight_code, m, c, log_scale, power, w):
    """log h(w) = log g(w) - log q(w) / 2 for a named (G, g) pair."""
    w = np.asarray(w, dtype=float)
    if dist_code == 0:
        log_g_cdf, log_g_sf = _log_logistic(w), _log_logistic(-w)
        log_dens = log_g_cdf + log_g_sf
        log_q = w
    elif dist_code == 1:
        log_g_cdf, log_g_sf = np.log1p(w) - _LOG2, np.log1p(-w) - _LOG2
        log_dens = np.full_like(w, -_LOG2)
        log_q = log_g_cdf - log_g_sf
    else:
        log_g_cdf, log_g_sf = special.log_ndtr(w), special.log_ndtr(-w)
        log_dens = -0.5 * w * w - 0.5 * _LOG2PI
        log_q = log_g_cdf - log_g_sf

    if weight_code == 0:
        with np.errstate(divide="ignore"):
            log_g = np.full_like(w, math.log(c) if c > 0 else -np.inf)
    elif weight_code == 1:
        log_g = log_dens - 0.5 * (log_g_cdf + log_g_sf)
    elif weight_code == 2:
        log_g = 1.5 * (_log_logistic(w) + _log_logistic(-w))
    elif weight_code == 3:
        log_g = -0.5 * (_LOG2PI + math.log(m)) - w * w / (2.0 * m) - m / 8.0
    elif weight_code == 4:
        log_g = math.log((m + 1.0) / 2.0) - 0.5 * m * np.abs(w)
    elif weight_code == 5:
        z = w / m
        log_g = (-math.log(m) - 0.5 * z * z - 0.5 * _LOG2PI
                 - 0.5 * (_log_logistic(w) + _log_logistic(-w)))
    else:
        raise ValueError(f"unknown weight code {weight_code}")
    return log_scale + power * log_g - 0.5 * log_q


def quad_named_batch(dist_code, weight_code, m, c, log_scale, power, upper, tol, limit):
    """Integrate h from 0 to each entry of ``upper``.

    Returns ``(values, errors, ok)`` arrays.
    """
    upper = np.ascontiguousarray(upper, dtype=float)
    values = np.empty_like(upper)
    errors = np.empty_like(upper)
    ok = np.empty(upper.shape, dtype=bool)

    def h(w):
        return np.exp(log_integrand(dist_code, weight_code, m, c, log_scale, power, w))

    flat_v, flat_e, flat_ok = values.reshape(-1), errors.reshape(-1), ok.reshape(-1)
    for i, b in enumerate(upper.reshape(-1)):
        flat_v[i], flat_e[i], flat_ok[i] = adaptive_gk(h, 0.0, float(b), tol, limit)
    return values, errors, ok


def best_stump(X, y, w, order):
    """Exhaustive decision-stump search on normalised weights.

    ``order[j]`` is a stable argsort of ``X[:, j]``.  Candidate thresholds
    are midpoints between consecutive distinct values.  Returns
    ``(feature, threshold, polarity, error)``; ``feature == -1`` when every
    feature is constant.  Ties resolve to the lower feature, then the lower
    threshold, then polarity +1.
    """
    n, p = X.shape
    wpos = np.where(y > 0, w, 0.0)
    wneg = np.where(y > 0, 0.0, w)
    best = (-1, 0.0, 1, math.inf)
    for j in range(p):
        idx = order[j]
        xs = X[idx, j]
        cum_p = np.cumsum(wpos[idx])
        cum_n = np.cumsum(wneg[idx])
        tot_p, tot_n = cum_p[-1], cum_n[-1]
        cut = np.nonzero(xs[1:] > xs[:-1])[0]
        if cut.size == 0:
            continue
        err_plus = cum_p[cut] + (tot_n - cum_n[cut])
        err_minus = cum_n[cut] + (tot_p - cum_p[cut])
        both = np.empty(2 * cut.size)
        both[0::2] = err_plus
        both[1::2] = err_minus
        k = int(np.argmin(both))
        if both[k] < best[3]:
            i = cut[k // 2]
            thr = 0.5 * (xs[i] + xs[i + 1])
            best = (j, float(thr), 1 if k % 2 == 0 else -1, float(both[k]))
    return best
