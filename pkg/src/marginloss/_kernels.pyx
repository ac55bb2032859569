# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the quadrature and stump-search kernels.

Same algorithms and selection order as ``_fallback.py``.
"""

import numpy as np
cimport cython
from libc.math cimport exp, log, log1p, fabs, erfc, sqrt, isfinite, INFINITY

cdef double LOG2 = 0.693147180559945309417232121458
cdef double LOG2PI = 1.83787706640934548356065947281
cdef double SQRT1_2 = 0.707106781186547524400844362105

cdef double[8] XGK = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
]
cdef double[8] WGK = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
]
cdef double[4] WG = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
]


cdef inline double log_logistic(double w) nogil:
    if w >= 0:
        return -log1p(exp(-w))
    return w - log1p(exp(w))


cdef double log_ndtr(double x) nogil:
    cdef double z, x2, s, term
    cdef int k
    if x > 0:
        return log1p(-0.5 * erfc(x * SQRT1_2))
    if x > -30.0:
        return log(0.5 * erfc(-x * SQRT1_2))
    # asymptotic tail: log phi(x) - log|x| + log(1 - 1/x^2 + 3/x^4 - ...)
    x2 = x * x
    s = 1.0
    term = 1.0
    for k in range(1, 8):
        term *= -(2.0 * k - 1.0) / x2
        s += term
    return -0.5 * x2 - log(-x) - 0.5 * LOG2PI + log(s)


cdef struct Integrand:
    int dist
    int weight
    double m
    double c
    double log_scale
    double power


cdef double log_h(Integrand* it, double w) nogil:
    cdef double lc, ls, ldens, lq, lg, z
    if it.dist == 0:
        lc = log_logistic(w)
        ls = log_logistic(-w)
        ldens = lc + ls
        lq = w
    elif it.dist == 1:
        lc = log1p(w) - LOG2
        ls = log1p(-w) - LOG2
        ldens = -LOG2
        lq = lc - ls
    else:
        lc = log_ndtr(w)
        ls = log_ndtr(-w)
        ldens = -0.5 * w * w - 0.5 * LOG2PI
        lq = lc - ls

    if it.weight == 0:
        lg = log(it.c) if it.c > 0 else -INFINITY
    elif it.weight == 1:
        lg = ldens - 0.5 * (lc + ls)
    elif it.weight == 2:
        lg = 1.5 * (log_logistic(w) + log_logistic(-w))
    elif it.weight == 3:
        lg = -0.5 * (LOG2PI + log(it.m)) - w * w / (2.0 * it.m) - it.m / 8.0
    elif it.weight == 4:
        lg = log((it.m + 1.0) / 2.0) - 0.5 * it.m * fabs(w)
    else:
        z = w / it.m
        lg = -log(it.m) - 0.5 * z * z - 0.5 * LOG2PI - 0.5 * (log_logistic(w) + log_logistic(-w))
    return it.log_scale + it.power * lg - 0.5 * lq


cdef void gk15(Integrand* it, double a, double b, double* res, double* err) nogil:
    cdef double half = 0.5 * (b - a)
    cdef double centre = 0.5 * (a + b)
    cdef double fc = exp(log_h(it, centre))
    cdef double resk = WGK[7] * fc
    cdef double resg = WG[3] * fc
    cdef double f1, f2, dx
    cdef int j
    for j in range(7):
        dx = half * XGK[j]
        f1 = exp(log_h(it, centre - dx))
        f2 = exp(log_h(it, centre + dx))
        resk += WGK[j] * (f1 + f2)
        if j == 1:
            resg += WG[0] * (f1 + f2)
        elif j == 3:
            resg += WG[1] * (f1 + f2)
        elif j == 5:
            resg += WG[2] * (f1 + f2)
    res[0] = half * resk
    err[0] = fabs(half * resk - half * resg)


cdef int adaptive(Integrand* it, double a, double b, double tol, int limit,
                  double* lo, double* hi, double* rs, double* es,
                  double* value, double* error) nogil:
    cdef int n = 1, i, j
    cdef double total_err, total, a0, b0, mid
    if a == b:
        value[0] = 0.0
        error[0] = 0.0
        return 1
    lo[0] = a
    hi[0] = b
    gk15(it, a, b, &rs[0], &es[0])
    while True:
        total_err = 0.0
        total = 0.0
        for j in range(n):
            total_err += es[j]
            total += rs[j]
        value[0] = total
        error[0] = total_err
        if not isfinite(total_err) or not isfinite(total):
            error[0] = INFINITY
            return 0
        if total_err <= tol:
            return 1
        if n >= limit:
            return 0
        i = 0
        for j in range(1, n):
            if es[j] > es[i]:
                i = j
        a0 = lo[i]
        b0 = hi[i]
        mid = 0.5 * (a0 + b0)
        if mid == a0 or mid == b0:
            return 0
        hi[i] = mid
        gk15(it, a0, mid, &rs[i], &es[i])
        lo[n] = mid
        hi[n] = b0
        gk15(it, mid, b0, &rs[n], &es[n])
        n += 1


def quad_named_batch(int dist_code, int weight_code, double m, double c,
                     double log_scale, double power, upper, double tol, int limit):
    """Integrate h from 0 to each entry of ``upper``; ``(values, errors, ok)``."""
    cdef const double[::1] ub = np.ascontiguousarray(upper, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t n = ub.shape[0], i
    values = np.empty(n, dtype=np.float64)
    errors = np.empty(n, dtype=np.float64)
    ok = np.empty(n, dtype=np.uint8)
    cdef double[::1] vv = values
    cdef double[::1] ev = errors
    cdef unsigned char[::1] okv = ok
    cdef double[::1] lo = np.empty(limit, dtype=np.float64)
    cdef double[::1] hi = np.empty(limit, dtype=np.float64)
    cdef double[::1] rs = np.empty(limit, dtype=np.float64)
    cdef double[::1] es = np.empty(limit, dtype=np.float64)
    cdef Integrand it
    it.dist = dist_code
    it.weight = weight_code
    it.m = m
    it.c = c
    it.log_scale = log_scale
    it.power = power
    with nogil:
        for i in range(n):
            okv[i] = adaptive(&it, 0.0, ub[i], tol, limit, &lo[0], &hi[0], &rs[0], &es[0],
                              &vv[i], &ev[i])
    shape = np.shape(upper)
    return values.reshape(shape), errors.reshape(shape), ok.astype(bool).reshape(shape)


def log_integrand(int dist_code, int weight_code, double m, double c,
                  double log_scale, double power, w):
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64).reshape(-1)
    out = np.empty(wv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Integrand it
    cdef Py_ssize_t i
    it.dist = dist_code
    it.weight = weight_code
    it.m = m
    it.c = c
    it.log_scale = log_scale
    it.power = power
    for i in range(wv.shape[0]):
        ov[i] = log_h(&it, wv[i])
    return out.reshape(np.shape(w))


def best_stump(X, y, w, order):
    """Exhaustive decision-stump search; see ``_fallback.best_stump``."""
    cdef const double[:, :] Xv = np.asarray(X, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef const long long[:, ::1] ov = np.ascontiguousarray(order, dtype=np.int64)
    cdef Py_ssize_t n = Xv.shape[0], p = Xv.shape[1], j, i
    cdef long long a, b
    cdef double tot_p, tot_n, cum_p, cum_n, ep, em
    cdef int best_j = -1, best_pol = 1
    cdef double best_thr = 0.0, best_err = INFINITY
    with nogil:
        for j in range(p):
            tot_p = 0.0
            tot_n = 0.0
            for i in range(n):
                a = ov[j, i]
                if yv[a] > 0:
                    tot_p = tot_p + wv[a]
                else:
                    tot_n = tot_n + wv[a]
            cum_p = 0.0
            cum_n = 0.0
            for i in range(n - 1):
                a = ov[j, i]
                b = ov[j, i + 1]
                if yv[a] > 0:
                    cum_p = cum_p + wv[a]
                else:
                    cum_n = cum_n + wv[a]
                if not (Xv[b, j] > Xv[a, j]):
                    continue
                ep = cum_p + (tot_n - cum_n)
                em = cum_n + (tot_p - cum_p)
                if ep < best_err:
                    best_err = ep
                    best_j = <int>j
                    best_pol = 1
                    best_thr = 0.5 * (Xv[a, j] + Xv[b, j])
                if em < best_err:
                    best_err = em
                    best_j = <int>j
                    best_pol = -1
                    best_thr = 0.5 * (Xv[a, j] + Xv[b, j])
    return best_j, best_thr, best_pol, best_err
