# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Same call signatures and return conventions as ``_fallback.py``.  Every
reduction runs in a fixed sequential order so results are bit-reproducible.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, log, sqrt, INFINITY

cnp.import_array()


def _sort_order(double[::1] r, order):
    """Argsort of ``r``, warm-started from a previous permutation."""
    r_np = np.asarray(r)
    if order is None:
        return np.argsort(r_np, kind="stable")
    sub = np.argsort(r_np[order], kind="stable")
    order[:] = order[sub]
    return order


def variance_value_grad(double[:, ::1] Z, double target, double eps, double weight, grad):
    cdef Py_ssize_t n = Z.shape[0], d = Z.shape[1], i, j
    cdef double[::1] mean = np.zeros(d)
    cdef double[::1] std = np.zeros(d)
    cdef double[::1] coef = np.zeros(d)
    cdef double value = 0.0, acc, diff
    cdef double[:, ::1] g
    for i in range(n):
        for j in range(d):
            mean[j] += Z[i, j]
    for j in range(d):
        mean[j] /= n
    for j in range(d):
        acc = 0.0
        for i in range(n):
            diff = Z[i, j] - mean[j]
            acc += diff * diff
        std[j] = sqrt(acc / (n - 1) + eps)
        if target - std[j] > 0:
            value += target - std[j]
            coef[j] = -weight / (d * (n - 1) * std[j])
    value /= d
    if grad is not None and weight != 0.0:
        g = grad
        for i in range(n):
            for j in range(d):
                if coef[j] != 0.0:
                    g[i, j] += coef[j] * (Z[i, j] - mean[j])
    return value


def covariance_value_grad(double[:, ::1] Z, double weight, grad):
    cdef Py_ssize_t n = Z.shape[0], d = Z.shape[1], i, j, k
    cdef double[::1] mean = np.zeros(d)
    cdef double[:, ::1] C = np.zeros((d, d))
    cdef double value = 0.0, scale, acc
    cdef double[:, ::1] g
    for i in range(n):
        for j in range(d):
            mean[j] += Z[i, j]
    for j in range(d):
        mean[j] /= n
    for i in range(n):
        for j in range(d):
            for k in range(j + 1, d):
                C[j, k] += (Z[i, j] - mean[j]) * (Z[i, k] - mean[k])
    for j in range(d):
        for k in range(j + 1, d):
            C[j, k] /= (n - 1)
            C[k, j] = C[j, k]
            value += 2.0 * C[j, k] * C[j, k]
    value /= d
    if grad is not None and weight != 0.0:
        g = grad
        scale = weight * 4.0 / (d * (n - 1))
        for i in range(n):
            for j in range(d):
                acc = 0.0
                for k in range(d):
                    if k != j:
                        acc += (Z[i, k] - mean[k]) * C[k, j]
                g[i, j] += scale * acc
    return value


cdef double _spacing_scatter(double[::1] rs, Py_ssize_t m, double tie_eps, double[::1] gs,
                             bint want_value=True):
    """m-spacing entropy of sorted ``rs``; adds dH/drs into ``gs`` when given.

    Returns NaN without evaluating any logarithm when ``want_value`` is false.
    """
    cdef Py_ssize_t n = rs.shape[0], i
    cdef double logc = log((n + 1.0) / m)
    cdef double total = 0.0, s, w
    cdef double inv = 1.0 / (n - m)
    cdef bint want = gs is not None
    for i in range(n - m):
        s = rs[i + m] - rs[i]
        if s < tie_eps:
            if want_value:
                total += logc + log(tie_eps)
        else:
            if want_value:
                total += logc + log(s)
            if want:
                w = inv / s
                gs[i + m] += w
                gs[i] -= w
    if not want_value:
        return float("nan")
    return total * inv


def spacing_entropy_sorted(double[::1] rs, Py_ssize_t m, double tie_eps, gs):
    if gs is None:
        return _spacing_scatter(rs, m, tie_eps, None)
    return _spacing_scatter(rs, m, tie_eps, gs)


def row_norms(double[:, ::1] Z):
    cdef Py_ssize_t n = Z.shape[0], d = Z.shape[1], i, j
    cdef double[::1] r = np.empty(n)
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(d):
            acc += Z[i, j] * Z[i, j]
        r[i] = sqrt(acc)
    return np.asarray(r)


def radial_value_grad(double[:, ::1] Z, double beta1, double beta2, Py_ssize_t m,
                      double tie_eps, grad, order, bint with_entropy):
    """Returns ``(ce, entropy, status)``; ``status == 1`` flags a near-origin row.

    ``grad`` (optional) receives ``beta1 * d ce - beta2 * d entropy``.
    ``entropy`` is NaN when it was not requested.
    """
    cdef Py_ssize_t n = Z.shape[0], d = Z.shape[1], i, j, p
    cdef double[::1] r = row_norms(Z)
    cdef double ce = 0.0, ent = float("nan"), coef
    cdef double[::1] dr = np.zeros(n)
    cdef double[::1] rs
    cdef double[::1] gs
    cdef cnp.int64_t[::1] idx
    cdef bint want_grad = grad is not None
    cdef double[:, ::1] g
    for i in range(n):
        if r[i] <= tie_eps:
            return float("nan"), float("nan"), 1
    for i in range(n):
        ce += 0.5 * r[i] * r[i] - (d - 1) * log(r[i])
        if want_grad:
            dr[i] = beta1 / n * (r[i] - (d - 1) / r[i])
    ce /= n
    if with_entropy or (want_grad and beta2 != 0.0):
        ordr = _sort_order(r, order)
        idx = ordr
        rs = np.empty(n)
        for p in range(n):
            rs[p] = r[idx[p]]
        if want_grad and beta2 != 0.0:
            gs = np.zeros(n)
            ent = _spacing_scatter(rs, m, tie_eps, gs)
            for p in range(n):
                dr[idx[p]] -= beta2 * gs[p]
        else:
            ent = _spacing_scatter(rs, m, tie_eps, None)
    if want_grad:
        g = grad
        for i in range(n):
            coef = dr[i] / r[i]
            for j in range(d):
                g[i, j] += coef * Z[i, j]
    return ce, ent, 0


def w1_radial_value_grad(double[:, ::1] Z, double[::1] ref_sorted, double weight,
                         double tie_eps, grad, order):
    """Sorted-pair W1 between row norms and ``ref_sorted``; ``(value, status)``."""
    cdef Py_ssize_t n = Z.shape[0], d = Z.shape[1], i, j, p
    cdef double[::1] r = row_norms(Z)
    cdef double total = 0.0, diff, coef
    cdef cnp.int64_t[::1] idx
    cdef bint want_grad = grad is not None and weight != 0.0
    cdef double[:, ::1] g
    ordr = _sort_order(r, order)
    idx = ordr
    if want_grad:
        for i in range(n):
            if r[i] <= tie_eps:
                return float("nan"), 1
        g = grad
    for p in range(n):
        i = idx[p]
        diff = r[i] - ref_sorted[p]
        total += fabs(diff)
        if want_grad and diff != 0.0:
            coef = weight / n / r[i]
            if diff < 0:
                coef = -coef
            for j in range(d):
                g[i, j] += coef * Z[i, j]
    return total / n, 0


def linear_assignment(double[:, ::1] cost):
    """Minimum-cost perfect matching on a square cost matrix.

    Shortest augmenting paths with dual potentials (Jonker-Volgenant style);
    returns ``col4row``.
    """
    cdef Py_ssize_t n = cost.shape[0], cur, i, j, it, index, num_remaining, sink, tmp
    cdef double min_val, lowest, reduced
    cdef double[::1] u = np.zeros(n)
    cdef double[::1] v = np.zeros(n)
    cdef double[::1] shortest = np.empty(n)
    cdef cnp.int64_t[::1] path = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] col4row = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] row4col = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] remaining = np.empty(n, dtype=np.int64)
    cdef unsigned char[::1] SR = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] SC = np.zeros(n, dtype=np.uint8)
    if cost.shape[1] != n:
        raise ValueError("cost matrix must be square")
    for cur in range(n):
        for j in range(n):
            shortest[j] = INFINITY
            path[j] = -1
            SR[j] = 0
            SC[j] = 0
            remaining[j] = n - 1 - j
        num_remaining = n
        min_val = 0.0
        i = cur
        sink = -1
        while sink == -1:
            SR[i] = 1
            index = -1
            lowest = INFINITY
            for it in range(num_remaining):
                j = remaining[it]
                reduced = min_val + cost[i, j] - u[i] - v[j]
                if reduced < shortest[j]:
                    path[j] = i
                    shortest[j] = reduced
                if shortest[j] < lowest or (shortest[j] == lowest and row4col[j] == -1):
                    lowest = shortest[j]
                    index = it
            min_val = lowest
            if min_val == INFINITY:
                raise ValueError("cost matrix is infeasible")
            j = remaining[index]
            if row4col[j] == -1:
                sink = j
            else:
                i = row4col[j]
            SC[j] = 1
            num_remaining -= 1
            remaining[index] = remaining[num_remaining]
        u[cur] += min_val
        for i in range(n):
            if SR[i] and i != cur:
                u[i] += min_val - shortest[col4row[i]]
        for j in range(n):
            if SC[j]:
                v[j] -= min_val - shortest[j]
        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            tmp = col4row[i]
            col4row[i] = j
            j = tmp
            if i == cur:
                break
    return np.asarray(col4row)


cdef int _vc2(double[:, ::1] Z, double lam2, double var_target, double var_eps, double lam3,
             double[:, ::1] grad, double* out):
    """2-D specialization of the variance/covariance pass (scalar accumulators)."""
    cdef Py_ssize_t n = Z.shape[0], i
    cdef double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0, cx, cy
    cdef double sdx, sdy, ax = 0.0, ay = 0.0, v = 0.0, cov, cs
    for i in range(n):
        mx += Z[i, 0]
        my += Z[i, 1]
    mx /= n
    my /= n
    for i in range(n):
        cx = Z[i, 0] - mx
        cy = Z[i, 1] - my
        sxx += cx * cx
        syy += cy * cy
        sxy += cx * cy
    sdx = sqrt(sxx / (n - 1) + var_eps)
    sdy = sqrt(syy / (n - 1) + var_eps)
    if var_target - sdx > 0:
        v += var_target - sdx
        ax = -lam2 / (2.0 * (n - 1) * sdx)
    if var_target - sdy > 0:
        v += var_target - sdy
        ay = -lam2 / (2.0 * (n - 1) * sdy)
    cov = sxy / (n - 1)
    out[0] = v / 2.0
    out[1] = cov * cov
    cs = lam3 * 4.0 / (2.0 * (n - 1)) * cov
    if ax != 0.0 or ay != 0.0 or cs != 0.0:
        for i in range(n):
            cx = Z[i, 0] - mx
            cy = Z[i, 1] - my
            grad[i, 0] += ax * cx + cs * cy
            grad[i, 1] += ay * cy + cs * cx
    return 0


cdef int _vcd(double[:, ::1] Z, double lam2, double var_target, double var_eps, double lam3,
              double[:, ::1] grad, double* out):
    cdef Py_ssize_t n = Z.shape[0], d = Z.shape[1], i, j, k
    cdef double[::1] mean = np.zeros(d)
    cdef double[::1] cen = np.zeros(d)
    cdef double[::1] vcoef = np.zeros(d)
    cdef double[:, ::1] M = np.zeros((d, d))
    cdef double std, v = 0.0, c = 0.0, cscale, acc
    for i in range(n):
        for j in range(d):
            mean[j] += Z[i, j]
    for j in range(d):
        mean[j] /= n
    for i in range(n):
        for j in range(d):
            cen[j] = Z[i, j] - mean[j]
        for j in range(d):
            for k in range(j, d):
                M[j, k] += cen[j] * cen[k]
    for j in range(d):
        for k in range(j, d):
            M[j, k] /= (n - 1)
            M[k, j] = M[j, k]
        std = sqrt(M[j, j] + var_eps)
        if var_target - std > 0:
            v += var_target - std
            vcoef[j] = -lam2 / (d * (n - 1) * std)
        for k in range(j + 1, d):
            c += 2.0 * M[j, k] * M[j, k]
    out[0] = v / d
    out[1] = c / d
    cscale = lam3 * 4.0 / (d * (n - 1))
    for j in range(d):
        M[j, j] = 0.0
    for i in range(n):
        for j in range(d):
            cen[j] = Z[i, j] - mean[j]
        for j in range(d):
            acc = vcoef[j] * cen[j]
            if cscale != 0.0:
                for k in range(d):
                    acc += cscale * cen[k] * M[k, j]
            grad[i, j] += acc
    return 0


def objective_step(double[:, ::1] Z, double lam2, double var_target, double var_eps,
                   double lam3, double beta1, double beta2, Py_ssize_t m, double tie_eps,
                   double[:, ::1] grad, order, bint with_values):
    """Fused variance + covariance + radial pass used by the optimizer.

    Adds ``lam2 dv + lam3 dc + beta1 dce - beta2 dH`` into ``grad`` and
    returns ``(v, c, ce, H, status)``.  Terms with zero weight are skipped
    unless ``with_values`` is set; the radial values (which need logarithms)
    are only evaluated when ``with_values`` is set and are NaN otherwise.
    """
    cdef Py_ssize_t n = Z.shape[0], d = Z.shape[1], i, j, p
    cdef bint do_vc = lam2 != 0.0 or lam3 != 0.0 or with_values
    cdef bint do_ce = beta1 != 0.0 or beta2 != 0.0 or with_values
    cdef bint do_ent = beta2 != 0.0 or with_values
    cdef double v = float("nan"), c = float("nan"), ce = float("nan"), ent = float("nan")
    cdef double vc_out[2]
    cdef double[::1] r
    cdef double[::1] dr
    cdef double[::1] rs
    cdef double[::1] gs
    cdef cnp.int64_t[::1] idx
    cdef double rc
    if do_vc:
        if d == 2:
            _vc2(Z, lam2, var_target, var_eps, lam3, grad, vc_out)
        else:
            _vcd(Z, lam2, var_target, var_eps, lam3, grad, vc_out)
        v = vc_out[0]
        c = vc_out[1]
    if not do_ce:
        return v, c, ce, ent, 0
    r = row_norms(Z)
    dr = np.empty(n)
    for i in range(n):
        if r[i] <= tie_eps:
            return v, c, float("nan"), float("nan"), 1
        dr[i] = beta1 / n * (r[i] - (d - 1) / r[i])
    if with_values:
        ce = 0.0
        for i in range(n):
            ce += 0.5 * r[i] * r[i] - (d - 1) * log(r[i])
        ce /= n
    if do_ent:
        ordr = _sort_order(r, order)
        idx = ordr
        rs = np.empty(n)
        for p in range(n):
            rs[p] = r[idx[p]]
        if beta2 != 0.0:
            gs = np.zeros(n)
            ent = _spacing_scatter(rs, m, tie_eps, gs, with_values)
            for p in range(n):
                dr[idx[p]] -= beta2 * gs[p]
        else:
            ent = _spacing_scatter(rs, m, tie_eps, None)
    for i in range(n):
        rc = dr[i] / r[i]
        for j in range(d):
            grad[i, j] += rc * Z[i, j]
    return v, c, ce, ent, 0
