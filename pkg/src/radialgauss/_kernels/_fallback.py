"""Pure numpy versions of the compiled kernels (identical call signatures)."""

import numpy as np


def _sort_order(r, order):
    if order is None:
        return np.argsort(r, kind="stable")
    sub = np.argsort(r[order], kind="stable")
    order[:] = order[sub]
    return order


def variance_value_grad(Z, target, eps, weight, grad):
    n, d = Z.shape
    Xc = Z - Z.mean(axis=0)
    std = np.sqrt((Xc * Xc).sum(axis=0) / (n - 1) + eps)
    gap = target - std
    active = gap > 0
    value = gap[active].sum() / d
    if grad is not None and weight != 0.0 and active.any():
        coef = np.where(active, -weight / (d * (n - 1) * std), 0.0)
        grad += Xc * coef
    return float(value)


def covariance_value_grad(Z, weight, grad):
    n, d = Z.shape
    Xc = Z - Z.mean(axis=0)
    C = Xc.T @ Xc / (n - 1)
    np.fill_diagonal(C, 0.0)
    value = float((C * C).sum() / d)
    if grad is not None and weight != 0.0:
        grad += (weight * 4.0 / (d * (n - 1))) * (Xc @ C)
    return value


def spacing_entropy_sorted(rs, m, tie_eps, gs):
    n = rs.shape[0]
    s = rs[m:] - rs[:-m]
    tied = s < tie_eps
    s = np.where(tied, tie_eps, s)
    value = float(np.mean(np.log((n + 1.0) / m * s)))
    if gs is not None:
        w = np.where(tied, 0.0, 1.0 / ((n - m) * s))
        gs[m:] += w
        gs[:-m] -= w
    return value


def row_norms(Z):
    return np.sqrt(np.einsum("ij,ij->i", Z, Z))


def radial_value_grad(Z, beta1, beta2, m, tie_eps, grad, order, with_entropy):
    n, d = Z.shape
    r = row_norms(Z)
    if np.any(r <= tie_eps):
        return float("nan"), float("nan"), 1
    ce = float(np.mean(0.5 * r * r - (d - 1) * np.log(r)))
    ent = float("nan")
    want_grad = grad is not None
    dr = beta1 / n * (r - (d - 1) / r) if want_grad else None
    if with_entropy or (want_grad and beta2 != 0.0):
        idx = _sort_order(r, order)
        rs = r[idx]
        if want_grad and beta2 != 0.0:
            gs = np.zeros(n)
            ent = spacing_entropy_sorted(rs, m, tie_eps, gs)
            dr[idx] -= beta2 * gs
        else:
            ent = spacing_entropy_sorted(rs, m, tie_eps, None)
    if want_grad:
        grad += (dr / r)[:, None] * Z
    return ce, ent, 0


def w1_radial_value_grad(Z, ref_sorted, weight, tie_eps, grad, order):
    n = Z.shape[0]
    r = row_norms(Z)
    idx = _sort_order(r, order)
    diff = r[idx] - ref_sorted
    value = float(np.abs(diff).sum() / n)
    if grad is not None and weight != 0.0:
        if np.any(r <= tie_eps):
            return float("nan"), 1
        dr = np.empty(n)
        dr[idx] = weight / n * np.sign(diff)
        grad += (dr / r)[:, None] * Z
    return value, 0


def linear_assignment(cost):
    """Shortest-augmenting-path assignment with the column scan vectorized."""
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    if cost.shape[1] != n:
        raise ValueError("cost matrix must be square")
    u = np.zeros(n)
    v = np.zeros(n)
    col4row = np.full(n, -1, dtype=np.int64)
    row4col = np.full(n, -1, dtype=np.int64)
    for cur in range(n):
        shortest = np.full(n, np.inf)
        path = np.full(n, -1, dtype=np.int64)
        SR = np.zeros(n, dtype=bool)
        SC = np.zeros(n, dtype=bool)
        min_val = 0.0
        i = cur
        sink = -1
        while sink == -1:
            SR[i] = True
            rem = np.flatnonzero(~SC)
            reduced = min_val + cost[i, rem] - u[i] - v[rem]
            better = reduced < shortest[rem]
            shortest[rem[better]] = reduced[better]
            path[rem[better]] = i
            cand = shortest[rem]
            lowest = cand.min()
            if not np.isfinite(lowest):
                raise ValueError("cost matrix is infeasible")
            ties = rem[cand == lowest]
            free = ties[row4col[ties] == -1]
            j = int(free[0]) if free.size else int(ties[0])
            min_val = lowest
            if row4col[j] == -1:
                sink = j
            else:
                i = int(row4col[j])
            SC[j] = True
        u[cur] += min_val
        others = np.flatnonzero(SR)
        others = others[others != cur]
        u[others] += min_val - shortest[col4row[others]]
        v[SC] -= min_val - shortest[SC]
        j = sink
        while True:
            i = int(path[j])
            row4col[j] = i
            col4row[i], j = j, int(col4row[i])
            if i == cur:
                break
    return col4row


def objective_step(Z, lam2, var_target, var_eps, lam3, beta1, beta2, m, tie_eps, grad, order,
                   with_values):
    nan = float("nan")
    v = c = ce = ent = nan
    if lam2 != 0.0 or lam3 != 0.0 or with_values:
        v = variance_value_grad(Z, var_target, var_eps, lam2, grad)
        c = covariance_value_grad(Z, lam3, grad)
    if beta1 != 0.0 or beta2 != 0.0 or with_values:
        ce, ent, status = radial_value_grad(
            Z, beta1, beta2, m, tie_eps, grad, order, with_values or beta2 != 0.0
        )
        if status:
            return v, c, nan, nan, status
    return v, c, ce, ent, 0
