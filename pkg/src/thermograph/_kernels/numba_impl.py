"""numba-compiled kernels; signatures mirror ``numpy_impl`` exactly.

The heavy inner loops (brute-force return-path walks, taboo matrix
propagation, calibration double sums, power iteration) are written as
plain loops and jitted.  No fastmath: results must be reproducible.
"""

import math

import numpy as np
from numba import njit

BACKEND = "numba"


@njit(cache=True, nogil=True)
def dfs_return_weight_sums(indptr, indices, weights, v, n_max):
    sums = np.zeros(n_max + 1)
    comp = np.zeros(n_max + 1)
    node = np.zeros(n_max + 2, dtype=np.int64)
    eptr = np.zeros(n_max + 2, dtype=np.int64)
    prod = np.zeros(n_max + 2)
    node[0] = v
    eptr[0] = indptr[v]
    prod[0] = 1.0
    d = 0
    while d >= 0:
        if eptr[d] >= indptr[node[d] + 1]:
            d -= 1
            continue
        e = eptr[d]
        eptr[d] += 1
        t = indices[e]
        w = prod[d] * weights[e]
        length = d + 1
        if t == v:
            y = w - comp[length]
            s = sums[length] + y
            comp[length] = (s - sums[length]) - y
            sums[length] = s
        elif length < n_max:
            node[d + 1] = t
            eptr[d + 1] = indptr[t]
            prod[d + 1] = w
            d += 1
    return sums


@njit(cache=True, nogil=True)
def dfs_find_cycle_in_range(indptr, indices, v, lo, hi, cap):
    if hi - lo <= 1:
        return 0
    n_edges_max = hi - 1
    node = np.zeros(n_edges_max + 2, dtype=np.int64)
    eptr = np.zeros(n_edges_max + 2, dtype=np.int64)
    node[0] = v
    eptr[0] = indptr[v]
    d = 0
    expanded = 0
    while d >= 0:
        if eptr[d] >= indptr[node[d] + 1]:
            d -= 1
            continue
        e = eptr[d]
        eptr[d] += 1
        expanded += 1
        if expanded > cap:
            return -1
        t = indices[e]
        length = d + 1
        if t == v:
            if lo < length < hi:
                return length
        elif length < n_edges_max:
            node[d + 1] = t
            eptr[d + 1] = indptr[t]
            d += 1
    return 0


@njit(cache=True, nogil=True)
def taboo_series(W, v, n_max):
    V = W.shape[0]
    q = np.zeros(n_max + 1)
    if n_max >= 1:
        q[1] = W[v, v]
    if V == 1:
        return q, True
    nb = V - 1
    row = np.empty(nb)
    col = np.empty(nb)
    B = np.empty((nb, nb))
    j = 0
    for i in range(V):
        if i == v:
            continue
        row[j] = W[v, i]
        col[j] = W[i, v]
        jj = 0
        for i2 in range(V):
            if i2 == v:
                continue
            B[j, jj] = W[i, i2]
            jj += 1
        j += 1
    y = col.copy()
    n = 2
    while n <= n_max:
        nonzero = False
        for i in range(nb):
            if y[i] != 0.0:
                nonzero = True
                break
        if not nonzero:
            return q, True
        acc = 0.0
        c = 0.0
        for i in range(nb):
            t = row[i] * y[i] - c
            s = acc + t
            c = (s - acc) - t
            acc = s
        q[n] = acc
        y2 = np.zeros(nb)
        for i in range(nb):
            yi = y[i]
            if yi != 0.0:
                for i2 in range(nb):
                    y2[i2] += B[i2, i] * yi
        y = y2
        n += 1
    for i in range(nb):
        if y[i] != 0.0:
            return q, False
    return q, True


@njit(cache=True, nogil=True)
def poly_eval(coeffs, z, order):
    n = coeffs.shape[0] - 1
    if n < 1:
        return 0.0
    acc = 0.0
    c = 0.0
    for i in range(1, n + 1):
        if coeffs[i] == 0.0:
            continue
        if order == 0:
            term = coeffs[i] * z ** i
        else:
            term = coeffs[i] * i * z ** (i - 1)
        # nonnegative terms: an overflowing partial sum is honestly +inf,
        # and letting it enter the compensation would turn it into nan
        if not np.isfinite(term):
            return term
        t = term - c
        s = acc + t
        c = (s - acc) - t
        acc = s
        if not np.isfinite(acc):
            return acc
    return acc


@njit(cache=True, nogil=True)
def power_iteration(A, tol, max_iter):
    V = A.shape[0]
    sigma = 0.0
    for i in range(V):
        rs = 0.0
        for j in range(V):
            rs += A[i, j]
        if rs > sigma:
            sigma = rs
    sigma *= 0.5
    if sigma <= 0.0:
        sigma = 1.0
    x = np.ones(V)
    y = np.ones(V)
    lam = 1.0
    res_r = 1.0e300
    res_l = 1.0e300
    it = 0
    for it in range(1, max_iter + 1):
        Ax = A @ x
        yA = y @ A
        yx = 0.0
        yAx = 0.0
        for i in range(V):
            yx += y[i] * x[i]
            yAx += y[i] * Ax[i]
        if yx > 0.0:
            lam = yAx / yx
        mr = 0.0
        ml = 0.0
        mx = 0.0
        my = 0.0
        for i in range(V):
            dr = abs(Ax[i] - lam * x[i])
            dl = abs(yA[i] - lam * y[i])
            if dr > mr:
                mr = dr
            if dl > ml:
                ml = dl
            ax = abs(x[i])
            ay = abs(y[i])
            if ax > mx:
                mx = ax
            if ay > my:
                my = ay
        res_r = mr / (abs(lam) * mx)
        res_l = ml / (abs(lam) * my)
        if res_r <= tol and res_l <= tol:
            break
        sx = 0.0
        sy = 0.0
        for i in range(V):
            x[i] = Ax[i] + sigma * x[i]
            y[i] = yA[i] + sigma * y[i]
            sx += abs(x[i])
            sy += abs(y[i])
        for i in range(V):
            x[i] /= sx
            y[i] /= sy
    return lam, x, y, res_r, res_l, it


@njit(cache=True, nogil=True)
def jumpy_series_sums(gamma, s, N, lgfact, logx):
    lg = math.log(gamma) if gamma > 0.0 else 0.0
    l1g = math.log1p(gamma)
    S0 = 0.0
    c0 = 0.0
    S1 = 0.0
    c1 = 0.0
    for n in range(1, N + 1):
        row = 0.0
        cr = 0.0
        # only k = 0 survives at gamma = 0; k*lg would be 0*(-inf)
        kmax = n if gamma > 0.0 else 1
        for k in range(kmax):
            logterm = (
                lgfact[n - 1] - lgfact[k] - lgfact[n - 1 - k]
                + k * lg + n * (logx - l1g) - s * math.log(n + k)
            )
            t = math.exp(logterm) - cr
            sr = row + t
            cr = (sr - row) - t
            row = sr
        t0 = row - c0
        s0 = S0 + t0
        c0 = (s0 - S0) - t0
        S0 = s0
        t1 = n * row - c1
        s1 = S1 + t1
        c1 = (s1 - S1) - t1
        S1 = s1
    return S0, S1


@njit(cache=True, nogil=True)
def chain_exp_sums(n, s, a):
    E = 0.0
    ce = 0.0
    D = 0.0
    cd = 0.0
    for i in range(1, n + 1):
        ps = float(i) ** (-s)
        ai = a * i
        te = ps * math.expm1(ai) - ce
        se = E + te
        ce = (se - E) - te
        E = se
        td = ps * i * math.exp(ai) - cd
        sd = D + td
        cd = (sd - D) - td
        D = sd
    return E, D
