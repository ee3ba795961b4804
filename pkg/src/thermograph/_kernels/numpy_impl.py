"""Pure numpy/stdlib reference implementations of the hot kernels.

Semantically equivalent to the numba versions in ``numba_impl``; selected
via THERMOGRAPH_NUMBA=0 or used automatically when numba is unavailable.
Summations here rely on numpy pairwise reduction over nonnegative terms,
which keeps relative error near machine epsilon without compensation.
"""

import math

import numpy as np

BACKEND = "numpy"


def dfs_return_weight_sums(indptr, indices, weights, v, n_max):
    """Sum weights of all first-return paths at v, bucketed by length.

    Walks start and end at v and never visit v in between; interior
    vertices may repeat.  Returns sums[0..n_max] with sums[L] the total
    weight of length-L returns.  Brute-force depth-first walk, used as an
    independent oracle against the taboo-matrix computation.
    """
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
            # Kahan accumulation: path counts can reach ~1e9 in dense graphs.
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


def dfs_find_cycle_in_range(indptr, indices, v, lo, hi, cap):
    """Length of some first-return path at v with lo < length < hi, else 0.

    Returns -1 if more than ``cap`` edges were expanded before an answer.
    """
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


def taboo_series(W, v, n_max):
    """First-return coefficients q[1..n_max] at v from the weight matrix.

    q[1] is the self-loop weight; for n >= 2 the walk stays inside the
    complement of v, so q[n] = row_v . B^(n-2) . col_v with B the weight
    matrix with row and column v removed.  Returns (q, terminated); once
    the propagated vector hits exact zero every later coefficient is zero
    and the series is a polynomial.
    """
    V = W.shape[0]
    q = np.zeros(n_max + 1)
    if n_max >= 1:
        q[1] = W[v, v]
    others = np.array([i for i in range(V) if i != v], dtype=np.int64)
    if others.size == 0:
        return q, True
    row = W[v, others]
    col = W[others, v]
    B = W[np.ix_(others, others)]
    y = col.copy()
    n = 2
    while n <= n_max:
        if not np.any(y):
            return q, True
        q[n] = float(row @ y)
        y = B @ y
        n += 1
    return q, bool(not np.any(y))


def poly_eval(coeffs, z, order):
    """Evaluate sum coeffs[i] z^i (order 0) or its derivative (order 1)."""
    n = coeffs.shape[0] - 1
    if n < 1:
        return 0.0
    i = np.arange(1, n + 1, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        if order == 0:
            terms = coeffs[1:] * np.float_power(z, i)
        else:
            terms = coeffs[1:] * i * np.float_power(z, i - 1.0)
    # a zero coefficient past the overflow horizon gives 0 * inf; the term is 0
    terms = np.where(np.isnan(terms), 0.0, terms)
    return float(np.sum(terms))


def power_iteration(A, tol, max_iter):
    """Two-sided power iteration for the dominant eigentriple of A >= 0.

    Iterates on A + sigma*I (sigma > 0) so periodic graphs converge too;
    the shift leaves eigenvectors unchanged.  Returns
    (lam, right, left, res_right, res_left, iters); residuals are
    max-norm relative to lam * max|vector|.
    """
    V = A.shape[0]
    sigma = 0.5 * float(np.max(np.sum(A, axis=1)))
    if sigma <= 0.0:
        sigma = 1.0
    x = np.ones(V)
    y = np.ones(V)
    lam = 1.0
    res_r = math.inf
    res_l = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        Ax = A @ x
        yA = y @ A
        yx = float(y @ x)
        if yx > 0.0:
            lam = float(y @ Ax) / yx
        res_r = float(np.max(np.abs(Ax - lam * x))) / (abs(lam) * float(np.max(np.abs(x))))
        res_l = float(np.max(np.abs(yA - lam * y))) / (abs(lam) * float(np.max(np.abs(y))))
        if res_r <= tol and res_l <= tol:
            break
        x = Ax + sigma * x
        x /= float(np.sum(np.abs(x)))
        y = yA + sigma * y
        y /= float(np.sum(np.abs(y)))
    return lam, x, y, res_r, res_l, it


def jumpy_series_sums(gamma, s, N, lgfact, logx):
    """Double sums behind the two-jump family series.

    Returns (S0, S1) where, summing over cycle length n <= N and two-step
    count k <= n-1 with binomial multiplicity and x = z*(1+gamma) <= 1,
      S0 = sum C(n-1,k) gamma^k (1+gamma)^(-n) (n+k)^(-s) x^n
      S1 = sum n * [same summand].
    Terms are computed in log space; C(9999, 5000) overflows otherwise.
    """
    lg = math.log(gamma) if gamma > 0 else -math.inf
    l1g = math.log1p(gamma)
    S0 = 0.0
    S1 = 0.0
    for n in range(1, N + 1):
        if gamma <= 0.0:
            # only k = 0 survives; k*lg would be 0*(-inf) otherwise
            row = math.exp(n * (logx - l1g) - s * math.log(n))
        else:
            k = np.arange(n, dtype=np.float64)
            # lgfact[:n] is log k!, reversed it is log (n-1-k)!
            logterm = lgfact[n - 1] - lgfact[:n] - lgfact[:n][::-1]
            logterm = logterm + k * lg + n * (logx - l1g) - s * np.log(n + k)
            row = float(np.sum(np.exp(logterm)))
        S0 += row
        S1 += n * row
    return S0, S1


def chain_exp_sums(n, s, a):
    """Centered exponential sums for single-jump family evaluation.

    E = sum_{i<=n} i^(-s) expm1(a i)   (phi_n(z) - phi_n(R), scaled by 1/c)
    D = sum_{i<=n} i^(1-s) exp(a i)    (z * phi_n'(z) / c)
    Centering on z = R avoids both underflowing coefficients and the
    catastrophic cancellation of 1 - phi_n(z) near the radius.
    """
    i = np.arange(1, n + 1, dtype=np.float64)
    ai = a * i
    ps = np.float_power(i, -s)
    E = float(np.sum(ps * np.expm1(ai)))
    D = float(np.sum(ps * i * np.exp(ai)))
    return E, D
