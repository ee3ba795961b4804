"""Numba and numpy backends must agree bit-for-bit or to rounding."""

import math

import numpy as np
import pytest

from thermograph._kernels import numpy_impl

try:
    from thermograph._kernels import numba_impl
except ImportError:  # pragma: no cover
    numba_impl = None

needs_numba = pytest.mark.skipif(numba_impl is None, reason="numba not installed")

RNG = np.random.default_rng(7)


def _random_csr(n, p=0.4):
    dense = (RNG.random((n, n)) < p) * RNG.uniform(0.1, 2.0, (n, n))
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = []
    weights = []
    for i in range(n):
        cols = np.nonzero(dense[i])[0]
        indptr[i + 1] = indptr[i] + len(cols)
        indices.extend(cols)
        weights.extend(dense[i, cols])
    return (
        indptr,
        np.array(indices, dtype=np.int64),
        np.array(weights),
        dense,
    )


@needs_numba
def test_backend_tags_differ():
    assert numpy_impl.BACKEND == "numpy"
    assert numba_impl.BACKEND == "numba"


@needs_numba
def test_dfs_return_weight_sums_equivalence():
    for _ in range(25):
        n = int(RNG.integers(2, 7))
        indptr, indices, weights, _ = _random_csr(n)
        if len(indices) == 0:
            continue
        v = int(RNG.integers(0, n))
        a = numpy_impl.dfs_return_weight_sums(indptr, indices, weights, v, 9)
        b = numba_impl.dfs_return_weight_sums(indptr, indices, weights, v, 9)
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=0.0)


@needs_numba
def test_dfs_find_cycle_in_range_equivalence():
    for _ in range(25):
        n = int(RNG.integers(2, 7))
        indptr, indices, _, _ = _random_csr(n)
        v = int(RNG.integers(0, n))
        lo = int(RNG.integers(0, 4))
        hi = lo + int(RNG.integers(2, 6))
        a = numpy_impl.dfs_find_cycle_in_range(indptr, indices, v, lo, hi, 10**6)
        b = numba_impl.dfs_find_cycle_in_range(indptr, indices, v, lo, hi, 10**6)
        assert a == b


@needs_numba
def test_taboo_series_equivalence():
    for _ in range(25):
        n = int(RNG.integers(2, 8))
        _, _, _, dense = _random_csr(n)
        v = int(RNG.integers(0, n))
        qa, ta = numpy_impl.taboo_series(dense, v, 12)
        qb, tb = numba_impl.taboo_series(dense, v, 12)
        assert ta == tb
        np.testing.assert_allclose(qa, qb, rtol=1e-13, atol=1e-300)


@needs_numba
def test_poly_eval_equivalence():
    for _ in range(40):
        deg = int(RNG.integers(1, 30))
        coeffs = RNG.uniform(0.0, 1.0, deg + 1)
        z = float(RNG.uniform(0.0, 2.0))
        for order in (0, 1):
            a = numpy_impl.poly_eval(coeffs, z, order)
            b = numba_impl.poly_eval(coeffs, z, order)
            assert math.isclose(a, b, rel_tol=1e-13, abs_tol=1e-300)


@needs_numba
def test_power_iteration_equivalence():
    for _ in range(15):
        n = int(RNG.integers(2, 7))
        A = RNG.uniform(0.1, 1.0, (n, n))
        la, ra, lla, rra, rla, ia = numpy_impl.power_iteration(A, 1e-13, 10000)
        lb, rb, llb, rrb, rlb, ib = numba_impl.power_iteration(A, 1e-13, 10000)
        assert math.isclose(la, lb, rel_tol=1e-11)
        assert max(rra, rla, rrb, rlb) <= 1e-13
        np.testing.assert_allclose(ra, rb, rtol=1e-9)
        np.testing.assert_allclose(lla, llb, rtol=1e-9)


@needs_numba
def test_chain_exp_sums_equivalence():
    for n in (1, 5, 200, 5000):
        for a in (0.0, 1e-8, 1e-4 / n):
            ea, da = numpy_impl.chain_exp_sums(n, 3.0, a)
            eb, db = numba_impl.chain_exp_sums(n, 3.0, a)
            assert math.isclose(ea, eb, rel_tol=1e-12, abs_tol=1e-300)
            assert math.isclose(da, db, rel_tol=1e-12)


@needs_numba
def test_jumpy_series_sums_equivalence():
    N = 400
    lgfact = np.zeros(N + 1)
    for i in range(2, N + 1):
        lgfact[i] = lgfact[i - 1] + math.log(i)
    for logx in (-0.7, -0.2, -0.05):
        a = numpy_impl.jumpy_series_sums(1.0, 3.0, N, lgfact, logx)
        b = numba_impl.jumpy_series_sums(1.0, 3.0, N, lgfact, logx)
        np.testing.assert_allclose(a, b, rtol=1e-12)
