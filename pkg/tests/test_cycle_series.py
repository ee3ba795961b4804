"""First-return series: coefficients, roots, radius, classification."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermograph.cycle_series import (
    ClassKind,
    classify_family,
    classify_finite,
    enumerate_simple_cycles,
    eval_series,
    first_return_unit_root,
    radius_estimate,
    return_series,
    simple_cycle_sum,
    solve_unit_root,
)
from thermograph.errors import (
    AllZeroCoefficients,
    EnumerationCapExceeded,
    NotConnected,
    ParameterOutOfRange,
)
from thermograph.families import chain_family
from thermograph.graph_core import build_graph

GOLDEN_ROOT = 0.6180339887498949
SQRT5 = 2.23606797749979


def brute_q(graph, v, n):
    """Independent oracle: recursive weight sum over first returns."""
    total = 0.0

    def walk(u, length, acc):
        nonlocal total
        for e in graph.edges():
            if e.src != u:
                continue
            if e.dst == v:
                if length + 1 == n:
                    total += acc * e.weight
            elif length + 1 < n:
                walk(e.dst, length + 1, acc * e.weight)

    walk(v, 0, 1.0)
    return total


def test_golden_mean_series(golden_mean):
    s = return_series(golden_mean, 1, 10)
    assert s.exact
    assert s.coeffs[0] == 0.0
    assert s.coeffs[1] == 1.0 and s.coeffs[2] == 1.0
    assert not np.any(s.coeffs[3:])
    # at the second vertex the series has a geometric tail instead
    s2 = return_series(golden_mean, 2, 10)
    assert not s2.exact
    assert s2.coeffs[1] == 0.0
    assert np.allclose(s2.coeffs[2:], 1.0)


def test_golden_mean_roots(golden_mean):
    z1 = first_return_unit_root(golden_mean, 1)
    z2 = first_return_unit_root(golden_mean, 2)
    assert z1 == pytest.approx(GOLDEN_ROOT, abs=1e-13)
    # both vertices see the same spectral point
    assert z2 == pytest.approx(z1, abs=1e-12)
    s = return_series(golden_mean, 1, 10)
    assert eval_series(s, z1, 1) == pytest.approx(SQRT5, rel=1e-12)


def test_simple_cycle_sum_oracle(golden_mean):
    g = build_graph(
        [(1, 2, 0.7), (2, 3, 1.3), (3, 2, 0.4), (2, 1, 0.9), (1, 1, 0.2)]
    )
    for v in (1, 2, 3):
        for n in range(1, 9):
            assert simple_cycle_sum(g, v, n) == pytest.approx(
                brute_q(g, v, n), rel=1e-12, abs=1e-300
            )


def test_enumeration_interior_repeats():
    # first returns may revisit interior vertices, only the base is taboo
    g = build_graph([(1, 2, 1.0), (2, 3, 1.0), (3, 2, 1.0), (2, 1, 1.0)])
    for n, count in ((2, 1), (4, 1), (6, 1), (3, 0), (5, 0)):
        cycles = enumerate_simple_cycles(g, 1, n)
        assert len(cycles) == count
    deep = enumerate_simple_cycles(g, 1, 6)[0]
    assert deep.vertices == (1, 2, 3, 2, 3, 2, 1)


def test_enumeration_cap():
    full = build_graph(
        [(u, t, 1.0) for u in range(1, 6) for t in range(1, 6)]
    )
    with pytest.raises(EnumerationCapExceeded):
        enumerate_simple_cycles(full, 1, 18, cap=1000)


def test_solve_unit_root_validates():
    g = build_graph([(1, 2, 1.0), (2, 1, 1.0)])
    s = return_series(g, 1, 8)
    assert solve_unit_root(s) == pytest.approx(1.0, abs=1e-13)
    zero = return_series(build_graph([(1, 2, 1.0), (2, 3, 1.0), (3, 1, 1.0)]), 1, 2)
    with pytest.raises(AllZeroCoefficients):
        solve_unit_root(zero)


def test_eval_series_validates(golden_mean):
    s = return_series(golden_mean, 1, 5)
    with pytest.raises(ParameterOutOfRange):
        eval_series(s, -0.5, 0)
    with pytest.raises(ParameterOutOfRange):
        eval_series(s, 0.5, 2)


def test_radius_estimate(golden_mean):
    exact = radius_estimate(return_series(golden_mean, 1, 8))
    assert exact.certified and math.isinf(exact.value)
    tail = radius_estimate(return_series(golden_mean, 2, 64))
    assert not tail.certified
    assert tail.value == pytest.approx(1.0, rel=1e-2)


def test_classify_finite(golden_mean):
    c = classify_finite(golden_mean, 1)
    assert c.kind is ClassKind.STABLE_POSITIVE
    assert c.unit_root == pytest.approx(GOLDEN_ROOT, abs=1e-13)
    assert c.dphi_at_unit_root == pytest.approx(SQRT5, rel=1e-12)
    with pytest.raises(NotConnected):
        classify_finite(build_graph([(1, 1, 1.0), (2, 2, 1.0)]), 1)


def test_classify_family_spanning():
    grid = {
        "1/zeta(3)": ClassKind.UNSTABLE_POSITIVE,
        "2/zeta(3)": ClassKind.STABLE_POSITIVE,
        "0.5/zeta(3)": ClassKind.TRANSIENT,
    }
    for c, kind in grid.items():
        assert classify_family(chain_family(0.5, 3.0, c)).kind is kind
    null = classify_family(chain_family(0.5, 2.0, "1/zeta(2)"))
    assert null.kind is ClassKind.NULL_RECURRENT
    assert null.dphi_at_R == (math.inf, math.inf)


def test_taboo_equals_enumeration_on_corpus_sample(corpus):
    for g in corpus[:15]:
        for v in g.vertices:
            series = return_series(g, v, 7)
            for n in range(1, 8):
                assert series.coeffs[n] == pytest.approx(
                    brute_q(g, v, n), rel=1e-12, abs=1e-300
                )


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_unit_root_is_a_root(data):
    n = data.draw(st.integers(2, 5))
    edges = [(i, i % n + 1, data.draw(st.floats(0.2, 1.8))) for i in range(1, n + 1)]
    edges.append((1, 1, data.draw(st.floats(0.2, 1.8))))
    g = build_graph(edges)
    s = return_series(g, 1, g.n_vertices + 1)
    assert s.exact
    z = solve_unit_root(s)
    assert eval_series(s, z, 0) == pytest.approx(1.0, abs=1e-11)
    # below the root the series is short of one, above it exceeds one
    assert eval_series(s, 0.9 * z, 0) < 1.0 < eval_series(s, 1.1 * z, 0)
