"""Perron eigendata and the stationary Markov measure on finite graphs."""

import json
import math

import numpy as np
import pytest

from thermograph.equilibrium import (
    cylinder_measure,
    kac_residual,
    measure_to_json,
    parry_measure,
    perron_data,
)
from thermograph.errors import NotConnected
from thermograph.graph_core import build_graph

PHI = (1.0 + math.sqrt(5.0)) / 2.0


def test_golden_mean_eigendata(golden_mean):
    pd = perron_data(golden_mean)
    assert pd.lam == pytest.approx(PHI, rel=1e-12)
    assert pd.r[0] == 1.0
    assert pd.l @ pd.r == pytest.approx(1.0, rel=1e-12)
    assert max(pd.residual_right, pd.residual_left) <= 1e-12


def test_golden_mean_measure(golden_mean):
    m = parry_measure(golden_mean)
    assert m.pi_of(1) == pytest.approx(0.7236067977499789, rel=1e-11)
    assert m.pi_of(2) == pytest.approx(0.2763932022500211, rel=1e-11)
    # rows of the transition kernel are stochastic
    assert np.allclose(m.P.sum(axis=1), 1.0, atol=1e-12)
    # stationarity: pi P = pi
    assert np.allclose(m.pi @ m.P, m.pi, atol=1e-12)


def test_two_cycle_measure():
    g = build_graph([(1, 2, 0.7), (2, 1, 1.9)])
    m = parry_measure(g)
    assert m.lam == pytest.approx(math.sqrt(0.7 * 1.9), rel=1e-12)
    assert m.pi_of(1) == pytest.approx(0.5, abs=1e-12)
    assert m.transition(1, 2) == pytest.approx(1.0, abs=1e-11)


def test_self_loop_measure():
    g = build_graph([(1, 1, 0.3)])
    m = parry_measure(g)
    assert m.lam == pytest.approx(0.3)
    assert m.pi_of(1) == pytest.approx(1.0)


def test_kac_residual_small(golden_mean, corpus):
    assert kac_residual(golden_mean, 1) <= 1e-12
    for g in corpus[:20]:
        for v in g.vertices:
            assert kac_residual(g, v) <= 1e-9


def test_cylinder_consistency(golden_mean):
    m = parry_measure(golden_mean)
    assert cylinder_measure(m, ()) == 1.0
    assert cylinder_measure(m, (2, 2)) == 0.0
    assert cylinder_measure(m, (7,)) == 0.0
    # splitting the first step refines the mass exactly
    for v in (1, 2):
        children = sum(
            cylinder_measure(m, (v, t)) for t in (1, 2)
        )
        assert children == pytest.approx(cylinder_measure(m, (v,)), rel=1e-12)
    # shift invariance on two-letter words
    for t in (1, 2):
        merged = sum(cylinder_measure(m, (u, t)) for u in (1, 2))
        assert merged == pytest.approx(cylinder_measure(m, (t,)), rel=1e-12)


def test_measure_rejects_disconnected():
    g = build_graph([(1, 1, 1.0), (2, 2, 1.0)])
    with pytest.raises(NotConnected):
        parry_measure(g)


def test_measure_json_deterministic(golden_mean):
    a = measure_to_json(parry_measure(golden_mean))
    b = measure_to_json(parry_measure(golden_mean))
    assert a == b
    obj = json.loads(a)
    assert obj["lambda"] == pytest.approx(PHI, rel=1e-12)
    assert set(obj["pi"]) == {"1", "2"}


def test_weight_scaling_invariance(corpus):
    # scaling all weights by c scales lambda by c and keeps pi fixed
    g = corpus[0]
    scaled = build_graph([(e.src, e.dst, 2.5 * e.weight) for e in g.edges()])
    m1 = parry_measure(g)
    m2 = parry_measure(scaled)
    assert m2.lam == pytest.approx(2.5 * m1.lam, rel=1e-10)
    np.testing.assert_allclose(m2.pi, m1.pi, rtol=1e-9)
