"""Infinite-family descriptors: coefficients, realizations, certified sums."""

import math

import mpmath
import pytest

from thermograph.cycle_series import enumerate_simple_cycles
from thermograph.errors import (
    BeyondRadius,
    CalibrationFailed,
    ParameterOutOfRange,
)
from thermograph.families import (
    chain_family,
    family_eval,
    family_from_json,
    jumpy_family,
    max_vertex_profile,
    petal_family,
    realize_finite,
    zeta_certified,
    zeta_tail_certified,
)

ZETA3 = 1.2020569031595943


@pytest.fixture(scope="module")
def chain():
    return chain_family(0.5, 3.0, "1/zeta(3)")


def test_chain_coefficients(chain):
    assert chain.radius == 2.0
    assert chain.q(1) == pytest.approx(0.5 / ZETA3, rel=1e-15)
    for n in (1, 2, 7, 40):
        assert chain.q(n) == pytest.approx(
            (1.0 / ZETA3) * 0.5**n * n**-3.0, rel=1e-14
        )
        assert chain.k_of_n(n) == n
    assert max_vertex_profile(chain, 9) == 9


def test_chain_realization_edges(chain):
    g = realize_finite(chain, 3)
    assert sorted((e.src, e.dst) for e in g.edges()) == [
        (1, 1), (1, 2), (2, 1), (2, 3), (3, 1),
    ]
    # every realized cycle multiplies out to the matching coefficient
    for n in (1, 2, 3):
        cycles = enumerate_simple_cycles(g, 1, n)
        assert len(cycles) == 1
        vs = cycles[0].vertices
        w = math.prod(g.weight(u, t) for u, t in zip(vs, vs[1:]))
        assert w == pytest.approx(chain.q(n), rel=1e-14)


def test_chain_calibration(chain):
    phi = chain.phi_at_radius()
    assert phi.lo <= 1.0 <= phi.hi
    assert phi.tail_bound <= 1e-12
    dphi = chain.dphi_at_radius()
    assert dphi.value == pytest.approx(0.5 * mpmath.zeta(2) / mpmath.zeta(3), rel=1e-12)
    assert chain.calibrated_unit


def test_chain_eval_enclosures(chain):
    mid = family_eval(chain, 1.0, 0)
    oracle = mpmath.nsum(lambda n: chain.q(int(n)) * 1.0 ** int(n), [1, mpmath.inf])
    assert abs(mid.value - float(oracle)) <= mid.tail_bound + 1e-15
    with pytest.raises(BeyondRadius):
        family_eval(chain, 2.5, 0)
    with pytest.raises(ParameterOutOfRange):
        family_eval(chain, 1.0, 2)


def test_chain_parameter_validation():
    with pytest.raises(ParameterOutOfRange):
        chain_family(0.0, 3.0, 0.5)
    with pytest.raises(ParameterOutOfRange):
        chain_family(0.5, 1.0, 0.5)
    with pytest.raises(ParameterOutOfRange):
        chain_family(0.5, 3.0, -1.0)


def test_jumpy_structure():
    jf = jumpy_family(1.0, 3.0)
    assert jf.radius == pytest.approx(0.5)
    assert jf.k_of_n(1) == 1 and jf.k_of_n(4) == 7
    g = realize_finite(jf, 4)
    pairs = sorted((e.src, e.dst) for e in g.edges())
    assert (1, 3) in pairs and (2, 4) in pairs
    assert (1, 2) in pairs and (4, 1) in pairs


def test_jumpy_coefficients_by_enumeration():
    jf = jumpy_family(1.0, 3.0)
    depth = jf.k_of_n(6)
    g = realize_finite(jf, depth)
    for n in range(1, 7):
        cycles = enumerate_simple_cycles(g, 1, n)
        total = 0.0
        for c in cycles:
            vs = c.vertices
            total += math.prod(g.weight(u, t) for u, t in zip(vs, vs[1:]))
        assert total == pytest.approx(jf.q(n), rel=1e-12)


def test_jumpy_without_jumps_is_power_law():
    # gamma = 0 leaves one composition per length: q(n)*n^s must be geometric
    flat = jumpy_family(0.0, 3.0)
    ratios = [
        (flat.q(n + 1) * (n + 1) ** 3.0) / (flat.q(n) * n**3.0)
        for n in range(1, 8)
    ]
    for r in ratios[1:]:
        assert r == pytest.approx(ratios[0], rel=1e-12)


def test_jumpy_calibration_targets():
    uplg = jumpy_family(1.0, 3.0, "UPLG")
    phi = uplg.phi_at_radius()
    assert phi.lo <= 1.0 <= phi.hi and phi.tail_bound <= 1e-8
    sub = jumpy_family(1.0, 3.0, "Transient")
    assert sub.phi_at_radius().value == pytest.approx(0.5, abs=1e-7)


def test_petal_support_dict():
    pf = petal_family({1: 0.4, 3: 0.3})
    assert pf.q(1) == 0.4 and pf.q(2) == 0.0 and pf.q(3) == 0.3
    assert pf.k_of_n(3) == 3  # base plus two interior vertices
    g = realize_finite(pf, 3)
    pairs = sorted((e.src, e.dst) for e in g.edges())
    assert (1, 1) in pairs and (1, 2) in pairs and (3, 1) in pairs
    assert pf.jump_bound is None


def test_zeta_certified_against_mpmath():
    for s in (2.0, 3.0, 4.5):
        val = zeta_certified(s)
        true = float(mpmath.zeta(s))
        assert abs(val.value - true) <= val.tail_bound
        assert val.tail_bound <= 1e-12 * val.value
    # slowly converging exponents settle for a wider certified band
    slow = zeta_certified(1.5)
    assert abs(slow.value - float(mpmath.zeta(1.5))) <= slow.tail_bound
    assert slow.tail_bound <= 1e-8 * slow.value


def test_zeta_tail_certified_against_mpmath():
    for s in (2.0, 3.0):
        for n in (1, 10, 1000, 10**6):
            val = zeta_tail_certified(s, n)
            true = float(mpmath.zeta(s, n + 1))
            assert abs(val.value - true) <= val.tail_bound + 1e-18 * true
    with pytest.raises(ParameterOutOfRange):
        zeta_tail_certified(1.0, 5)


def test_family_json_round_trip(chain):
    fam = family_from_json('{"family": "chain", "rho": 0.5, "s": 3.0, "c": "1/zeta(3)"}')
    assert fam.q(5) == chain.q(5)
    jf = family_from_json({"family": "jumpy", "gamma": 1.0, "s": 3.0})
    assert jf.variant == "jumpy"
    pf = family_from_json({"family": "petal", "q": {"1": 0.4, "3": 0.3}})
    assert pf.q(3) == 0.3
