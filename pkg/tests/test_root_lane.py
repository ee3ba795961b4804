"""Closed-form chain root solver: frozen anchors, searches, certificates."""

import json
import pathlib

import pytest

from thermograph.errors import ParameterOutOfRange, SearchExhausted
from thermograph.families import chain_family, jumpy_family
from thermograph.root_lane import (
    ChainRootLane,
    root_info,
    root_info_f64,
    smallest_m_exceeding,
)

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def chain():
    return chain_family(0.5, 3.0, "1/zeta(3)")


def test_frozen_join_anchors(chain):
    below = root_info(chain, 1, 53)
    at = root_info(chain, 1, 54)
    assert below.dphi == pytest.approx(0.9826840630045253, rel=1e-12)
    assert at.dphi == pytest.approx(1.0190620828004524, rel=1e-12)
    assert at.R == pytest.approx(2.341249470756093, rel=1e-12)
    assert at.pi_base == pytest.approx(0.41913281585949946, rel=1e-12)
    # the threshold-1 boundary falls between these two indices
    assert below.dphi_mp <= 1 < at.dphi_mp


def test_hull_only_instances(chain):
    h1 = root_info(chain, 1, None)
    assert h1.m is None
    assert h1.R == pytest.approx(2.4041138063191885, rel=1e-12)
    assert h1.dphi == pytest.approx(0.41595368629035373, rel=1e-12)
    assert h1.pi_base == pytest.approx(1.0, rel=1e-12)
    h3 = root_info(chain, 3, None)
    assert h3.R == pytest.approx(2.0585064456552935, rel=1e-12)
    assert h3.dphi == pytest.approx(0.5719447277567524, rel=1e-12)
    # deeper hulls lower the root toward the ambient radius 2
    assert 2.0 < h3.R < h1.R


def test_f64_twin_agrees(chain):
    for n, m in [(1, 2), (1, 54), (5, 12), (20, 200), (3, 12345), (7, None)]:
        hp = root_info(chain, n, m)
        fp = root_info_f64(chain, n, m)
        assert fp.R == pytest.approx(hp.R, rel=1e-12)
        assert fp.dphi == pytest.approx(hp.dphi, rel=1e-12)
        assert fp.pi_base == pytest.approx(hp.pi_base, rel=1e-12)


def test_search_matches_linear_scan(chain):
    for n, thr in [(1, 1.0), (3, 1.0)]:
        lane = ChainRootLane(chain, n)
        m = n + 1
        while not lane.info(m).dphi_mp > thr:
            m += 1
            assert m <= 1000, "oracle scan ran away"
        info, probes = smallest_m_exceeding(chain, n, thr)
        assert info.m == m
        assert info.dphi_mp > thr
        assert lane.info(m - 1).dphi_mp <= thr
        assert all(p.bound_ok for p in probes)
        assert all(p.lower_bound <= p.dphi for p in probes if p.m is not None)


def test_search_early_return(chain):
    # the very first candidate already clears a low bar
    info, probes = smallest_m_exceeding(chain, 1, 0.5)
    assert info.m == 2
    assert len(probes) == 1
    assert info.dphi == pytest.approx(0.5263134909073892, rel=1e-12)


def test_search_cap_exhaustion(chain):
    # the threshold-2 boundary over the depth-1 hull sits at m = 76
    assert smallest_m_exceeding(chain, 1, 2.0)[0].m == 76
    with pytest.raises(SearchExhausted) as exc:
        smallest_m_exceeding(chain, 1, 2.0, cap=60)
    assert exc.value.best_m == 60
    assert len(exc.value.report) >= 2
    assert all(not p.dphi_mp > 2 for p in exc.value.report)


def test_search_cap_below_hull(chain):
    with pytest.raises(SearchExhausted) as exc:
        smallest_m_exceeding(chain, 5, 1.0, cap=5)
    assert exc.value.best_m is None


def test_lane_reuse_and_mismatch(chain):
    lane = ChainRootLane(chain, 2)
    info, _ = smallest_m_exceeding(chain, 2, 1.0, lane=lane)
    fresh, _ = smallest_m_exceeding(chain, 2, 1.0)
    assert info.m == fresh.m
    with pytest.raises(ParameterOutOfRange):
        smallest_m_exceeding(chain, 3, 1.0, lane=lane)


def test_lane_rejects_bad_input(chain):
    with pytest.raises(ParameterOutOfRange):
        ChainRootLane(jumpy_family(1.0, 3.0), 1)
    with pytest.raises(ParameterOutOfRange):
        ChainRootLane(chain, 0)
    with pytest.raises(ParameterOutOfRange):
        root_info_f64(jumpy_family(1.0, 3.0), 1, 5)


def test_ladder_first_rungs_regression(chain):
    frozen = json.loads((DATA / "ladder_chain.json").read_text())
    want = [int(x) for x in frozen["indices"][1:4]]
    n = int(frozen["indices"][0])
    got = []
    for k in (1, 2, 3):
        info, _ = smallest_m_exceeding(chain, n, float(k))
        got.append(info.m)
        n = info.m
    assert got == want


def test_huge_index_boundary_certificate(chain):
    # threshold-4 rung: the crossing is decided by margins near 1e-28,
    # far below binary64 resolution, so compare at working precision
    frozen = json.loads((DATA / "ladder_chain.json").read_text())
    n4 = int(frozen["indices"][3])
    m4 = int(frozen["indices"][4])
    lane = ChainRootLane(chain, n4)
    at = lane.info(m4)
    below = lane.info(m4 - 1)
    assert below.dphi_mp <= 4 < at.dphi_mp
    assert at.bound_ok and below.bound_ok
    assert float(at.dphi_mp - 4) == pytest.approx(8.70129040405855e-30, rel=1e-6)
    assert float(below.dphi_mp - 4) == pytest.approx(-6.51893941184518e-28, rel=1e-6)
