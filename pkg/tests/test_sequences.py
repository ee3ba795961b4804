"""Nested-sequence machinery: builders, checks, verdicts, mixing, reports."""

import json

import pytest

from thermograph.errors import (
    CapExceeded,
    NoBoundedJumps,
    NotNested,
    NotUPLG,
    ParameterOutOfRange,
    SearchExhausted,
    TooFewRecords,
)
from thermograph.families import ChainFamily, chain_family, jumpy_family
from thermograph.root_lane import root_info
from thermograph.sequences import (
    CSV_HEADER,
    SubgraphSpec,
    Verdict,
    a_of_n,
    build_Gn,
    build_Gnm,
    evaluate_specs,
    irregular_search,
    mix_sequences,
    polynomial_decomposition,
    regular_scan,
    report_to_csv,
    report_to_json,
    resolve_spec,
    structural_gap_check,
    verdict,
)


@pytest.fixture(scope="module")
def chain():
    return chain_family(0.5, 3.0, "1/zeta(3)")


@pytest.fixture(scope="module")
def jumpy():
    return jumpy_family(1.0, 3.0)


def graphs_equal(a, b):
    return a.subgraph_of(b) and b.subgraph_of(a)


# -- builders ------------------------------------------------------------------


def test_a_of_n_staircase(chain, jumpy):
    assert a_of_n(chain, 2) == 1
    assert a_of_n(chain, 5) == 4
    assert a_of_n(jumpy, 4) == 2
    assert a_of_n(jumpy, 9) == 4
    # far past anything materializable, profile-only arithmetic
    assert a_of_n(chain, 10**40) == 10**40 - 1
    with pytest.raises(ParameterOutOfRange):
        a_of_n(chain, 0)


def test_build_Gn_chain_edges(chain):
    g = build_Gn(chain, 3)
    assert sorted((e.src, e.dst) for e in g.edges()) == [
        (1, 1), (1, 2), (2, 1), (2, 3), (3, 1),
    ]
    assert g.weight(1, 1) == pytest.approx(chain.q(1))
    assert g.weight(1, 2) == pytest.approx(chain.rho)


def test_build_Gn_jumpy_has_jump(jumpy):
    g = build_Gn(jumpy, 2)
    assert g.has_edge(1, 3)
    assert sorted(g.vertices) == [1, 2, 3]


def test_join_at_next_depth_is_the_deeper_hull(chain):
    assert graphs_equal(build_Gnm(chain, 3, 4), build_Gn(chain, 4))
    with pytest.raises(ParameterOutOfRange):
        build_Gnm(chain, 4, 4)


def test_resolve_spec_routes(chain):
    hull = resolve_spec(chain, SubgraphSpec.hull(3))
    assert graphs_equal(hull, build_Gn(chain, 3))
    join = resolve_spec(chain, SubgraphSpec.join(2, 5))
    assert graphs_equal(join, build_Gnm(chain, 2, 5))
    with pytest.raises(CapExceeded):
        resolve_spec(chain, SubgraphSpec.join(2, 3100))


# -- structural checks ---------------------------------------------------------


def test_structural_gap_small_instances(chain, jumpy):
    assert structural_gap_check(chain, 3, 10)
    assert structural_gap_check(jumpy, 2, 12)
    # empty window passes without a search
    assert structural_gap_check(jumpy, 2, 8)


def test_structural_gap_huge_indices(chain, jumpy):
    assert structural_gap_check(chain, 5, 10**30)
    with pytest.raises(CapExceeded):
        structural_gap_check(jumpy, 5, 10**30)


def test_polynomial_decomposition_tables(chain, jumpy):
    q, q1, q2 = polynomial_decomposition(chain, 3, 6)
    for i in range(1, 4):
        assert q1[i] == pytest.approx(q[i], rel=1e-12)
    assert q1[4] == 0.0 and q1[5] == 0.0
    assert q2[6] == pytest.approx(q[6], rel=1e-12)
    assert all(q1[i] <= q2[i] <= q[i] + 1e-15 for i in range(len(q)))
    # the two-jump family goes through the same identities by enumeration
    polynomial_decomposition(jumpy, 2, 4)


# -- verdict logic -------------------------------------------------------------


def test_verdict_needs_a_window(chain):
    ref = chain.dphi_at_radius()
    with pytest.raises(TooFewRecords):
        verdict([0.7, 0.7, 0.7, 0.7], ref)


def test_verdict_classes(chain):
    ref = chain.dphi_at_radius()
    settled = [0.5, 0.6, 0.6839, 0.6841, 0.6842, 0.6842, 0.6842]
    assert verdict(settled, ref) is Verdict.REGULAR
    oscillating = [0.4, 1.0, 0.65, 2.0, 0.68, 3.0, 0.684]
    assert verdict(oscillating, ref) is Verdict.NO_LIMIT
    escaping = [1.0, 2.0, 3.0, 5.0, 7.0, 8.0, 9.0]
    assert verdict(escaping, ref) is Verdict.IRREGULAR_NULL
    flat_off_reference = [1.0, 1.0, 1.0, 1.0, 1.0]
    assert verdict(flat_off_reference, ref) is Verdict.INCONCLUSIVE


def test_pinned_thresholds(chain):
    report = regular_scan(chain, 5)
    assert report.thresholds == {
        "tol_regular": 1e-3,
        "tol_oscillation": pytest.approx(0.34210819440505147, rel=1e-12),
        "growth_factor": 10.0,
        "window": 5.0,
    }


# -- scans and searches --------------------------------------------------------


def test_regular_scan_small(chain):
    report = regular_scan(chain, 8)
    assert len(report.records) == 8
    assert report.all_checks_pass()
    assert [r.label for r in report.records] == [f"Gn({i})" for i in range(1, 9)]
    assert all(r.m is None for r in report.records)
    roots = [r.R for r in report.records]
    assert all(b < a for a, b in zip(roots, roots[1:]))
    assert all(r.R > chain.radius for r in report.records)
    at_radius = [r.diagnostics["dphi_at_radius"] for r in report.records]
    assert all(b >= a for a, b in zip(at_radius, at_radius[1:]))


def test_regular_scan_refuses_off_knife_edge():
    transient = chain_family(0.5, 3.0, 0.5)
    with pytest.raises(NotUPLG):
        regular_scan(transient, 5)
    stable = chain_family(0.5, 3.0, 1.0)
    with pytest.raises(NotUPLG):
        regular_scan(stable, 5)


def test_regular_scan_needs_bounded_jumps():
    class UnboundedChain(ChainFamily):
        jump_bound = None

    with pytest.raises(NoBoundedJumps):
        regular_scan(UnboundedChain(0.5, 3.0, "1/zeta(3)"), 5)


def test_irregular_search_chain_ladder(chain):
    indices, report = irregular_search(chain, 2)
    assert indices == [1, 54, 271970]
    assert report.all_checks_pass()
    assert [r.label for r in report.records] == ["Gnm(1,54)", "Gnm(54,271970)"]
    assert report.records[0].dphi > 1.0
    assert report.records[1].dphi > 2.0
    # the small join is cross-checked against the closed-form lane
    diag = report.records[0].diagnostics
    assert diag["lane_dphi"] == pytest.approx(report.records[0].dphi, rel=1e-9)
    assert diag["lane_R"] == pytest.approx(report.records[0].R, rel=1e-12)


def test_irregular_search_cap(chain, jumpy):
    # the two-jump joins hover near 2.2, so level 3 exhausts a small cap
    with pytest.raises(SearchExhausted) as exc:
        irregular_search(jumpy, 3, cap=8)
    assert exc.value.best_m == 8
    # same refusal through the closed-form lane
    with pytest.raises(SearchExhausted) as exc:
        irregular_search(chain, 1, cap=40)
    assert exc.value.best_m == 40


# -- mixing --------------------------------------------------------------------


def test_mix_identity_and_empty(chain):
    X = [SubgraphSpec.hull(2), SubgraphSpec.hull(4), SubgraphSpec.join(4, 9)]
    assert mix_sequences(chain, X, X) == X
    assert mix_sequences(chain, X, []) == X
    assert mix_sequences(chain, [], X) == X


def test_mix_running_union(chain):
    first = [SubgraphSpec.hull(2), SubgraphSpec.hull(4)]
    second = [SubgraphSpec.join(2, 50)]
    mixed = mix_sequences(chain, first, second)
    assert [s.label() for s in mixed] == ["Gn(2)", "Gnm(2,50)", "Gnm(4,50)"]


def test_mix_absorbs_adjacent_join(chain):
    mixed = mix_sequences(
        chain, [SubgraphSpec.hull(3)], [SubgraphSpec.join(3, 4)]
    )
    assert [s.label() for s in mixed] == ["Gn(3)", "Gn(4)"]


def test_mix_rejects_bad_input(chain):
    decreasing = [SubgraphSpec.hull(4), SubgraphSpec.hull(2)]
    with pytest.raises(NotNested):
        mix_sequences(chain, decreasing, [])
    with pytest.raises(ParameterOutOfRange):
        mix_sequences(
            chain, [SubgraphSpec.principal(3)], [SubgraphSpec.hull(2)]
        )
    with pytest.raises(ParameterOutOfRange):
        mix_sequences(
            chain, [SubgraphSpec.hull(2)], [SubgraphSpec.hull(3)],
            schedule="roundrobin",
        )


# -- explicit evaluation -------------------------------------------------------


def test_evaluate_specs_poly_agrees_with_lane(chain):
    report = evaluate_specs(chain, [SubgraphSpec.join(2, 100)])
    lane = root_info(chain, 2, 100)
    assert report.records[0].dphi == pytest.approx(lane.dphi, rel=1e-12)
    assert report.records[0].R == pytest.approx(lane.R, rel=1e-12)
    assert report.records[0].pi_v == pytest.approx(lane.pi_base, rel=1e-8)


def test_evaluate_specs_lane_route(chain):
    specs = [SubgraphSpec.hull(3), SubgraphSpec.join(3, 4000)]
    report = evaluate_specs(chain, specs)
    assert len(report.records) == 2
    direct = root_info(chain, 3, 4000)
    assert report.records[1].dphi == pytest.approx(direct.dphi, rel=1e-12)
    assert report.records[1].m == 4000


def test_evaluate_specs_principal_then_hull(chain):
    report = evaluate_specs(
        chain, [SubgraphSpec.principal(2), SubgraphSpec.hull(3)]
    )
    assert [r.label for r in report.records] == ["principal(2)", "Gn(3)"]


def test_evaluate_specs_refusals(chain, jumpy):
    with pytest.raises(NotNested):
        evaluate_specs(chain, [SubgraphSpec.hull(4), SubgraphSpec.hull(2)])
    with pytest.raises(CapExceeded):
        evaluate_specs(jumpy, [SubgraphSpec.join(2, 5000)])
    two_huge_extras = SubgraphSpec.mixed(
        (SubgraphSpec.join(2, 4000), SubgraphSpec.join(2, 5000))
    )
    with pytest.raises(CapExceeded):
        evaluate_specs(chain, [two_huge_extras])
    with pytest.raises(ParameterOutOfRange):
        evaluate_specs(chain, [])


# -- serialization ---------------------------------------------------------------


def test_csv_shape_and_running_verdict(chain):
    report = regular_scan(chain, 6)
    lines = report_to_csv(report).strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 7
    for row in lines[1:5]:
        assert row.endswith("TooFewRecords")
    last = lines[-1].split(",")
    assert last[0] == "6" and last[2] == ""


def test_json_roundtrip_and_determinism(chain):
    a = report_to_json(regular_scan(chain, 5))
    b = report_to_json(regular_scan(chain, 5))
    assert a == b
    obj = json.loads(a)
    assert {"records", "reference", "thresholds", "verdict"} <= set(obj)
    assert len(obj["records"]) == 5
    row = obj["records"][0]
    assert {"k", "label", "R_k", "dphi_at_Rk", "pi_v", "checks"} <= set(row)


def test_worker_pool_matches_sequential(chain, monkeypatch):
    specs = [SubgraphSpec.hull(n) for n in (1, 2, 3)]
    specs.append(SubgraphSpec.join(3, 4000))
    monkeypatch.delenv("THERMOGRAPH_THREADS", raising=False)
    sequential = report_to_json(evaluate_specs(chain, specs))
    monkeypatch.setenv("THERMOGRAPH_THREADS", "4")
    pooled = report_to_json(evaluate_specs(chain, specs))
    assert pooled == sequential
    # a failing spec surfaces the same error the sequential order hits first
    with pytest.raises(CapExceeded):
        evaluate_specs(
            chain,
            [SubgraphSpec.hull(2)]
            + [SubgraphSpec.mixed((SubgraphSpec.join(2, 4000),
                                   SubgraphSpec.join(2, 5000)))],
        )
