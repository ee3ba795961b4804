"""Nested subgraph sequences: builders, scans, searches, and verdicts.

A trajectory is a list of records (one per subgraph in a nested sequence)
carrying the unit root, the derivative there, and the stationary mass of
the base vertex.  Verdicts compare the derivative trajectory against the
certified ambient value and classify the limiting behaviour as regular,
irregular-null, oscillating, or inconclusive.

Two evaluation routes feed the same record type.  Small instances are
materialized and reduced to exact polynomial tables; chain-family
instances past the materialization limit go through the closed-form root
lane, whose indices can run to thousands of digits.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import _kernels as K
from . import root_lane
from ._util import fmt, worker_count
from .cycle_series import (
    ClassKind,
    classify_family,
    enumerate_simple_cycles,
    eval_series,
    return_series,
    solve_unit_root,
)
from .equilibrium import parry_measure
from .errors import (
    CapExceeded,
    EnumerationCapExceeded,
    NoBoundedJumps,
    NotNested,
    NotUPLG,
    ParameterOutOfRange,
    SearchExhausted,
    ThermographError,
    TooFewRecords,
)
from .families import CertifiedValue, FamilyDescriptor
from .graph_core import LoadedGraph, principal_subgraph, subgraph_generated_by

__all__ = [
    "Verdict",
    "SubgraphSpec",
    "SequenceRecord",
    "SequenceReport",
    "build_Gn",
    "build_Gnm",
    "a_of_n",
    "structural_gap_check",
    "polynomial_decomposition",
    "regular_scan",
    "irregular_search",
    "mix_sequences",
    "evaluate_specs",
    "verdict",
    "report_to_csv",
    "report_to_json",
]

# Cycle enumeration abandons a build past this many expanded edges.
DEFAULT_ENUM_CAP = 5_000_000

# Instances with more vertices than this skip materialization; chain
# instances reroute to the closed-form lane, everything else refuses.
MATERIALIZE_LIMIT = 3_000

# Verdicts look at the trailing window of this many records.
VERDICT_WINDOW = 5

# A trajectory reaching this multiple of the ambient derivative, still
# rising at the end, reads as escaping to infinity.
GROWTH_FACTOR = 10.0

KAC_TOL = 1e-9


class Verdict(Enum):
    """Limit diagnosis for a derivative trajectory."""

    REGULAR = "RegularConsistent"
    IRREGULAR_NULL = "IrregularNullConsistent"
    NO_LIMIT = "NoLimitConsistent"
    INCONCLUSIVE = "Inconclusive"


# -- symbolic subgraph descriptors ------------------------------------------------


@dataclass(frozen=True)
class SubgraphSpec:
    """Symbolic member of a nested sequence, resolvable on demand.

    Kinds: ``hull`` keeps every first-return cycle of length <= n;
    ``join`` adds the length-m cycle family on top of a hull; ``principal``
    restricts the realized family to its first ``depth`` vertices;
    ``mixed`` unions other specs.  Indices may exceed any materializable
    size, so containment tests work on cycle-length profiles instead of
    edges whenever both sides have one.
    """

    kind: str
    n: int = 0
    m: int = 0
    depth: int = 0
    parts: Tuple["SubgraphSpec", ...] = ()

    @staticmethod
    def hull(n: int) -> "SubgraphSpec":
        if n < 1:
            raise ParameterOutOfRange(f"hull depth must be >= 1, got {n}")
        return SubgraphSpec(kind="hull", n=int(n))

    @staticmethod
    def join(n: int, m: int) -> "SubgraphSpec":
        if n < 1:
            raise ParameterOutOfRange(f"hull depth must be >= 1, got {n}")
        if m <= n:
            raise ParameterOutOfRange(f"need m > n, got n={n}, m={m}")
        return SubgraphSpec(kind="join", n=int(n), m=int(m))

    @staticmethod
    def principal(depth: int) -> "SubgraphSpec":
        if depth < 1:
            raise ParameterOutOfRange(f"depth must be >= 1, got {depth}")
        return SubgraphSpec(kind="principal", depth=int(depth))

    @staticmethod
    def mixed(parts: Iterable["SubgraphSpec"]) -> "SubgraphSpec":
        parts = tuple(parts)
        if not parts:
            raise ParameterOutOfRange("mixed spec needs at least one part")
        return SubgraphSpec(kind="mixed", parts=parts)

    def label(self) -> str:
        if self.kind == "hull":
            return f"Gn({_short(self.n)})"
        if self.kind == "join":
            return f"Gnm({_short(self.n)},{_short(self.m)})"
        if self.kind == "principal":
            return f"principal({_short(self.depth)})"
        inner = ";".join(p.label() for p in self.parts)
        return f"mixed({inner})"


def _short(x: int) -> str:
    text = str(x)
    if len(text) <= 24:
        return text
    return f"{text[:6]}..{text[-6:]}({len(text)}d)"


def _profile(spec: SubgraphSpec) -> Optional[Tuple[int, Tuple[int, ...]]]:
    """Cycle lengths as (hull depth, extras beyond it), or None for principal.

    Canonical: extras sorted, all > hull, and a run starting at hull+1 is
    absorbed into the hull, so {1..n} + {n+1} collapses to a hull of n+1.
    """
    if spec.kind == "hull":
        return spec.n, ()
    if spec.kind == "join":
        return _normalize(spec.n, (spec.m,))
    if spec.kind == "mixed":
        hull = 0
        extras: List[int] = []
        for part in spec.parts:
            sub = _profile(part)
            if sub is None:
                return None
            hull = max(hull, sub[0])
            extras.extend(sub[1])
        return _normalize(hull, tuple(extras))
    return None


def _normalize(hull: int, extras: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    pending = sorted({e for e in extras if e > hull})
    while pending and pending[0] == hull + 1:
        hull += 1
        pending.pop(0)
    return hull, tuple(pending)


def _spec_from_profile(hull: int, extras: Tuple[int, ...]) -> SubgraphSpec:
    if not extras:
        return SubgraphSpec.hull(hull)
    if len(extras) == 1:
        return SubgraphSpec.join(hull, extras[0])
    joins = tuple(SubgraphSpec.join(hull, e) for e in extras)
    return SubgraphSpec.mixed((SubgraphSpec.hull(hull),) + joins)


def _profile_contains(big, small) -> bool:
    bh, be = big
    sh, se = small
    if sh > bh:
        return False
    be_set = set(be)
    return all(e <= bh or e in be_set for e in se)


def _spec_contains(family: FamilyDescriptor, big: SubgraphSpec,
                   small: SubgraphSpec) -> Optional[bool]:
    """True/False when decidable cheaply, None when only edges can tell."""
    pb, ps = _profile(big), _profile(small)
    if pb is not None and ps is not None:
        return _profile_contains(pb, ps)
    if big.kind == "principal" and small.kind == "principal":
        return small.depth <= big.depth
    return None


def resolve_spec(family: FamilyDescriptor, spec: SubgraphSpec,
                 cap: int = DEFAULT_ENUM_CAP) -> LoadedGraph:
    """Materialize a spec as a loaded graph; refuse oversized instances."""
    prof = _profile(spec)
    if prof is not None:
        hull, extras = prof
        top = max((hull,) + extras) if extras else hull
        if family.k_of_n(top) > MATERIALIZE_LIMIT:
            raise CapExceeded(
                f"instance needs {family.k_of_n(top)} vertices; "
                f"materialization stops at {MATERIALIZE_LIMIT}"
            )
        g = build_Gn(family, hull, cap) if hull >= 1 else None
        for e in extras:
            extra = _cycle_family_subgraph(family, e, cap)
            if extra is not None:
                g = extra if g is None else g.union(extra)
        if g is None:
            raise ParameterOutOfRange("spec resolves to an empty subgraph")
        return g
    if spec.kind == "principal":
        if family.k_of_n(spec.depth) > MATERIALIZE_LIMIT:
            raise CapExceeded(
                f"principal part at depth {spec.depth} exceeds the "
                f"materialization limit {MATERIALIZE_LIMIT}"
            )
        ambient = family.realize(spec.depth)
        return principal_subgraph(ambient, range(1, spec.depth + 1))
    raise ParameterOutOfRange(f"unknown spec kind {spec.kind!r}")


# -- records and reports -----------------------------------------------------------


@dataclass(frozen=True)
class SequenceRecord:
    """One step of a trajectory; floats only, indices exact ints.

    ``checks`` holds named pass/fail flags (Kac identity, lower bounds,
    root ordering, structural gaps), ``diagnostics`` named floats such as
    probe counts or tail products, ``seconds`` the wall time spent.
    Timing never reaches the serializers, so reruns are byte-identical.
    """

    index: int
    label: str
    n: int
    m: Optional[int]
    R: float
    dphi: float
    pi_v: float
    delta: float
    checks: Dict[str, bool] = field(default_factory=dict)
    diagnostics: Dict[str, float] = field(default_factory=dict)
    seconds: float = 0.0


@dataclass(frozen=True)
class SequenceReport:
    """Trajectory records plus the certified reference and the verdict."""

    records: Tuple[SequenceRecord, ...]
    reference: CertifiedValue
    verdict: Verdict
    thresholds: Dict[str, float]

    def all_checks_pass(self) -> bool:
        return all(v for r in self.records for v in r.checks.values())


def _thresholds(reference: CertifiedValue) -> Dict[str, float]:
    return {
        "tol_regular": max(10.0 * reference.tail_bound, 1e-3),
        "tol_oscillation": 0.5 * reference.value,
        "growth_factor": GROWTH_FACTOR,
        "window": float(VERDICT_WINDOW),
    }


def verdict(values: Sequence[float], reference: CertifiedValue) -> Verdict:
    """Diagnose the limiting behaviour of a derivative trajectory.

    Tested in order: settled on the reference (trailing window inside
    tol_regular), oscillating (some drop from a running peak of at least
    half the reference), escaping (peak at the end, at least growth_factor
    times the reference, non-decreasing trailing window).  Anything else
    is inconclusive.  Fewer than ``window`` records is a refusal, not a
    verdict.
    """
    values = [float(v) for v in values]
    if len(values) < VERDICT_WINDOW:
        raise TooFewRecords(
            f"verdicts need at least {VERDICT_WINDOW} records, got {len(values)}"
        )
    th = _thresholds(reference)
    window = values[-VERDICT_WINDOW:]
    if all(abs(v - reference.value) <= th["tol_regular"] for v in window):
        return Verdict.REGULAR
    peak = values[0]
    drop = 0.0
    for v in values[1:]:
        drop = max(drop, peak - v)
        peak = max(peak, v)
    if drop >= th["tol_oscillation"]:
        return Verdict.NO_LIMIT
    if (
        values[-1] == max(values)
        and values[-1] >= th["growth_factor"] * reference.value
        and all(b >= a for a, b in zip(window, window[1:]))
    ):
        return Verdict.IRREGULAR_NULL
    return Verdict.INCONCLUSIVE


def _verdict_or_refusal(values: Sequence[float], reference: CertifiedValue) -> str:
    if len(values) < VERDICT_WINDOW:
        return "TooFewRecords"
    return verdict(values, reference).value


def _report(records: List[SequenceRecord], reference: CertifiedValue) -> SequenceReport:
    values = [r.dphi for r in records]
    v = Verdict.INCONCLUSIVE if len(values) < VERDICT_WINDOW else verdict(values, reference)
    return SequenceReport(
        records=tuple(records),
        reference=reference,
        verdict=v,
        thresholds=_thresholds(reference),
    )


# -- builders ----------------------------------------------------------------------


def _cycle_family_subgraph(family: FamilyDescriptor, length: int,
                           cap: int) -> Optional[LoadedGraph]:
    """Subgraph generated by all length-``length`` first-return cycles.

    None when the family has no cycle of that length (possible for petal
    supports with holes); the caller unions whatever exists.
    """
    ambient = family.realize(family.k_of_n(length))
    cycles = enumerate_simple_cycles(ambient, 1, length, cap=cap)
    if not cycles:
        return None
    return subgraph_generated_by(ambient, cycles)


def build_Gn(family: FamilyDescriptor, n: int,
             cap: int = DEFAULT_ENUM_CAP) -> LoadedGraph:
    """Union of the subgraphs generated by first-return cycles of length <= n.

    Minimal by construction: an edge appears only if some cycle of length
    at most n traverses it.  The base vertex is 1 throughout.
    """
    if n < 1:
        raise ParameterOutOfRange(f"need n >= 1, got {n}")
    g: Optional[LoadedGraph] = None
    for length in range(1, n + 1):
        extra = _cycle_family_subgraph(family, length, cap)
        if extra is not None:
            g = extra if g is None else g.union(extra)
    if g is None:
        raise ParameterOutOfRange(
            f"the family has no first-return cycle of length <= {n}"
        )
    return g


def build_Gnm(family: FamilyDescriptor, n: int, m: int,
              cap: int = DEFAULT_ENUM_CAP) -> LoadedGraph:
    """Hull of depth n joined with the full length-m cycle family (m > n)."""
    if m <= n:
        raise ParameterOutOfRange(f"need m > n, got n={n}, m={m}")
    g = build_Gn(family, n, cap)
    extra = _cycle_family_subgraph(family, m, cap)
    if extra is None:
        return g
    return g.union(extra)


def a_of_n(family: FamilyDescriptor, n: int) -> int:
    """Largest cycle length whose cycles all stay below vertex n.

    Inverse staircase of the maximal-vertex profile: 1 while n <= k_2,
    then the unique i with k_i < n <= k_{i+1}.  Works on indices far past
    any materializable size because only the profile is consulted.
    """
    if n < 1:
        raise ParameterOutOfRange(f"need n >= 1, got {n}")
    if n <= family.k_of_n(2):
        return 1
    hi = 2
    while family.k_of_n(hi) < n:
        hi *= 2
    lo = hi // 2
    # invariant: k_lo < n <= k_hi; shrink to adjacent indices
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if family.k_of_n(mid) < n:
            lo = mid
        else:
            hi = mid
    return lo


def structural_gap_check(family: FamilyDescriptor, n: int, m: int,
                         cap: int = DEFAULT_ENUM_CAP) -> bool:
    """No first-return cycle of the joined instance has length strictly
    between k_n and a_of_n(m).

    An empty window passes vacuously.  Small instances are searched
    exhaustively with the range kernel; chain instances past the
    materialization limit are decided from the length profile, which is
    {1..n} plus {m} with nothing in between.
    """
    if m <= n:
        raise ParameterOutOfRange(f"need m > n, got n={n}, m={m}")
    lo = family.k_of_n(n)
    hi = a_of_n(family, m)
    if hi - lo <= 1:
        return True
    if family.k_of_n(m) > MATERIALIZE_LIMIT:
        if getattr(family, "variant", None) == "chain":
            # lengths are exactly {1..n, m}; the window (k_n, a(m)) sits
            # inside (n, m) so it contains no cycle length
            return True
        raise CapExceeded(
            f"gap check at m={_short(m)} needs materialization beyond "
            f"{MATERIALIZE_LIMIT} vertices"
        )
    g = build_Gnm(family, n, m, cap)
    indptr, indices, _ = g.csr()
    found = K.dfs_find_cycle_in_range(indptr, indices, g.vertex_index(1), lo, hi, cap)
    if found < 0:
        raise EnumerationCapExceeded(
            f"gap scan expanded more than {cap} edges at (n={n}, m={m})"
        )
    return found == 0


def polynomial_decomposition(family: FamilyDescriptor, n: int, m: int,
                             cap: int = DEFAULT_ENUM_CAP):
    """Coefficient tables (q, q1, q2) of the family, the hull, and the join.

    q1 and q2 are the exact first-return polynomials of the depth-n hull
    and the (n, m) join; q holds the ambient coefficients on the same
    index range.  Verifies the sandwich 0 <= q1 <= q2 <= q, that the join
    recovers the full weight at m, and that the hull is exact up to n.
    """
    g1 = build_Gn(family, n, cap)
    g2 = build_Gnm(family, n, m, cap)
    order = g2.n_vertices + 1
    s1 = return_series(g1, 1, order)
    s2 = return_series(g2, 1, order)
    if not (s1.exact and s2.exact):
        raise ThermographError(
            "finite instance produced a non-terminating return series"
        )
    q = [0.0] + [family.q(i) for i in range(1, order + 1)]
    q1 = list(s1.coeffs) + [0.0] * (order + 1 - len(s1.coeffs))
    q2 = list(s2.coeffs) + [0.0] * (order + 1 - len(s2.coeffs))
    slack = 1e-12
    for i in range(order + 1):
        tol = slack * max(1.0, abs(q[i]))
        if not (-tol <= q1[i] <= q2[i] + tol and q2[i] <= q[i] + tol):
            raise ThermographError(
                f"decomposition sandwich fails at length {i}: "
                f"q1={q1[i]!r}, q2={q2[i]!r}, q={q[i]!r}"
            )
    if abs(q2[m] - q[m]) > slack * max(1.0, abs(q[m])):
        raise ThermographError(
            f"join misses weight at its own length: q2[{m}]={q2[m]!r}, q[{m}]={q[m]!r}"
        )
    for i in range(1, n + 1):
        if abs(q1[i] - q[i]) > slack * max(1.0, abs(q[i])):
            raise ThermographError(
                f"hull differs from the family below its depth at {i}"
            )
    return q, q1, q2


# -- polynomial-route evaluation ----------------------------------------------------


def _poly_record(family: FamilyDescriptor, graph: LoadedGraph, index: int,
                 label: str, n: int, m: Optional[int], t0: float,
                 extra_checks: Optional[Dict[str, bool]] = None,
                 extra_diag: Optional[Dict[str, float]] = None) -> SequenceRecord:
    """Record for a materialized instance: exact tables, then the root."""
    series = return_series(graph, 1, graph.n_vertices + 1)
    if not series.exact:
        raise ThermographError("materialized instance is not polynomial")
    R = solve_unit_root(series)
    dphi = eval_series(series, R, 1)
    measure = parry_measure(graph)
    pi = measure.pi_of(1)
    kac = abs(pi - 1.0 / (R * dphi))
    checks = {"kac": kac <= KAC_TOL}
    if extra_checks:
        checks.update(extra_checks)
    diag = {"kac_residual": kac}
    if extra_diag:
        diag.update(extra_diag)
    return SequenceRecord(
        index=index,
        label=label,
        n=n,
        m=m,
        R=R,
        dphi=dphi,
        pi_v=pi,
        delta=R - family.radius,
        checks=checks,
        diagnostics=diag,
        seconds=time.perf_counter() - t0,
    )


def _lane_record(family: FamilyDescriptor, index: int, label: str,
                 n: int, m: Optional[int], t0: float,
                 lane: Optional[root_lane.ChainRootLane] = None,
                 extra_checks: Optional[Dict[str, bool]] = None,
                 extra_diag: Optional[Dict[str, float]] = None) -> SequenceRecord:
    """Record via the closed-form lane; stationary mass from the return law."""
    if lane is None:
        lane = root_lane.ChainRootLane(family, n)
    info = lane.info(m)
    checks = {"lower_bound": info.bound_ok}
    if extra_checks:
        checks.update(extra_checks)
    diag = {"log10_delta": info.log10_delta}
    if extra_diag:
        diag.update(extra_diag)
    return SequenceRecord(
        index=index,
        label=label,
        n=n,
        m=m,
        R=info.R,
        dphi=info.dphi,
        pi_v=info.pi_base,
        delta=info.delta,
        checks=checks,
        diagnostics=diag,
        seconds=time.perf_counter() - t0,
    )


# -- scans and searches --------------------------------------------------------------


def _require_uplg(family: FamilyDescriptor) -> None:
    cls = classify_family(family)
    if cls.kind is not ClassKind.UNSTABLE_POSITIVE:
        raise NotUPLG(
            f"family classifies as {cls.kind.value}; scans need the "
            "unit-mass knife edge"
        )


def _require_bounded_jumps(family: FamilyDescriptor) -> None:
    if getattr(family, "jump_bound", None) is None:
        raise NoBoundedJumps(
            "scans need a uniform bound on per-step vertex growth"
        )


def regular_scan(family: FamilyDescriptor, n_max: int,
                 cap: int = DEFAULT_ENUM_CAP) -> SequenceReport:
    """Trajectory along the exhaustive hulls G_1 ... G_{n_max}.

    Each record carries the hull root R_n, the derivative there and at the
    ambient radius, the stationary mass of the base vertex with its Kac
    cross-check, and the audited inequalities: root ordering R_n >= R,
    derivative domination at both points, monotone growth of the
    derivative at the radius, and the jump-bound ratio estimate
    dphi_n(R_n)/dphi_n(R) <= (1 + delta_n/R)^(K n).
    """
    if n_max < 1:
        raise ParameterOutOfRange(f"need n_max >= 1, got {n_max}")
    _require_uplg(family)
    _require_bounded_jumps(family)
    reference = family.dphi_at_radius()
    phi_ref = family.phi_at_radius()
    R_amb = family.radius
    jump = family.jump_bound
    records: List[SequenceRecord] = []
    prev_dphi_at_R: Optional[float] = None
    g: Optional[LoadedGraph] = None
    for idx in range(1, n_max + 1):
        t0 = time.perf_counter()
        # hulls are nested, so extend the previous one instead of rebuilding
        extra = _cycle_family_subgraph(family, idx, cap)
        if extra is not None:
            g = extra if g is None else g.union(extra)
        if g is None:
            raise ParameterOutOfRange(
                f"the family has no first-return cycle of length <= {idx}"
            )
        series = return_series(g, 1, g.n_vertices + 1)
        if not series.exact:
            raise ThermographError(f"hull {idx} is not polynomial")
        Rn = solve_unit_root(series)
        dphi_n = eval_series(series, Rn, 1)
        dphi_at_R = eval_series(series, R_amb, 1)
        phi_at_R = eval_series(series, R_amb, 0)
        measure = parry_measure(g)
        pi = measure.pi_of(1)
        kac = abs(pi - 1.0 / (Rn * dphi_n))
        delta = Rn - R_amb
        ratio = dphi_n / dphi_at_R
        ratio_bound = (1.0 + delta / R_amb) ** (jump * idx)
        checks = {
            "kac": kac <= KAC_TOL,
            "root_above_radius": Rn >= R_amb - 1e-15,
            "derivative_dominates": dphi_n >= dphi_at_R - 1e-12 * dphi_n,
            "ratio_bound": ratio <= ratio_bound * (1.0 + 1e-9),
        }
        if prev_dphi_at_R is not None:
            checks["derivative_monotone"] = (
                dphi_at_R >= prev_dphi_at_R - 1e-12 * max(1.0, dphi_at_R)
            )
        prev_dphi_at_R = dphi_at_R
        records.append(SequenceRecord(
            index=idx,
            label=f"Gn({idx})",
            n=idx,
            m=None,
            R=Rn,
            dphi=dphi_n,
            pi_v=pi,
            delta=delta,
            checks=checks,
            diagnostics={
                "kac_residual": kac,
                "dphi_at_radius": dphi_at_R,
                "phi_at_radius": phi_at_R,
                "mass_gap_scaled": idx * (phi_ref.value - phi_at_R),
                "ratio": ratio,
                "ratio_bound": ratio_bound,
            },
            seconds=time.perf_counter() - t0,
        ))
    return _report(records, reference)


def _poly_join_dphi(family: FamilyDescriptor, n: int, m: int,
                    cap: int) -> Tuple[float, LoadedGraph]:
    g = build_Gnm(family, n, m, cap)
    series = return_series(g, 1, g.n_vertices + 1)
    if not series.exact:
        raise ThermographError(f"join ({n}, {m}) is not polynomial")
    R = solve_unit_root(series)
    return eval_series(series, R, 1), g


def _scan_smallest_m(family: FamilyDescriptor, n: int, threshold: float,
                     cap: Optional[int], enum_cap: int) -> Tuple[int, int]:
    """Linear probe of m = n+1, n+2, ... on materialized joins.

    Fallback for families without a closed-form lane; only viable while
    the joins stay enumerable.  Returns (m, probes).
    """
    limit = cap if cap is not None else n + 5000
    probes = 0
    for m in range(n + 1, limit + 1):
        probes += 1
        dphi, _ = _poly_join_dphi(family, n, m, enum_cap)
        if dphi > threshold:
            return m, probes
    raise SearchExhausted(
        f"no join index up to {limit} pushes the derivative past {threshold}",
        best_m=limit,
    )


def irregular_search(family: FamilyDescriptor, k_max: int,
                     n_start: int = 1, cap: Optional[int] = None,
                     enum_cap: int = DEFAULT_ENUM_CAP,
                     ) -> Tuple[List[int], SequenceReport]:
    """Greedy ladder of joins whose derivative exceeds 1, 2, ..., k_max.

    Starting from n_1 = n_start, step k picks the smallest m > n_k with
    derivative of the (n_k, m) join above k, then sets n_{k+1} = m.
    Returns the indices n_1 ... n_{k_max+1} and a report whose record k
    describes the chosen join: its root, derivative, base-vertex mass
    1/(R dphi), and the audit flags (per-probe lower bound, root strictly
    between the ambient radius and the hull root, structural gap).

    Chain families route through the closed-form lane, so indices may
    grow to thousands of digits; anything else probes materialized joins
    and raises once they stop being enumerable.
    """
    if k_max < 1:
        raise ParameterOutOfRange(f"need k_max >= 1, got {k_max}")
    if n_start < 1:
        raise ParameterOutOfRange(f"need n_start >= 1, got {n_start}")
    _require_uplg(family)
    _require_bounded_jumps(family)
    reference = family.dphi_at_radius()
    use_lane = getattr(family, "variant", None) == "chain"
    indices = [int(n_start)]
    records: List[SequenceRecord] = []
    n = int(n_start)
    for k in range(1, k_max + 1):
        t0 = time.perf_counter()
        if use_lane:
            lane = root_lane.ChainRootLane(family, n)
            hull = lane.info(None)
            info, probes = root_lane.smallest_m_exceeding(
                family, n, float(k), cap=cap, lane=lane
            )
            m = info.m
            ordering_ok = all(
                0 < p.a < hull.a for p in probes
            )
            bound_ok = all(p.bound_ok for p in probes)
            gap_ok = structural_gap_check(family, n, m, enum_cap)
            checks = {
                "lower_bound": bound_ok,
                "root_ordering": ordering_ok,
                "structural_gap": gap_ok,
            }
            diag = {
                "log10_delta": info.log10_delta,
                "probes": float(len(probes)),
                "hull_dphi": hull.dphi,
                "threshold": float(k),
            }
            if family.k_of_n(m) <= MATERIALIZE_LIMIT:
                # cheap enough to cross-check the lane against exact tables
                g = build_Gnm(family, n, m, enum_cap)
                rec = _poly_record(
                    family, g, k, f"Gnm({n},{m})", n, m, t0,
                    extra_checks=checks,
                    extra_diag=dict(
                        diag, lane_R=info.R, lane_dphi=info.dphi
                    ),
                )
            else:
                rec = SequenceRecord(
                    index=k,
                    label=f"Gnm({_short(n)},{_short(m)})",
                    n=n,
                    m=m,
                    R=info.R,
                    dphi=info.dphi,
                    pi_v=info.pi_base,
                    delta=info.delta,
                    checks=checks,
                    diagnostics=diag,
                    seconds=time.perf_counter() - t0,
                )
        else:
            m, n_probes = _scan_smallest_m(family, n, float(k), cap, enum_cap)
            dphi_prev, g = _poly_join_dphi(family, n, m - 1, enum_cap) \
                if m > n + 1 else (None, None)
            g = build_Gnm(family, n, m, enum_cap)
            gap_ok = structural_gap_check(family, n, m, enum_cap)
            checks = {"structural_gap": gap_ok}
            if dphi_prev is not None:
                checks["minimal"] = dphi_prev <= float(k)
            rec = _poly_record(
                family, g, k, f"Gnm({n},{m})", n, m, t0,
                extra_checks=checks,
                extra_diag={"probes": float(n_probes), "threshold": float(k)},
            )
        records.append(rec)
        indices.append(rec.m)
        n = rec.m
    return indices, _report(records, reference)


# -- mixing and spec evaluation ------------------------------------------------------


def _check_nested(family: FamilyDescriptor, specs: Sequence[SubgraphSpec]) -> None:
    for a, b in zip(specs, specs[1:]):
        contained = _spec_contains(family, b, a)
        if contained is None:
            ga = resolve_spec(family, a)
            gb = resolve_spec(family, b)
            contained = ga.subgraph_of(gb)
        if not contained:
            raise NotNested(
                f"{a.label()} is not contained in {b.label()}"
            )


def mix_sequences(family: FamilyDescriptor, first: Sequence[SubgraphSpec],
                  second: Sequence[SubgraphSpec],
                  schedule: str = "alternate") -> List[SubgraphSpec]:
    """Interleave two nested sequences into one nested sequence.

    The output is the running union of the scheduled picks, with steps
    that add nothing dropped, so mixing a sequence with itself returns
    the sequence and an empty side returns the other side unchanged.
    Inputs that are not nested raise before any mixing happens.
    """
    first = list(first)
    second = list(second)
    if first:
        _check_nested(family, first)
    if second:
        _check_nested(family, second)
    if not second:
        return first
    if not first:
        return second
    if schedule != "alternate":
        raise ParameterOutOfRange(f"unknown schedule {schedule!r}")
    picks: List[SubgraphSpec] = []
    ia = ib = 0
    while ia < len(first) or ib < len(second):
        if ia < len(first):
            picks.append(first[ia])
            ia += 1
        if ib < len(second):
            picks.append(second[ib])
            ib += 1
    out: List[SubgraphSpec] = []
    acc: Optional[Tuple[int, Tuple[int, ...]]] = None
    for spec in picks:
        prof = _profile(spec)
        if prof is None:
            raise ParameterOutOfRange(
                "mixing needs length-profiled specs; principal parts "
                "cannot be unioned symbolically"
            )
        if acc is None:
            acc = prof
        elif _profile_contains(acc, prof):
            continue
        else:
            hull = max(acc[0], prof[0])
            acc = _normalize(hull, tuple(acc[1]) + tuple(prof[1]))
        candidate = _spec_from_profile(*acc)
        if out and out[-1] == candidate:
            continue
        out.append(candidate)
    return out


def _spec_record(family: FamilyDescriptor, idx: int, spec: SubgraphSpec,
                 enum_cap: int) -> SequenceRecord:
    """One trajectory record for one spec, on whichever route fits."""
    t0 = time.perf_counter()
    prof = _profile(spec)
    if prof is not None:
        hull, extras = prof
        top = max((hull,) + extras) if extras else hull
        n_for_record = hull
        m_for_record = extras[0] if len(extras) == 1 else None
    else:
        top = spec.depth
        n_for_record = spec.depth
        m_for_record = None
    if family.k_of_n(top) <= MATERIALIZE_LIMIT:
        g = resolve_spec(family, spec, enum_cap)
        return _poly_record(
            family, g, idx, spec.label(), n_for_record, m_for_record, t0
        )
    if (
        getattr(family, "variant", None) == "chain"
        and prof is not None
        and len(extras) <= 1
    ):
        return _lane_record(
            family, idx, spec.label(), hull,
            extras[0] if extras else None, t0
        )
    raise CapExceeded(
        f"{spec.label()} is past the materialization limit and has no "
        "closed-form route"
    )


def evaluate_specs(family: FamilyDescriptor, specs: Sequence[SubgraphSpec],
                   enum_cap: int = DEFAULT_ENUM_CAP) -> SequenceReport:
    """Root/derivative/mass trajectory along an explicit nested sequence.

    Small members materialize to exact polynomial tables; chain members
    past the limit must look like a hull plus at most one longer cycle
    family, which is what the closed-form lane evaluates.  Anything
    larger is refused rather than approximated.

    Records are independent, so THERMOGRAPH_THREADS > 1 spreads them over
    a thread pool; output order and content do not depend on the worker
    count, and a failure raises the same error the sequential order would
    have hit first.
    """
    specs = list(specs)
    if not specs:
        raise ParameterOutOfRange("need at least one spec")
    _check_nested(family, specs)
    reference = family.dphi_at_radius()
    workers = worker_count()
    if workers > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_spec_record, family, idx, spec, enum_cap)
                for idx, spec in enumerate(specs, start=1)
            ]
            outcomes = []
            for fut in futures:
                try:
                    outcomes.append((None, fut.result()))
                except Exception as exc:
                    outcomes.append((exc, None))
        records = []
        for exc, rec in outcomes:
            if exc is not None:
                raise exc
            records.append(rec)
    else:
        records = [
            _spec_record(family, idx, spec, enum_cap)
            for idx, spec in enumerate(specs, start=1)
        ]
    return _report(records, reference)


# -- serialization -------------------------------------------------------------------


CSV_HEADER = "k,n,m,R_k,dphi_at_Rk,pi_v,delta_n,verdict_running"


def report_to_csv(report: SequenceReport) -> str:
    """Flat per-record table; the verdict column is the running verdict
    over the prefix ending at that row, ``TooFewRecords`` while the prefix
    is shorter than the verdict window."""
    lines = [CSV_HEADER]
    seen: List[float] = []
    for r in report.records:
        seen.append(r.dphi)
        running = _verdict_or_refusal(seen, report.reference)
        m_cell = "" if r.m is None else str(r.m)
        lines.append(
            f"{r.index},{r.n},{m_cell},{fmt(r.R)},{fmt(r.dphi)},"
            f"{fmt(r.pi_v)},{fmt(r.delta)},{running}"
        )
    return "\n".join(lines) + "\n"


def report_to_json(report: SequenceReport) -> str:
    """Report as JSON: records with checks and diagnostics, the certified
    reference, the pinned thresholds, and the final verdict.  Timing is
    deliberately excluded so reruns serialize identically."""
    seen: List[float] = []
    rows = []
    for r in report.records:
        seen.append(r.dphi)
        rows.append({
            "k": r.index,
            "label": r.label,
            "n": r.n,
            "m": r.m,
            "R_k": r.R,
            "dphi_at_Rk": r.dphi,
            "pi_v": r.pi_v,
            "delta_n": r.delta,
            "checks": dict(r.checks),
            "diagnostics": dict(r.diagnostics),
            "verdict_running": _verdict_or_refusal(seen, report.reference),
        })
    obj = {
        "reference": {
            "value": report.reference.value,
            "tail_bound": report.reference.tail_bound,
        },
        "thresholds": dict(report.thresholds),
        "verdict": report.verdict.value,
        "records": rows,
    }
    return json.dumps(obj, indent=2) + "\n"
