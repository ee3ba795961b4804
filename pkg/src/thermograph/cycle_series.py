"""First-return series at a base vertex and the recurrence classification.

The object of study is the power series whose n-th coefficient is the
total weight of first-return cycles of length n at a chosen vertex.  This
module computes those coefficients (taboo-matrix propagation, with a
brute-force enumeration oracle), evaluates the series and its derivative,
solves for the unit root, estimates the radius of convergence, and sorts
graphs and families into the four recurrence classes.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import _kernels as K
from ._util import fmt
from .errors import (
    AllZeroCoefficients,
    EnumerationCapExceeded,
    Inconclusive,
    NoConvergence,
    NotConnected,
    ParameterOutOfRange,
)
from .graph_core import CyclePath, LoadedGraph


@dataclass(frozen=True)
class ReturnSeries:
    """First-return coefficients q[1..N] at ``base``; q[0] is always 0.

    ``exact`` marks a complete polynomial: the graph admits no first-return
    cycle at ``base`` longer than N, so evaluation anywhere is exact rather
    than a truncation.
    """

    base: int
    coeffs: np.ndarray
    exact: bool

    def __post_init__(self):
        c = np.ascontiguousarray(self.coeffs, dtype=float)
        if c.ndim != 1 or len(c) < 1:
            raise ValueError("coeffs must be one-dimensional, indexed by length")
        if c[0] != 0.0 or np.any(c < 0.0) or not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite, nonnegative, q[0] = 0")
        object.__setattr__(self, "coeffs", c)

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class RadiusEstimate:
    """Radius of convergence, exact or estimated.

    ``certified`` means the true radius lies in [lower, upper]; otherwise
    value is a running Cauchy-Hadamard guess and the bounds are vacuous.
    """

    value: float
    certified: bool
    lower: float
    upper: float

    def __post_init__(self):
        if self.certified and not (self.lower <= self.value <= self.upper):
            raise ValueError("certified radius must satisfy lower <= value <= upper")


class ClassKind(enum.Enum):
    STABLE_POSITIVE = "StablePositive"
    UNSTABLE_POSITIVE = "UnstablePositive"
    NULL_RECURRENT = "NullRecurrent"
    TRANSIENT = "Transient"


@dataclass(frozen=True)
class Classification:
    """Recurrence class with its numeric witnesses.

    phi_at_R / dphi_at_R are certified enclosures of the series value and
    derivative at the radius (None when not computed, e.g. finite graphs,
    where the unit root and the derivative there are the witness instead).
    """

    kind: ClassKind
    phi_at_R: Optional[Tuple[float, float]]
    dphi_at_R: Optional[Tuple[float, float]]
    radius: float
    unit_root: Optional[float] = None
    dphi_at_unit_root: Optional[float] = None


# -- coefficients -------------------------------------------------------------

def return_series(graph: LoadedGraph, v: int, n_max: int) -> ReturnSeries:
    """q[1..n_max] at v via taboo-matrix propagation.

    q(1) is the self-loop weight; for n >= 2 the weight sum over length-n
    first returns is row_v . B^(n-2) . col_v with B the weight matrix with
    row and column v removed.  The propagated vector hitting zero proves
    the series is the complete polynomial (exact=True).
    """
    if n_max < 1:
        raise ParameterOutOfRange(f"n_max must be >= 1, got {n_max}")
    i = graph.vertex_index(v)
    q, terminated = K.taboo_series(graph.dense_matrix(), i, int(n_max))
    return ReturnSeries(base=v, coeffs=q, exact=bool(terminated))


def simple_cycle_sum(graph: LoadedGraph, v: int, n: int) -> float:
    """Total weight of first-return cycles of length exactly n at v."""
    if n < 1:
        raise ParameterOutOfRange(f"cycle length must be >= 1, got {n}")
    return float(return_series(graph, v, n).coeffs[n])


def enumerate_simple_cycles(graph: LoadedGraph, v: int, n: int,
                            cap: int = 5_000_000):
    """All first-return cycles of length exactly n at v, by pruned DFS.

    Exponential-time oracle against simple_cycle_sum; interior vertices may
    repeat, only v itself is tabooed.  ``cap`` bounds edge expansions.
    """
    if n < 1:
        raise ParameterOutOfRange(f"cycle length must be >= 1, got {n}")
    iv = graph.vertex_index(v)
    indptr, indices, _ = graph.csr()
    found = []
    path = [iv]
    cursors = [int(indptr[iv])]
    expansions = 0
    while cursors:
        u = path[-1]
        c = cursors[-1]
        if c >= indptr[u + 1]:
            path.pop()
            cursors.pop()
            if cursors:
                cursors[-1] += 1
            continue
        w = int(indices[c])
        expansions += 1
        if expansions > cap:
            raise EnumerationCapExceeded(
                f"cycle enumeration exceeded {cap} expansions at length {n}"
            )
        if len(path) == n:
            if w == iv:
                found.append(tuple(path) + (iv,))
            cursors[-1] += 1
        elif w == iv:
            cursors[-1] += 1
        else:
            path.append(w)
            cursors.append(int(indptr[w]))
    vids = graph.vertices
    return [CyclePath(tuple(vids[i] for i in p)) for p in found]


# -- evaluation and roots ------------------------------------------------------

def eval_series(series: ReturnSeries, z: float, order: int = 0) -> float:
    """Compensated evaluation of the series (order 0) or its derivative."""
    if z < 0.0:
        raise ParameterOutOfRange(f"z must be nonnegative, got {z}")
    if order not in (0, 1):
        raise ParameterOutOfRange(f"order must be 0 or 1, got {order}")
    return float(K.poly_eval(series.coeffs, float(z), order))


def solve_unit_root(series: ReturnSeries) -> float:
    """The unique z > 0 where the series value reaches 1.

    The value map is strictly increasing wherever some coefficient is
    positive, so a doubling bracket plus bisection with a Newton polish is
    safe; relative tolerance 1e-12.  On a truncation the result upper-bounds
    the true root (fewer cycles, larger root).
    """
    coeffs = series.coeffs
    if not np.any(coeffs > 0.0):
        raise AllZeroCoefficients("series has no positive coefficient")

    def f(z):
        return K.poly_eval(coeffs, z, 0)

    lo, hi = 0.0, 1.0
    while f(hi) < 1.0:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            raise NoConvergence("unit-root bracket ran away")
    assert f(lo) < 1.0 <= f(hi)
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if f(mid) < 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * hi:
            break
    z = hi
    for _ in range(12):
        slope = K.poly_eval(coeffs, z, 1)
        if slope <= 0.0:
            break
        step = (f(z) - 1.0) / slope
        z_new = z - step
        if not (0.0 < z_new) or not math.isfinite(z_new):
            break
        z = z_new
        if abs(step) <= 1e-14 * z:
            break
    return float(z)


def _unit_root_and_series(graph, v, rtol=1e-12, n_limit=1 << 20):
    """Unit root for an arbitrary finite connected graph, with the series
    truncation that certified it.

    Graphs whose interior carries cycles have infinite return series; the
    truncation is doubled until the remaining root motion, extrapolated
    from the last two moves, drops below rtol.  Truncated roots decrease
    monotonically to the limit.

    Returns (root, series, scale).  Coefficients grow like the taboo
    spectral radius to the n, which overflows binary64 long before slow
    truncations settle, so the series is computed on the graph with all
    weights divided by ``scale`` (the Perron root when above one).  The
    scaled series reaches 1 at scale * root, and z Phi'(z) is invariant,
    so callers evaluate derivatives at the scaled root and multiply by
    ``scale``.
    """
    lam = float(K.power_iteration(graph.dense_matrix(), 1e-13, 50000)[0])
    scale = lam if (math.isfinite(lam) and lam > 1.0) else 1.0
    if scale != 1.0:
        work = LoadedGraph(
            (e.src, e.dst, e.weight / scale) for e in graph.edges()
        )
    else:
        work = graph
    n = max(32, 2 * graph.n_vertices)
    prev_root = None
    prev_move = None
    while n <= n_limit:
        series = return_series(work, v, n)
        if series.exact:
            return solve_unit_root(series) / scale, series, scale
        z = solve_unit_root(series)
        if prev_root is not None:
            move = prev_root - z
            if move <= 0.0:
                return z / scale, series, scale
            if prev_move is not None:
                ratio = min(move / prev_move, 0.99) if prev_move > 0 else 0.0
                if move * ratio / (1.0 - ratio) <= rtol * z:
                    return z / scale, series, scale
            prev_move = move
        prev_root = z
        n *= 2
    raise NoConvergence(f"unit root did not stabilize within n_max = {n_limit}")


def first_return_unit_root(graph: LoadedGraph, v: int, rtol: float = 1e-12) -> float:
    """Unit root of the first-return series at v (adaptive truncation)."""
    return _unit_root_and_series(graph, v, rtol=rtol)[0]


def radius_estimate(series: ReturnSeries) -> RadiusEstimate:
    """Radius of convergence: infinite and certified for exact polynomials,
    else a running Cauchy-Hadamard estimate from the trailing coefficients."""
    if series.exact:
        return RadiusEstimate(math.inf, True, math.inf, math.inf)
    q = series.coeffs
    support = np.nonzero(q > 0.0)[0]
    if len(support) == 0:
        return RadiusEstimate(math.inf, False, 0.0, math.inf)
    tail = support[support >= support[-1] // 2]
    root_sup = float(np.max(q[tail] ** (1.0 / tail)))
    return RadiusEstimate(1.0 / root_sup, False, 0.0, math.inf)


# -- classification ------------------------------------------------------------

def classify_finite(graph: LoadedGraph, v: int) -> Classification:
    """Classify a finite connected graph: always stable positive.

    The return series reaches 1 strictly inside its disk of convergence,
    so the witnesses reported are the unit root and the derivative there.
    """
    if not graph.connected:
        raise NotConnected("classification needs a strongly connected graph")
    z, series, scale = _unit_root_and_series(graph, v)
    dphi = scale * eval_series(series, scale * z, 1)
    radius = radius_estimate(series)
    phi_at_r = (math.inf, math.inf) if series.exact else None
    return Classification(
        kind=ClassKind.STABLE_POSITIVE,
        phi_at_R=phi_at_r,
        dphi_at_R=phi_at_r,
        radius=radius.value / scale,
        unit_root=z,
        dphi_at_unit_root=dphi,
    )


def classify_family(family) -> Classification:
    """Certified classification of an infinite family from closed forms.

    The boundary case (series value exactly 1 at the radius) is a knife
    edge: it is decided only when the family carries an exact calibration
    flag; a plain interval straddling 1 refuses with Inconclusive.
    """
    phi = family.phi_at_radius()
    lo, hi = phi.value - phi.tail_bound, phi.value + phi.tail_bound
    dphi = family.dphi_at_radius()
    if math.isinf(dphi.value):
        dlo, dhi = math.inf, math.inf
    else:
        dlo, dhi = dphi.value - dphi.tail_bound, dphi.value + dphi.tail_bound
    witness = dict(phi_at_R=(lo, hi), dphi_at_R=(dlo, dhi), radius=family.radius)
    if hi < 1.0:
        return Classification(kind=ClassKind.TRANSIENT, **witness)
    if lo > 1.0:
        return Classification(kind=ClassKind.STABLE_POSITIVE, **witness)
    if family.calibrated_unit:
        if math.isinf(dphi.value):
            return Classification(kind=ClassKind.NULL_RECURRENT, **witness)
        return Classification(kind=ClassKind.UNSTABLE_POSITIVE, **witness)
    raise Inconclusive(
        "value at the radius straddles 1 and the family carries no exact "
        f"calibration: enclosure [{lo}, {hi}]"
    )


# -- export formats ------------------------------------------------------------

def series_to_csv(series: ReturnSeries) -> str:
    """Columns n,q with 17 significant digits."""
    lines = ["n,q"]
    for n in range(1, series.n_max + 1):
        lines.append(f"{n},{fmt(series.coeffs[n])}")
    return "\n".join(lines) + "\n"


def _json_num(x):
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def classification_to_json(c: Classification) -> str:
    def pair(p):
        if p is None:
            return None
        return {"lo": _json_num(p[0]), "hi": _json_num(p[1])}

    obj = {
        "class": c.kind.value,
        "phi_at_R": pair(c.phi_at_R),
        "dphi_at_R": pair(c.dphi_at_R),
        "R": _json_num(c.radius),
        "unit_root": _json_num(c.unit_root),
        "dphi_at_unit_root": _json_num(c.dphi_at_unit_root),
    }
    return json.dumps(obj, indent=2) + "\n"
