"""Infinite loaded-graph families with certified closed-form series data.

Three audited constructions over the vertex set {1, 2, ...}:

* chain: edges (i, i+1) of weight rho and (i, 1) of weight c*rho*i^(-s),
  so the unique length-n first-return cycle at 1 has weight c rho^n n^(-s);
* jumpy: chain plus two-step edges (i, i+2), normalized so first-return
  coefficients are beta * sum_k C(n-1,k) gamma^k (n+k)^(-s);
* petal: one vertex-disjoint cycle per length, meeting only at vertex 1.

Each descriptor carries its radius of convergence and certified values of
the series and its derivative there, precise enough to decide the
recurrence class including the knife-edge boundary cases.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from . import _kernels as K
from .errors import (
    BeyondRadius,
    CalibrationFailed,
    GraphFormatError,
    ParameterOutOfRange,
)
from .graph_core import LoadedGraph, build_graph


@dataclass(frozen=True)
class CertifiedValue:
    """A real number known to lie in [value - tail_bound, value + tail_bound]."""

    value: float
    tail_bound: float

    def __post_init__(self):
        if self.tail_bound < 0.0 or math.isnan(self.tail_bound):
            raise ValueError("tail_bound must be nonnegative")

    @property
    def lo(self) -> float:
        return self.value - self.tail_bound

    @property
    def hi(self) -> float:
        return self.value + self.tail_bound


# -- certified zeta sums --------------------------------------------------------

_ZETA_CACHE: Dict[float, CertifiedValue] = {}


def zeta_certified(s: float) -> CertifiedValue:
    """zeta(s) by direct summation with an integral tail sandwich.

    The tail over n > N lies between the integrals of x^(-s) from N+1 and
    from N; N doubles (up to 2^20 terms) until the half-width, plus a
    crude bound on summation rounding, is below 1e-13 relative.  For s
    close to 1 the cap may leave a wider but still certified enclosure.
    """
    if s <= 1.0:
        raise ParameterOutOfRange(f"zeta sum diverges at s = {s}")
    cached = _ZETA_CACHE.get(s)
    if cached is not None:
        return cached
    n = 1 << 14
    while True:
        terms = np.arange(1, n + 1, dtype=float) ** (-s)
        partial = math.fsum(terms)
        tail_lo = (n + 1.0) ** (1.0 - s) / (s - 1.0)
        tail_hi = float(n) ** (1.0 - s) / (s - 1.0)
        value = partial + 0.5 * (tail_lo + tail_hi)
        bound = 0.5 * (tail_hi - tail_lo) + 4e-16 * value
        if bound <= 1e-13 * value or n >= (1 << 20):
            out = CertifiedValue(value, bound)
            _ZETA_CACHE[s] = out
            return out
        n *= 2


def zeta_tail_bounds(s: float, n: int) -> Tuple[float, float]:
    """Integral sandwich for sum_{i>n} i^(-s), s > 1."""
    return ((n + 1.0) ** (1.0 - s) / (s - 1.0), float(n) ** (1.0 - s) / (s - 1.0))


def zeta_tail_certified(s: float, n: int) -> CertifiedValue:
    """Certified sum_{i>n} i^(-s): direct terms then an integral sandwich.

    Summing the head directly avoids the cancellation that zeta(s) minus a
    partial sum would suffer once the tail is tiny against zeta(s).
    """
    if s <= 1.0:
        raise ParameterOutOfRange(f"zeta tail diverges at s = {s}")
    if n < 0:
        raise ParameterOutOfRange(f"tail start must be nonnegative, got {n}")
    terms = 1 << 14
    while True:
        head = math.fsum(np.arange(n + 1, n + terms + 1, dtype=float) ** (-s))
        tail_lo, tail_hi = zeta_tail_bounds(s, n + terms)
        value = head + 0.5 * (tail_lo + tail_hi)
        bound = 0.5 * (tail_hi - tail_lo) + 4e-16 * value
        if bound <= 1e-13 * value or terms >= (1 << 20):
            return CertifiedValue(value, bound)
        terms *= 2


_EXACT_C = re.compile(
    r"^\s*(?:([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*/\s*)?"
    r"zeta\(\s*([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*\)\s*$"
)


def _parse_c(c) -> Tuple[float, Optional[Tuple[float, float]]]:
    """Accept a float or the exact form "alpha/zeta(s)".

    The string form records that c times zeta(s) is exactly alpha, which is
    what makes the boundary classification decidable.
    """
    if isinstance(c, str):
        m = _EXACT_C.match(c)
        if m:
            alpha = float(m.group(1)) if m.group(1) else 1.0
            arg = float(m.group(2))
            return alpha / zeta_certified(arg).value, (alpha, arg)
        try:
            return float(c), None
        except ValueError:
            raise ParameterOutOfRange(f"cannot parse weight scale {c!r}") from None
    return float(c), None


# -- descriptors ----------------------------------------------------------------

class FamilyDescriptor:
    """Shared interface of the audited infinite families.

    Subclasses provide closed-form first-return coefficients q(n), the
    maximal-vertex profile k_n, edge weights (None for absent edges),
    finite realizations, and certified series values at the radius.
    """

    variant: str = ""
    radius: float = math.nan
    jump_bound: Optional[int] = None
    calibrated_unit: bool = False

    def q(self, n: int) -> float:
        raise NotImplementedError

    def k_of_n(self, n: int) -> int:
        raise NotImplementedError

    def edge_weight(self, u: int, t: int) -> Optional[float]:
        raise NotImplementedError

    def realize(self, depth: int) -> LoadedGraph:
        raise NotImplementedError

    def phi_at_radius(self) -> CertifiedValue:
        raise NotImplementedError

    def dphi_at_radius(self) -> CertifiedValue:
        raise NotImplementedError

    def eval(self, z: float, order: int) -> CertifiedValue:
        raise NotImplementedError

    def _check_eval_args(self, z: float, order: int):
        if order not in (0, 1):
            raise ParameterOutOfRange(f"order must be 0 or 1, got {order}")
        if z < 0.0:
            raise ParameterOutOfRange(f"z must be nonnegative, got {z}")
        if z > self.radius * (1.0 + 1e-15):
            raise BeyondRadius(
                f"z = {z} exceeds the radius of convergence {self.radius}"
            )


class ChainFamily(FamilyDescriptor):
    """Single-jump family: q(n) = c rho^n n^(-s), radius 1/rho, k_n = n."""

    variant = "chain"
    jump_bound = 2

    def __init__(self, rho: float, s: float, c):
        c_value, c_exact = _parse_c(c)
        if not (0.0 < rho <= 1.0):
            raise ParameterOutOfRange(f"rho must be in (0, 1], got {rho}")
        if not (s > 1.0):
            raise ParameterOutOfRange(f"s must exceed 1, got {s}")
        if not (c_value > 0.0) or not math.isfinite(c_value):
            raise ParameterOutOfRange(f"c must be positive, got {c_value}")
        self.rho = float(rho)
        self.s = float(s)
        self.c = c_value
        self.c_exact = c_exact
        self.radius = 1.0 / self.rho
        self.calibrated_unit = (
            c_exact is not None and c_exact == (1.0, self.s)
        )

    def q(self, n: int) -> float:
        return self.c * self.rho ** n * float(n) ** (-self.s)

    def k_of_n(self, n: int) -> int:
        return n

    def edge_weight(self, u: int, t: int) -> Optional[float]:
        if t == u + 1:
            return self.rho
        if t == 1:
            return self.c * self.rho * float(u) ** (-self.s)
        return None

    def realize(self, depth: int) -> LoadedGraph:
        if depth < 1:
            raise ParameterOutOfRange(f"depth must be >= 1, got {depth}")
        edges = [(i, 1, self.edge_weight(i, 1)) for i in range(1, depth + 1)]
        edges += [(i, i + 1, self.rho) for i in range(1, depth)]
        return build_graph(edges)

    def phi_at_radius(self) -> CertifiedValue:
        # at z = R the geometric factor cancels: phi(R) = c * zeta(s)
        if self.c_exact is not None and self.c_exact[1] == self.s:
            return CertifiedValue(self.c_exact[0], 0.0)
        zs = zeta_certified(self.s)
        return CertifiedValue(self.c * zs.value,
                              self.c * zs.tail_bound + 4e-16 * self.c * zs.value)

    def dphi_at_radius(self) -> CertifiedValue:
        # phi'(R) = c rho * zeta(s-1), divergent at or below s = 2
        if self.s <= 2.0:
            return CertifiedValue(math.inf, 0.0)
        zs = zeta_certified(self.s - 1.0)
        v = self.c * self.rho * zs.value
        return CertifiedValue(v, self.c * self.rho * zs.tail_bound + 4e-16 * v)

    def eval(self, z: float, order: int) -> CertifiedValue:
        self._check_eval_args(z, order)
        if z == 0.0:
            return CertifiedValue(0.0, 0.0)
        x = self.rho * z
        if x >= 1.0 - 1e-12:
            return self.phi_at_radius() if order == 0 else self.dphi_at_radius()
        t = self.s - order  # exponent of i in the summand; positive since s > 1
        n = 1 << 10
        while True:
            i = np.arange(1, n + 1, dtype=float)
            partial = math.fsum(i ** (-t) * x ** i)
            tail = (n + 1.0) ** (-t) * x ** (n + 1) / (1.0 - x)
            if tail <= 1e-15 * max(partial, 1e-300) or n >= (1 << 22):
                scale = self.c if order == 0 else self.c / z
                return CertifiedValue(scale * (partial + 0.5 * tail),
                                      scale * (0.5 * tail + 4e-16 * partial))
            n *= 2


class JumpyFamily(FamilyDescriptor):
    """Two-jump family: q(n) = beta sum_k C(n-1,k) gamma^k (n+k)^(-s).

    Forward weights a = 1/(1+gamma) for one-steps and gamma*a^2 for
    two-steps cancel along every first-return cycle, so the radius is
    1/(1+gamma) regardless of a; k_n = 2n - 1.
    """

    variant = "jumpy"
    jump_bound = 3

    _TARGETS = {
        "UPLG": ("UnstablePositive", 1.0),
        "UnstablePositive": ("UnstablePositive", 1.0),
        "NRLG": ("NullRecurrent", 1.0),
        "NullRecurrent": ("NullRecurrent", 1.0),
        "Transient": ("Transient", 0.5),
        "SPLG": ("StablePositive", 2.0),
        "StablePositive": ("StablePositive", 2.0),
    }

    def __init__(self, gamma: float, s: float, target: str = "UPLG"):
        if gamma < 0.0 or not math.isfinite(gamma):
            raise ParameterOutOfRange(f"gamma must be >= 0, got {gamma}")
        key = target.value if hasattr(target, "value") else str(target)
        if key not in self._TARGETS:
            raise ParameterOutOfRange(f"unknown target class {target!r}")
        self.target, scale = self._TARGETS[key]
        if self.target in ("UnstablePositive", "StablePositive", "Transient"):
            if not (s > 2.0):
                raise ParameterOutOfRange(
                    f"target {self.target} needs s > 2 for a finite derivative "
                    f"at the radius, got s = {s}"
                )
        elif not (1.0 < s <= 2.0):
            raise ParameterOutOfRange(
                f"target NullRecurrent needs s in (1, 2], got {s}"
            )
        self.gamma = float(gamma)
        self.s = float(s)
        self.a = 1.0 / (1.0 + self.gamma)
        self.radius = 1.0 / (1.0 + self.gamma)
        self.calibrated_unit = self.target in ("UnstablePositive", "NullRecurrent")
        self._calibrate(scale)

    def _calibrate(self, scale: float):
        """beta = scale / S with S = sum_n q(n) R^n / beta, certified.

        Rows are bounded by n^(-s)/(1+gamma) (binomial sum times the
        geometric factor), giving the integral tail sandwich; the budget
        is raised until the enclosure supports 1e-8 boundary decisions.
        """
        n = 2500
        lgfact = None
        while True:
            lgfact = _log_factorials(n)
            s0, s1 = K.jumpy_series_sums(self.gamma, self.s, n, lgfact, 0.0)
            t_lo, t_hi = zeta_tail_bounds(self.s, n)
            tail_hi = t_hi / (1.0 + self.gamma)
            s_mid = s0 + 0.5 * tail_hi
            half = 0.5 * tail_hi + 1e-14 * s0
            if half <= 5e-9 * s_mid:
                break
            if n >= 80000:
                raise CalibrationFailed(
                    f"tail half-width {half:.3e} at {n} terms cannot certify "
                    "the boundary value"
                )
            n *= 2
        self.beta = scale / s_mid
        self._phi_r = CertifiedValue(scale, scale * half / s_mid + 4e-16 * scale)
        if self.s <= 2.0:
            self._dphi_r = CertifiedValue(math.inf, 0.0)
        else:
            t1_lo, t1_hi = zeta_tail_bounds(self.s - 1.0, n)
            d_lo = self.beta * (1.0 + self.gamma) * s1
            d_hi = self.beta * (1.0 + self.gamma) * (s1 + t1_hi / (1.0 + self.gamma))
            mid = 0.5 * (d_lo + d_hi)
            self._dphi_r = CertifiedValue(mid, 0.5 * (d_hi - d_lo) + 4e-16 * mid)
        self._series_terms = n

    def q(self, n: int) -> float:
        terms = [
            math.comb(n - 1, k) * self.gamma ** k * float(n + k) ** (-self.s)
            for k in range(n)
        ]
        return self.beta * math.fsum(terms)

    def k_of_n(self, n: int) -> int:
        return 2 * n - 1

    def edge_weight(self, u: int, t: int) -> Optional[float]:
        if t == u + 1:
            return self.a
        if t == u + 2:
            return self.gamma * self.a * self.a if self.gamma > 0 else None
        if t == 1:
            lw = (math.log(self.beta) - (u - 1) * math.log(self.a)
                  - self.s * math.log(u))
            if lw > 700.0:
                raise ParameterOutOfRange(
                    f"backward weight at vertex {u} overflows binary64"
                )
            return self.beta * self.a ** (-(u - 1)) * float(u) ** (-self.s)
        return None

    def realize(self, depth: int) -> LoadedGraph:
        if depth < 1:
            raise ParameterOutOfRange(f"depth must be >= 1, got {depth}")
        edges = [(i, 1, self.edge_weight(i, 1)) for i in range(1, depth + 1)]
        edges += [(i, i + 1, self.a) for i in range(1, depth)]
        if self.gamma > 0:
            edges += [(i, i + 2, self.gamma * self.a * self.a)
                      for i in range(1, depth - 1)]
        return build_graph(edges)

    def phi_at_radius(self) -> CertifiedValue:
        return self._phi_r

    def dphi_at_radius(self) -> CertifiedValue:
        return self._dphi_r

    def eval(self, z: float, order: int) -> CertifiedValue:
        self._check_eval_args(z, order)
        if z == 0.0:
            return CertifiedValue(0.0, 0.0)
        x = z * (1.0 + self.gamma)
        if x >= 1.0 - 1e-12:
            return self.phi_at_radius() if order == 0 else self.dphi_at_radius()
        n = self._series_terms
        s0, s1 = K.jumpy_series_sums(self.gamma, self.s, n, _log_factorials(n),
                                     math.log(x))
        # row_n <= x^n n^(-s) / (1+gamma): geometric tail off the radius
        tail0 = (n + 1.0) ** (-self.s) * x ** (n + 1) / (1.0 - x) / (1.0 + self.gamma)
        if order == 0:
            v = self.beta * (s0 + 0.5 * tail0)
            return CertifiedValue(v, self.beta * 0.5 * tail0 + 4e-16 * v)
        tail1 = (n + 1.0) ** (1.0 - self.s) * x ** (n + 1) / (1.0 - x) / (1.0 + self.gamma)
        v = self.beta / z * (s1 + 0.5 * tail1)
        return CertifiedValue(v, self.beta / z * 0.5 * tail1 + 4e-16 * v)


def _log_factorials(n: int) -> np.ndarray:
    """log(k!) for k = 0..n-1, exact enough for log-space binomials."""
    out = np.zeros(n)
    out[1:] = np.cumsum(np.log(np.arange(1, n, dtype=float)))
    return out


class PetalFamily(FamilyDescriptor):
    """One vertex-disjoint cycle per length, all through vertex 1.

    The length-n petal (if q(n) > 0) has n-1 fresh interior vertices and
    every edge on it weighs q(n)^(1/n), so its cycle weight is exactly
    q(n).  Either a finite mapping {n: q(n)} or the power-law rule
    q(n) = c rho^n n^(-s) is accepted.
    """

    variant = "petal"
    jump_bound = None

    def __init__(self, rule):
        if isinstance(rule, dict):
            support = {}
            for n, qn in sorted(rule.items()):
                n = int(n)
                qn = float(qn)
                if n < 1 or qn < 0.0 or not math.isfinite(qn):
                    raise ParameterOutOfRange(
                        f"petal weights need n >= 1 and q >= 0, got q({n}) = {qn}"
                    )
                if qn > 0.0:
                    support[n] = qn
            if not support:
                raise ParameterOutOfRange("petal rule has no positive weight")
            self._support = support
            self._power = None
            self.radius = math.inf
        else:
            rho, s, c = rule
            self._support = None
            self._power = ChainFamily(rho, s, c)
            self.radius = self._power.radius
            self.calibrated_unit = self._power.calibrated_unit

    def q(self, n: int) -> float:
        if self._support is not None:
            return self._support.get(n, 0.0)
        return self._power.q(n)

    def _lengths_upto(self, n: int):
        if self._support is not None:
            return [m for m in self._support if m <= n]
        return list(range(1, n + 1))

    def k_of_n(self, n: int) -> int:
        return 1 + sum(m - 1 for m in self._lengths_upto(n))

    def edge_weight(self, u: int, t: int) -> Optional[float]:
        # walk the petal layout; interior ids grow with cycle length
        next_id = 2
        m = 0
        while True:
            m += 1
            if self.q(m) == 0.0:
                if self._support is not None and m > max(self._support):
                    return None
                continue
            w = self.q(m) ** (1.0 / m)
            if m == 1:
                if u == 1 and t == 1:
                    return w
            else:
                interior = range(next_id, next_id + m - 1)
                first, last = interior[0], interior[-1]
                if u == 1 and t == first:
                    return w
                if u in interior and t == u + 1 and t in interior:
                    return w
                if u == last and t == 1:
                    return w
                next_id += m - 1
            if next_id > max(u, t) + 1:
                return None

    def realize(self, depth: int) -> LoadedGraph:
        if depth < 1:
            raise ParameterOutOfRange(f"depth must be >= 1, got {depth}")
        edges = []
        next_id = 2
        m = 0
        while next_id <= depth + 1:
            m += 1
            if self._support is not None and m > max(self._support):
                break
            qn = self.q(m)
            if qn == 0.0:
                continue
            w = qn ** (1.0 / m)
            if m == 1:
                edges.append((1, 1, w))
                continue
            ring = [1] + list(range(next_id, next_id + m - 1)) + [1]
            for a, b in zip(ring, ring[1:]):
                if a <= depth and b <= depth:
                    edges.append((a, b, w))
            next_id += m - 1
        if not edges:
            # depth keeps no petal: a sub-threshold realization is empty
            raise ParameterOutOfRange(f"no petal fits within depth {depth}")
        return build_graph(edges)

    def phi_at_radius(self) -> CertifiedValue:
        if self._support is not None:
            return CertifiedValue(math.inf, 0.0)
        return self._power.phi_at_radius()

    def dphi_at_radius(self) -> CertifiedValue:
        if self._support is not None:
            return CertifiedValue(math.inf, 0.0)
        return self._power.dphi_at_radius()

    def eval(self, z: float, order: int) -> CertifiedValue:
        if self._support is not None:
            if z < 0.0 or order not in (0, 1):
                raise ParameterOutOfRange("need z >= 0 and order in {0, 1}")
            v = math.fsum(
                (n * qn * z ** (n - 1) if order else qn * z ** n)
                for n, qn in self._support.items()
            )
            return CertifiedValue(v, 4e-16 * v)
        return self._power.eval(z, order)


# -- module-level operations ----------------------------------------------------

def chain_family(rho: float, s: float, c) -> ChainFamily:
    """Single-jump family; c may be the exact form "alpha/zeta(s)"."""
    return ChainFamily(rho, s, c)


def jumpy_family(gamma: float, s: float, target: str = "UPLG") -> JumpyFamily:
    """Two-jump family calibrated toward a requested recurrence class."""
    return JumpyFamily(gamma, s, target)


def petal_family(rule) -> PetalFamily:
    """Petal family from {n: q(n)} or a (rho, s, c) power-law rule."""
    return PetalFamily(rule)


def family_eval(family: FamilyDescriptor, z: float, order: int = 0) -> CertifiedValue:
    """Certified series value (order 0) or derivative (order 1) at z <= R."""
    return family.eval(z, order)


def realize_finite(family: FamilyDescriptor, depth: int) -> LoadedGraph:
    """Principal subgraph of the infinite graph on vertices {1..depth}."""
    return family.realize(depth)


def max_vertex_profile(family: FamilyDescriptor, n: int) -> int:
    """k_n: the largest vertex any first-return cycle of length <= n visits."""
    if n < 1:
        raise ParameterOutOfRange(f"n must be >= 1, got {n}")
    return family.k_of_n(n)


def family_from_json(text_or_obj) -> FamilyDescriptor:
    """Parse the family spec format.

    {"family":"chain","rho":0.5,"s":3.0,"c":"1/zeta(3)"} (c numeric or the
    exact zeta form), {"family":"jumpy","gamma":1.0,"s":3.0,"target":"UPLG"},
    {"family":"petal","q":{"1":1.0,...}} or petal with rho/s/c.
    """
    if isinstance(text_or_obj, (str, bytes)):
        try:
            obj = json.loads(text_or_obj)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc}") from None
    else:
        obj = text_or_obj
    if not isinstance(obj, dict) or "family" not in obj:
        raise GraphFormatError('expected an object with a "family" key')
    kind = obj["family"]
    try:
        if kind == "chain":
            return chain_family(obj["rho"], obj["s"], obj["c"])
        if kind == "jumpy":
            return jumpy_family(obj["gamma"], obj["s"], obj.get("target", "UPLG"))
        if kind == "petal":
            if "q" in obj:
                return petal_family({int(k): v for k, v in obj["q"].items()})
            return petal_family((obj["rho"], obj["s"], obj["c"]))
    except KeyError as exc:
        raise GraphFormatError(f"family spec missing field {exc}") from None
    raise GraphFormatError(f"unknown family kind {kind!r}")
