"""Closed-form unit roots for the single-jump family at extreme indices.

Truncated first-return series of the chain family have explicit
coefficients c rho^i i^(-s), so the unit-root equations for the depth-n
hull (build_Gn) and for the hull joined with one long cycle (build_Gnm)
reduce, in the variable a = ln(rho z), to

    c*E(a) + c*m^(-s)*exp(a m) = u,    E(a) = sum_{i<=n} i^(-s) expm1(a i)

where u is the coefficient mass the hull is missing at the radius.  E and
its derivative are evaluated through power sums C_t = sum_{i<=n} i^(t-s)
(Hurwitz zeta differences; the harmonic order via digamma), whose
exponential expansion converges after a few terms because a*n < 1
throughout the root regime.

Why this lane exists: the smallest index m pushing the derivative above a
level k grows double-exponentially in k, so the k-th witness has on the
order of 2^k digits, coefficient tables cannot be materialized, and
a = ln(rho R) underflows binary64.  Roots are found by Newton iteration
in mpmath precision sized to the candidate m, with power sums cached per
(depth, precision).  A binary64 twin over the same equations (kernel
chain_exp_sums) covers small indices for cross-checks and benchmarks.

Left endpoint g(0) < 0 and convexity of g make the Newton iteration from
the analytic upper start monotone, so no bisection safeguard is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from mpmath import mp, mpf

from . import _kernels as K
from .errors import NoConvergence, ParameterOutOfRange, SearchExhausted
from .families import ChainFamily, zeta_certified, zeta_tail_certified


def _digits10(m: int) -> int:
    return int(m.bit_length() * 0.30102999566398) + 1


def _dps_for(m: int) -> int:
    # deciding between adjacent candidates m-1, m needs ~digits(m) digits:
    # the derivative moves by a relative ~1/m step there
    want = _digits10(int(m)) + 60
    return ((want + 31) // 32) * 32


def _a_of_chain(m: int) -> int:
    # staircase inverse of the chain profile k_n = n
    return 1 if m <= 2 else m - 1


class _PowerSums:
    """C_t = sum_{i<=n} i^(t-s) at fixed precision, computed lazily.

    Direct summation for small n; otherwise zeta(s-t) - zeta(s-t, n+1),
    valid for every real order by analytic continuation, with digamma
    covering the harmonic order s-t = 1.
    """

    def __init__(self, n: int, s: float, dps: int):
        self.n = n
        self.s = s
        self.dps = dps
        self._vals: Dict[int, mpf] = {}

    def __call__(self, t: int) -> mpf:
        v = self._vals.get(t)
        if v is None:
            with mp.workdps(self.dps):
                r = mpf(self.s) - t
                if self.n <= 2000:
                    v = mp.fsum(mp.power(i, -r) for i in range(1, self.n + 1))
                elif r == 1:
                    v = mp.harmonic(self.n)
                else:
                    v = mp.zeta(r) - mp.zeta(r, self.n + 1)
            self._vals[t] = v
        return v


@dataclass(frozen=True)
class RootInfo:
    """Unit-root data for one truncated instance.

    Float views for reporting; the working-precision root ``a`` (of the
    centered equation, a = ln(rho R)) supports ordering comparisons that
    float deltas cannot resolve once they underflow.
    """

    n: int
    m: Optional[int]
    R: float
    delta: float
    log10_delta: float
    dphi: float
    pi_base: float
    lower_bound: float
    bound_ok: bool
    a: object
    dphi_mp: object
    dps: int


class ChainRootLane:
    """Root solver bound to one chain family and hull depth n.

    Power sums and the missing-mass constant are cached per precision
    bucket, so scanning many candidate long-cycle indices m against the
    same hull costs a handful of arbitrary-precision operations each.
    """

    def __init__(self, family: ChainFamily, n: int):
        if getattr(family, "variant", None) != "chain":
            raise ParameterOutOfRange("the closed-form lane covers the chain family")
        if n < 1:
            raise ParameterOutOfRange(f"hull depth must be >= 1, got {n}")
        self.family = family
        self.n = int(n)
        self._sums: Dict[int, _PowerSums] = {}
        self._mass: Dict[int, mpf] = {}
        self._c: Dict[int, mpf] = {}

    def _powersums(self, dps: int) -> _PowerSums:
        ps = self._sums.get(dps)
        if ps is None:
            ps = _PowerSums(self.n, self.family.s, dps)
            self._sums[dps] = ps
        return ps

    def _constants(self, dps: int) -> Tuple[mpf, mpf]:
        """(c, u): weight scale and the hull's missing coefficient mass
        u = 1 - c * sum_{i<=n} i^(-s), both at working precision."""
        u = self._mass.get(dps)
        if u is not None:
            return self._c[dps], u
        f = self.family
        with mp.workdps(dps):
            if f.c_exact is not None:
                alpha, arg = f.c_exact
                zs = mp.zeta(arg)
                c = mpf(alpha) / zs
                if arg == f.s:
                    # cancellation-free: u = 1 - alpha + alpha * tail / zeta
                    u = 1 - mpf(alpha) + mpf(alpha) * mp.zeta(f.s, self.n + 1) / zs
                else:
                    u = 1 - c * (mp.zeta(f.s) - mp.zeta(f.s, self.n + 1))
            else:
                c = mpf(f.c)
                u = 1 - c * (mp.zeta(f.s) - mp.zeta(f.s, self.n + 1))
        if u <= 0:
            raise ParameterOutOfRange(
                "hull already reaches the unit value at the radius; "
                "the family is not on the boundary"
            )
        self._c[dps] = c
        self._mass[dps] = u
        return c, u

    def _series_ed(self, a: mpf, ps: _PowerSums) -> Tuple[mpf, mpf]:
        """E(a) = sum i^(-s) expm1(a i) and D(a) = sum i^(1-s) exp(a i)."""
        E = mpf(0)
        D = ps(1)
        term = mpf(1)
        eps = mpf(10) ** (-(ps.dps + 5))
        j = 1
        while j <= 500:
            term = term * a / j
            ej = term * ps(j)
            E += ej
            D += term * ps(j + 1)
            # positive terms decay at least geometrically (a*n < 1)
            if ej <= eps * (E + D):
                return E, D
            j += 1
        raise NoConvergence("power-sum expansion failed to converge")

    def _newton(self, m: Optional[int], a0: mpf, ps: _PowerSums,
                c: mpf, u: mpf, log_m: Optional[mpf]) -> mpf:
        s = self.family.s
        a = mpf(a0)
        tol = mpf(10) ** (-(ps.dps - 10))
        for _ in range(120):
            E, D = self._series_ed(a, ps)
            g = c * E - u
            dg = c * D
            if m is not None:
                w = c * mp.exp(a * m - s * log_m)
                g += w
                dg += m * w
            step = g / dg
            a_next = a - step
            if a_next <= 0:
                a_next = a / 2
            if abs(step) <= tol * a_next:
                return a_next
            a = a_next
        raise NoConvergence(f"root iteration stalled (n={self.n}, m={m})")

    def info(self, m: Optional[int] = None) -> RootInfo:
        """Solve the instance and package root, derivative, and diagnostics.

        m=None solves the plain depth-n hull; otherwise the hull joined
        with the single length-m cycle (requires m > n).
        """
        f = self.family
        if m is not None:
            m = int(m)
            if m <= self.n:
                raise ParameterOutOfRange(
                    f"long-cycle index must exceed the hull depth, got {m} <= {self.n}"
                )
        dps = _dps_for(m if m is not None else max(self.n, 2))
        ps = self._powersums(dps)
        with mp.workdps(dps):
            c, u = self._constants(dps)
            a_hull = u / (c * ps(1))  # E(a) >= C_1 a puts the hull root below this
            if m is None:
                a = self._newton(None, a_hull, ps, c, u, None)
                log_m = None
            else:
                log_m = mp.log(m)
                a_join = (mp.log(u / c) + f.s * log_m) / m
                a = self._newton(m, min(a_join, a_hull), ps, c, u, log_m)
            R_mp = mp.exp(a) / f.rho
            delta_mp = mp.expm1(a) / f.rho
            E, D = self._series_ed(a, ps)
            if m is None:
                zphi = c * D
                lb = mpf(0)
                bound_ok = True
            else:
                mterm = c * mp.exp(a * m - f.s * log_m)
                zphi = c * D + m * mterm
                deficit = u - c * E  # 1 - (hull value at the root); equals mterm
                lb = _a_of_chain(m) * deficit / R_mp
                bound_ok = bool(zphi / R_mp >= lb)
            gain = zphi / R_mp
            return RootInfo(
                n=self.n,
                m=m,
                R=float(R_mp),
                delta=float(delta_mp),
                log10_delta=float(mp.log10(delta_mp)),
                dphi=float(gain),
                pi_base=float(1 / zphi),
                lower_bound=float(lb) if m is not None else math.nan,
                bound_ok=bound_ok,
                a=a,
                dphi_mp=gain,
                dps=dps,
            )


def root_info(family: ChainFamily, n: int, m: Optional[int] = None) -> RootInfo:
    """One-shot lane solve (tests and CLI; searches keep a lane for caching)."""
    return ChainRootLane(family, n).info(m)


def _long_branch_t(B: mpf, s: float, dps: int) -> Optional[mpf]:
    """Large solution of t - s ln t = B, or None when that branch is empty.

    This is the long-cycle side of the root condition: t = a*m with m the
    continuous index whose joined instance has its root at the given a.
    A few substitution rounds t <- B + s ln t localize the root, Newton
    (convex, increasing for t > s) finishes.
    """
    with mp.workdps(dps):
        s_mp = mpf(s)
        if B <= s_mp - s_mp * mp.log(s_mp) + mpf("0.05"):
            return None
        t = max(B + s_mp * mp.log(max(B, mp.e * s_mp)), s_mp * 3 / 2)
        for _ in range(40):
            t_next = B + s_mp * mp.log(t)
            if t_next <= s_mp:
                break
            if abs(t_next - t) <= mpf("1e-12") * t:
                t = t_next
                break
            t = t_next
        tol = mpf(10) ** (-(dps - 8))
        for _ in range(80):
            g = t - s_mp * mp.log(t) - B
            dg = 1 - s_mp / t
            step = g / dg
            t_next = t - step
            if t_next <= s_mp:
                t_next = (t + s_mp) / 2
            if abs(step) <= tol * t_next:
                return t_next
            t = t_next
        raise NoConvergence("long-cycle branch solve stalled")


def smallest_m_exceeding(family: ChainFamily, n: int, threshold: float,
                         cap: Optional[int] = None,
                         lane: Optional[ChainRootLane] = None,
                         ) -> Tuple[RootInfo, List[RootInfo]]:
    """Smallest m > n whose joined-instance derivative exceeds ``threshold``.

    Every decisive comparison happens at working precision: near the
    boundary, consecutive candidates move the derivative by a relative
    ~1/m, far below binary64 resolution once m has twenty digits.

    The index is located through the continuous system in the root
    variable a = ln(rho z).  Eliminating m between the root condition
    c E(a) + c m^(-s) e^(am) = u and the level condition (derivative =
    threshold) leaves a scalar equation along the long-cycle branch
    t - s ln t = B(a) with t = a*m, monotone decreasing in a; secant steps
    on ln a pin a to a relative width below 1/m.  A final integer walk
    with true root solves certifies derivative(m-1) <= threshold <
    derivative(m).  Returns the boundary RootInfo and every integer probe
    made.  Hitting ``cap`` first raises SearchExhausted carrying the
    probes and the best index tried.
    """
    if lane is None:
        lane = ChainRootLane(family, n)
    elif lane.n != n:
        raise ParameterOutOfRange(f"lane was built for n={lane.n}, not {n}")
    thr = mpf(threshold)
    rho = family.rho
    s = family.s
    probes: List[RootInfo] = []

    def probe(m: int) -> RootInfo:
        inf = lane.info(m)
        probes.append(inf)
        return inf

    def exhausted(best: RootInfo) -> SearchExhausted:
        return SearchExhausted(
            f"derivative {best.dphi:.9g} <= {threshold} at the cap {cap}",
            report=probes, best_m=best.m,
        )

    if cap is not None and cap <= n:
        raise SearchExhausted(
            f"cap {cap} leaves no candidate above the hull depth {n}",
            report=probes, best_m=None,
        )
    first = probe(n + 1)
    if first.dphi_mp > thr:
        return first, probes
    if cap is not None and n + 1 >= cap:
        raise exhausted(first)
    if cap is not None:
        at_cap = probe(cap)
        if not at_cap.dphi_mp > thr:
            raise exhausted(at_cap)

    # index scale from the level condition with e^(am) ignored; it decides
    # the regime and sizes the working precision
    dps0 = first.dps
    ps0 = lane._powersums(dps0)
    with mp.workdps(dps0):
        c0, u0 = lane._constants(dps0)
        want0 = thr / rho - c0 * ps0(1)
        scale = int(mp.ceil(want0 / u0)) if want0 > 0 else 0

    if scale <= 4 * (n + 1):
        info = _integer_boundary_search(lane, thr, n, cap, probe, probes)
    else:
        info = _branch_boundary_search(
            lane, thr, n, cap, probe, probes, scale, first)
    if info.dphi_mp <= thr:  # pragma: no cover - invariant guard
        raise NoConvergence("boundary walk returned a non-crossing index")
    return info, probes


def _integer_secant(thr, lo, hi, probe):
    """Close an integer bracket derivative(lo) <= thr < derivative(hi) to
    width 1; secant steps at working precision, midpoint on stalls."""
    stall = 0
    for _ in range(2000):
        width = hi.m - lo.m
        if width <= 1:
            return hi
        if stall >= 2:
            mid = lo.m + width // 2
            stall = 0
        else:
            with mp.workdps(max(lo.dps, hi.dps) + 10):
                frac = (thr - lo.dphi_mp) / (hi.dphi_mp - lo.dphi_mp)
                mid = lo.m + int(mp.floor(frac * width))
            mid = min(max(mid, lo.m + 1), hi.m - 1)
        inf = probe(mid)
        if inf.dphi_mp > thr:
            stall = stall + 1 if (hi.m - mid) * 4 > width else 0
            hi = inf
        else:
            stall = stall + 1 if (mid - lo.m) * 4 > width else 0
            lo = inf
    raise NoConvergence("integer secant failed to close the bracket")


def _integer_boundary_search(lane, thr, n, cap, probe, probes):
    """Doubling gallop plus working-precision secant, for boundaries within
    a small multiple of the hull depth where the branch system degenerates."""
    lo = probes[0]
    nxt = 2 * (n + 1)
    hi = None
    for _ in range(200):
        if cap is not None and nxt >= cap:
            hi = next((p for p in probes if p.m == cap), None) or probe(cap)
            break
        inf = probe(nxt)
        if inf.dphi_mp > thr:
            hi = inf
            break
        lo = inf
        nxt *= 2
    if hi is None:
        raise NoConvergence("doubling gallop failed to cross the level")
    return _integer_secant(thr, lo, hi, probe)


def _branch_boundary_search(lane, thr, n, cap, probe, probes, scale, first):
    """Continuous search in a = ln(rho z), then an integer finish."""
    f = lane.family
    rho, s = f.rho, f.s
    # the boundary exceeds the a = 0 scale by the e^(am) root factor, worth
    # a couple of digits; under-resolution only lengthens the integer finish
    dps = _dps_for(scale) + 64
    ps = lane._powersums(dps)

    def gain_at(a: mpf) -> Tuple[Optional[mpf], Optional[mpf]]:
        """Continuous-index derivative at the root a, and that index."""
        c, u = lane._constants(dps)
        E, D = lane._series_ed(a, ps)
        r = u - c * E
        if r <= 0:
            return None, None
        B = mp.log(r / c) - s * mp.log(a)
        t = _long_branch_t(B, s, dps)
        if t is None:
            return None, None
        m_real = t / a
        return rho * mp.exp(-a) * (c * D + m_real * r), m_real

    with mp.workdps(dps):
        c, u = lane._constants(dps)
        # start on the low-index side: at m ~ scale the root sits near the
        # lane's analytic upper start for that index
        a = (mp.log(u / c) + s * mp.log(scale)) / scale
        g, m_real = gain_at(a)
        # multiplicative jumps: the derivative scales like 1/a while t and
        # the missing mass move only logarithmically
        for _ in range(300):
            if g is not None and g > thr:
                break
            a = a / 2 if g is None else a * (g / thr) * mpf("0.98")
            g, m_real = gain_at(a)
        else:
            raise NoConvergence("continuous stage never exceeded the level")
        lo_a, lo_g = a, g  # below the level in index order means above in a
        hi_a = None
        for _ in range(300):
            nxt = lo_a * 2
            g2, _ = gain_at(nxt)
            if g2 is None or g2 <= thr:
                hi_a, hi_g = nxt, g2
                break
            lo_a, lo_g = nxt, g2
        else:
            raise NoConvergence("continuous stage found no upper endpoint")

        # secant on x = ln a for gain(a) = thr, midpoint fallback on stalls;
        # x needs resolving to ~1/m, i.e. digits(m) digits
        x_lo, x_hi = mp.log(lo_a), mp.log(hi_a)
        y_lo = lo_g - thr
        y_hi = (hi_g - thr) if hi_g is not None else None
        x_tol = mpf(10) ** (-(_digits10(scale) + 40))
        stall = 0
        for _ in range(20000):
            if x_hi - x_lo <= x_tol:
                break
            if y_hi is None or stall >= 2:
                x_mid = (x_lo + x_hi) / 2
                stall = 0
            else:
                x_mid = x_lo + (x_hi - x_lo) * y_lo / (y_lo - y_hi)
                x_mid = min(max(x_mid, x_lo + (x_hi - x_lo) / 64),
                            x_hi - (x_hi - x_lo) / 64)
            g_mid, m_mid = gain_at(mp.exp(x_mid))
            if g_mid is not None and g_mid > thr:
                stall = stall + 1 if (x_mid - x_lo) * 4 > x_hi - x_lo else 0
                x_lo, y_lo = x_mid, g_mid - thr
                m_real = m_mid
            else:
                stall = stall + 1 if (x_hi - x_mid) * 4 > x_hi - x_lo else 0
                x_hi = x_mid
                y_hi = None if g_mid is None else g_mid - thr
        else:
            raise NoConvergence("continuous secant failed to localize the index")
        m_guess = max(n + 1, int(mp.floor(m_real)))

    # integer finish with true root solves: bracket around the prediction by
    # geometric expansion (two probes when the prediction is exact), then
    # close; the final hi/lo pair is the minimality certificate
    if cap is not None:
        m_guess = min(m_guess, cap)
    inf = probe(m_guess)
    if inf.dphi_mp > thr:
        hi = inf
        step = 1
        while hi.m > n + 1:
            cand = max(n + 1, hi.m - step)
            inf = probe(cand)
            if inf.dphi_mp > thr:
                hi = inf
                step *= 4
            else:
                return _integer_secant(thr, inf, hi, probe)
        return hi
    lo = inf
    step = 1
    while True:
        cand = lo.m + step
        if cap is not None and cand >= cap:
            # cap was probed upfront and exceeded the level
            hi = next(p for p in probes if p.m == cap)
            return _integer_secant(thr, lo, hi, probe)
        inf = probe(cand)
        if inf.dphi_mp > thr:
            return _integer_secant(thr, lo, inf, probe)
        lo = inf
        step *= 4


# -- binary64 twin --------------------------------------------------------------

F64_MAX_N = 200_000
F64_MAX_M = 10 ** 15


def root_info_f64(family: ChainFamily, n: int, m: Optional[int] = None) -> RootInfo:
    """binary64 twin of ChainRootLane.info for small indices.

    Same centered equations evaluated with the chain_exp_sums kernel;
    valid while power sums fit comfortably in doubles (n <= 200000,
    m <= 1e15, exponents below overflow).  Used as a cross-check of the
    arbitrary-precision lane and as the benchmark workload.
    """
    if getattr(family, "variant", None) != "chain":
        raise ParameterOutOfRange("the closed-form lane covers the chain family")
    if n < 1 or n > F64_MAX_N:
        raise ParameterOutOfRange(f"hull depth {n} outside the binary64 window")
    if m is not None and (m <= n or m > F64_MAX_M):
        raise ParameterOutOfRange(f"long-cycle index {m} outside the binary64 window")
    s, rho = family.s, family.rho
    tail = zeta_tail_certified(s, n).value
    if family.c_exact is not None:
        alpha, arg = family.c_exact
        if arg == s:
            c = alpha / zeta_certified(s).value
            u = (1.0 - alpha) + alpha * tail / zeta_certified(s).value
        else:
            c = alpha / zeta_certified(arg).value
            u = 1.0 - c * (zeta_certified(s).value - tail)
    else:
        c = family.c
        u = 1.0 - c * (zeta_certified(s).value - tail)
    if u <= 0.0:
        raise ParameterOutOfRange("hull already reaches the unit value at the radius")
    C1 = float(K.chain_exp_sums(n, s, 0.0)[1])  # D(0) = sum i^(1-s)
    a_hull = u / (c * C1)
    if m is None:
        a = a_hull
        log_m = 0.0
    else:
        log_m = math.log(m)
        a = min((math.log(u / c) + s * log_m) / m, a_hull)
    for _ in range(200):
        E, D = K.chain_exp_sums(n, s, a)
        g = c * E - u
        dg = c * D
        if m is not None:
            w = c * math.exp(a * m - s * log_m)
            g += w
            dg += m * w
        step = g / dg
        a_next = a - step
        if a_next <= 0.0:
            a_next = a / 2.0
        if abs(step) <= 1e-15 * a_next:
            a = a_next
            break
        a = a_next
    else:
        raise NoConvergence(f"binary64 root iteration stalled (n={n}, m={m})")
    R = math.exp(a) / rho
    E, D = K.chain_exp_sums(n, s, a)
    if m is None:
        zphi = c * D
        lb = math.nan
        bound_ok = True
    else:
        mterm = c * math.exp(a * m - s * log_m)
        zphi = c * D + m * mterm
        lb = _a_of_chain(m) * (u - c * E) / R
        bound_ok = zphi / R >= lb
    return RootInfo(
        n=n, m=m, R=R, delta=math.expm1(a) / rho,
        log10_delta=math.log10(math.expm1(a) / rho),
        dphi=zphi / R, pi_base=1.0 / zphi,
        lower_bound=lb, bound_ok=bound_ok, a=a, dphi_mp=zphi / R, dps=0,
    )
