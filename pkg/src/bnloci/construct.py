"""Witness constructions and the product boundary curve.

Products of small-slope bundles, kernels of evaluation-style surjections,
and the induced boundary curve in the (slope, section density) plane.
Everything is exact: boundaries are piecewise-rational, suprema over open
windows are computed symbolically with attainment tracked separately.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from math import isqrt, lcm
from typing import Optional

from .bncore import (
    BNProblem,
    beta_tensor,
    beta_universal,
    tensor_problem,
)
from .exactq import (
    DomainError,
    PiecewiseFn,
    Quadratic,
    Rational,
    RationalLike,
    as_rational,
    pw_max,
    quad_max_on_interval,
    rat_ceil,
)
from .regions import StabilityKind, fg_piecewise, fg_eval, tg_piecewise, tg_eval
from . import oracle
from .oracle import CurveClass, Decision, Scope, Status


class ConstructError(ValueError):
    """A construction precondition failed; the message names the premise."""


# ---------------------------------------------------------------------------
# products


@dataclass(frozen=True)
class ProductWitness:
    g: int
    factor1: BNProblem
    factor2: BNProblem
    k: int
    window: str
    kind: StabilityKind
    cc: CurveClass
    factor1_decision: Decision
    factor2_decision: Decision
    tensor: BNProblem
    beta_universal: int
    beta_tensor: int


def product_construct(g: int, p1: BNProblem, p2: BNProblem,
                      cc: CurveClass = CurveClass.ANY_SMOOTH,
                      kind: StabilityKind = StabilityKind.STABLE) -> ProductWitness:
    """Certify the pair locus at k = k1*k2 from two nonempty factors.

    The first factor must sit at slope below 2 (at most 2 in the relaxed
    window, which needs a non-hyperelliptic curve) and the second at
    slope at most 2g (strictly below 2g in the relaxed window).
    """
    if p1.g != g or p2.g != g:
        raise ConstructError("factor problems must live on the same genus-g curve")
    if p1.n < 2 or p2.n < 2:
        raise ConstructError("factor ranks must both be at least 2")
    if p1.d < 1 or p2.d < 1 or p1.k < 1 or p2.k < 1:
        raise ConstructError("factor degrees and section counts must be positive")
    standard = p1.d < 2 * p1.n and p2.d <= 2 * g * p2.n
    relaxed = (p1.d <= 2 * p1.n and p2.d < 2 * g * p2.n
               and oracle.implies_nonhyperelliptic(cc, g))
    if standard:
        window = "standard"
    elif relaxed:
        window = "relaxed"
    elif p1.d > 2 * p1.n:
        raise ConstructError("first factor slope exceeds 2")
    elif p1.d == 2 * p1.n:
        raise ConstructError("first factor slope exactly 2 needs a "
                             "non-hyperelliptic curve with d2 < 2g*n2")
    else:
        raise ConstructError("second factor degree exceeds 2g*n2")
    dec1 = oracle.decide_untwisted(p1, cc, kind)
    if dec1.status is not Status.NONEMPTY or dec1.scope is not Scope.THIS_RANK:
        raise ConstructError("first factor locus is not certified nonempty at its rank")
    dec2 = oracle.decide_untwisted(p2, cc, kind)
    if dec2.status is not Status.NONEMPTY or dec2.scope is not Scope.THIS_RANK:
        raise ConstructError("second factor locus is not certified nonempty at its rank")
    k = p1.k * p2.k
    return ProductWitness(
        g=g, factor1=p1, factor2=p2, k=k, window=window, kind=kind, cc=cc,
        factor1_decision=dec1, factor2_decision=dec2,
        tensor=tensor_problem(g, p1.n, p1.d, p2.n, p2.d, k),
        beta_universal=beta_universal(g, p1.n, p1.d, p2.n, p2.d, k),
        beta_tensor=beta_tensor(g, p1.n, p1.d, p2.n, p2.d, k))


@dataclass(frozen=True)
class NegativityWitness:
    g: int
    mu1: Rational
    lam1: Rational
    mu2: Rational
    lam2: Rational
    n1: int
    n2: int
    d1: int
    d2: int
    k1: int
    k2: int
    k: int
    beta_universal: int
    bound: int


def product_negativity_search(g: int, mu1: RationalLike, lam1: RationalLike,
                              mu2: RationalLike, lam2: RationalLike) -> NegativityWitness:
    """Find ranks realizing two slope points whose pair count goes negative.

    Requires mu1 + mu2 < lam1*lam2 + g - 1; the expected count then fails
    quartically in the rank scale while the trivial bound grows only
    quadratically, so the scan terminates.
    """
    if g < 2:
        raise ConstructError(f"genus must be at least 2, got {g}")
    mu1, lam1 = as_rational(mu1), as_rational(lam1)
    mu2, lam2 = as_rational(mu2), as_rational(lam2)
    if lam1 <= 0 or lam2 <= 0:
        raise ConstructError("section densities must be positive")
    c = lam1 * lam2 * (lam1 * lam2 - (mu1 + mu2) + (g - 1))
    if mu1 + mu2 >= lam1 * lam2 + g - 1:
        raise ConstructError("negativity criterion fails: "
                             "mu1 + mu2 >= lam1*lam2 + g - 1")
    bound = 1
    while bound * bound < Fraction(2 * g) / c:
        bound += 1
    den1 = lcm(mu1.denominator, lam1.denominator)
    den2 = lcm(mu2.denominator, lam2.denominator)
    dmax = max(den1, den2)
    target = Fraction(2 * dmax * dmax * (g - 1) + 2) / c
    m_guar = 1
    while m_guar * m_guar < target:
        m_guar += 1
    cap = max(2, m_guar * dmax) + 1
    for top in range(2, cap + 1):
        opts1 = [n for n in range(den1, top + 1, den1) if n >= 2]
        opts2 = [n for n in range(den2, top + 1, den2) if n >= 2]
        for n1 in opts1:
            for n2 in opts2:
                if max(n1, n2) != top:
                    continue
                d1, d2 = int(mu1 * n1), int(mu2 * n2)
                k1, k2 = int(lam1 * n1), int(lam2 * n2)
                k = k1 * k2
                beta = beta_universal(g, n1, d1, n2, d2, k)
                if beta < 0:
                    return NegativityWitness(
                        g=g, mu1=mu1, lam1=lam1, mu2=mu2, lam2=lam2,
                        n1=n1, n2=n2, d1=d1, d2=d2, k1=k1, k2=k2, k=k,
                        beta_universal=beta, bound=bound)
    raise RuntimeError("negativity scan exhausted its provable cap")


# ---------------------------------------------------------------------------
# the product boundary curve


@lru_cache(maxsize=None)
def _upper_envelope(g: int) -> PiecewiseFn:
    # pointwise max of the staircase and sawtooth boundaries
    return pw_max(fg_piecewise(g), tg_piecewise(g))


@dataclass(frozen=True)
class _DirectBest:
    value: Rational
    attained: bool
    t: Rational
    lam1: Rational
    lam2: Rational


def _affine_on(fn: PiecewiseFn, lo: Rational, hi: Rational) -> tuple[Rational, Rational]:
    seg = fn.segment_at((lo + hi) / 2)
    return seg.slope, seg.intercept


def _bpn_direct(g: int, mu: Rational) -> Optional[_DirectBest]:
    """Exact sup of F(t)*F(mu - t) over the open window t in (0, min(2, mu)).

    Interval pieces are maximized as exact quadratics; a maximum sitting
    on an open edge is recorded as a limit (attained=False).  Breakpoints
    interior to the window contribute their true values, which is how
    isolated spikes of F enter.
    """
    w_hi = min(Fraction(2), mu)
    if w_hi <= 0:
        return None
    env = _upper_envelope(g)
    pts = {Fraction(0), w_hi}
    for b in env.breakpoints():
        if 0 < b < w_hi:
            pts.add(b)
        rb = mu - b
        if 0 < rb < w_hi:
            pts.add(rb)
    grid = sorted(pts)
    best: Optional[_DirectBest] = None

    def consider(cand: _DirectBest) -> None:
        nonlocal best
        if best is None or (cand.value, cand.attained, -cand.t) > (
                best.value, best.attained, -best.t):
            best = cand

    for x in grid[1:-1]:
        v1, v2 = env(x), env(mu - x)
        consider(_DirectBest(v1 * v2, True, x, v1, v2))
    for lo, hi in zip(grid, grid[1:]):
        s1, i1 = _affine_on(env, lo, hi)
        s2, i2 = _affine_on(env, mu - hi, mu - lo)
        quad = Quadratic.from_affine_product(s1, i1, -s2, s2 * mu + i2)
        t_hat, val = quad_max_on_interval(quad, lo, hi)
        consider(_DirectBest(val, lo < t_hat < hi, t_hat,
                             s1 * t_hat + i1, -s2 * t_hat + s2 * mu + i2))
    return best


@dataclass(frozen=True)
class BPNQuery:
    g: int
    mu: Rational
    lam: Optional[Rational]
    boundary: Rational
    attained: bool
    decomposition: tuple[Rational, Rational, Rational, Rational]
    branch: str
    member: Optional[bool] = None


def bpn_boundary(g: int, mu: RationalLike) -> BPNQuery:
    """Boundary value of the product region at slope mu.

    Takes the better of the direct decomposition branch and the Serre
    reflection of the opposite slope; ties go to the direct branch.  The
    decomposition records (mu1, mu2, lam1, lam2) on the branch's own
    side, so for the reflected branch it describes the dual slope.
    """
    if g < 2:
        raise DomainError(f"genus must be at least 2, got {g}")
    mu = as_rational(mu)
    if not 0 <= mu <= 2 * g - 2:
        raise DomainError(f"slope {mu} outside [0, {2 * g - 2}]")
    direct = _bpn_direct(g, mu) if mu > 0 else None
    mirror = _bpn_direct(g, 2 * g - 2 - mu) if mu < 2 * g - 2 else None
    choices = []
    if direct is not None:
        choices.append(BPNQuery(
            g=g, mu=mu, lam=None, boundary=direct.value, attained=direct.attained,
            decomposition=(direct.t, mu - direct.t, direct.lam1, direct.lam2),
            branch="direct"))
    if mirror is not None:
        dual_mu = 2 * g - 2 - mu
        choices.append(BPNQuery(
            g=g, mu=mu, lam=None, boundary=mirror.value + mu - (g - 1),
            attained=mirror.attained,
            decomposition=(mirror.t, dual_mu - mirror.t, mirror.lam1, mirror.lam2),
            branch="serre-dual"))
    best = choices[0]
    for cand in choices[1:]:
        if cand.boundary > best.boundary:
            best = cand
    return best


def bpn_membership(g: int, mu: RationalLike, lam: RationalLike) -> BPNQuery:
    """Closed membership test against the product boundary.

    The region convention is closed (lam equal to the boundary counts as
    inside); whether the boundary value itself arises from an attained
    decomposition is reported separately by the attained flag.
    """
    lam = as_rational(lam)
    query = bpn_boundary(g, mu)
    return replace(query, lam=lam, member=0 < lam <= query.boundary)


@dataclass(frozen=True)
class NewPointWitness:
    g: int
    mu: Rational
    boundary: Rational
    t_value: Rational
    f_value: Rational
    margin_t: Rational
    margin_f: Rational
    attained: bool
    decomposition: tuple[Rational, Rational, Rational, Rational]
    branch: str


def bpn_new_points(g: int, step: RationalLike = Fraction(1, 8)) -> list[NewPointWitness]:
    """Grid slopes where the product boundary beats both known regions.

    Scans mu = i*step over (0, 2g-2] and returns a witness with exact
    margins wherever the product boundary strictly exceeds the staircase
    and the sawtooth values.  Below genus 5 the product boundary never
    does, so small genera are rejected.
    """
    if g < 5:
        raise ValueError(f"the product region only exceeds the known ones "
                         f"from genus 5 on; got g={g}")
    step = as_rational(step)
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    out = []
    i = 1
    while i * step <= 2 * g - 2:
        mu = i * step
        query = bpn_boundary(g, mu)
        tv, fv = tg_eval(g, mu), fg_eval(g, mu)
        if query.boundary > tv and query.boundary > fv:
            out.append(NewPointWitness(
                g=g, mu=mu, boundary=query.boundary, t_value=tv, f_value=fv,
                margin_t=query.boundary - tv, margin_f=query.boundary - fv,
                attained=query.attained, decomposition=query.decomposition,
                branch=query.branch))
        i += 1
    return out


# ---------------------------------------------------------------------------
# kernel constructions


def kernel_k_max(g: int, n1: int, d1: int, k1: int, n: int, d: int) -> int:
    """Largest section demand the kernel construction can certify."""
    if n < 1:
        raise ConstructError(f"generator rank must be positive, got {n}")
    if d <= n * (g - 1):
        raise ConstructError(f"twist degree {d} must exceed n*(g-1) = {n * (g - 1)}")
    return (d - n * (g - 1)) * (k1 - n1) - n * d1


@dataclass(frozen=True)
class KernelWitness:
    g: int
    n1: int
    d1: int
    k1: int
    n: int
    d: int
    k: int
    n2: int
    d2: int
    k_max: int
    kind: StabilityKind
    cc: CurveClass
    base_decision: Decision
    beta_universal: int


def _kernel_window_check(g: int, n: int, d: int, cc: CurveClass,
                         kind: StabilityKind) -> None:
    if kind is StabilityKind.STABLE:
        if d > 2 * n * g:
            return
        if d == 2 * n * g and oracle.implies_nonhyperelliptic(cc, g):
            return
        raise ConstructError(f"twist degree {d} must exceed 2ng = {2 * n * g} "
                             "(equality needs a non-hyperelliptic curve)")
    if d < 2 * n * g:
        raise ConstructError(f"twist degree {d} must be at least 2ng = {2 * n * g}")


def kernel_construct(g: int, n1: int, d1: int, k1: int, n: int, d: int, k: int,
                     cc: CurveClass = CurveClass.ANY_SMOOTH,
                     kind: StabilityKind = StabilityKind.STABLE) -> KernelWitness:
    """Certify the pair locus via a kernel of a twisted evaluation map.

    The second member of the pair is forced to (n2, d2) = (d - ng, -d);
    the base locus must be certified nonempty at its rank and the demand
    k must fit under the kernel budget.
    """
    if n1 < 2:
        raise ConstructError(f"base rank must be at least 2, got {n1}")
    if k1 <= n1:
        raise ConstructError(f"base section count {k1} must exceed the base rank {n1}")
    if n < 1:
        raise ConstructError(f"generator rank must be positive, got {n}")
    _kernel_window_check(g, n, d, cc, kind)
    base = oracle.decide_untwisted(BNProblem(g, n1, d1, k1), cc, kind)
    if base.status is not Status.NONEMPTY or base.scope is not Scope.THIS_RANK:
        raise ConstructError("base locus is not certified nonempty at its rank")
    budget = kernel_k_max(g, n1, d1, k1, n, d)
    if k <= 0:
        raise ConstructError(f"section count must be positive, got {k}")
    if k > budget:
        raise ConstructError(f"section count {k} exceeds the kernel budget "
                             f"k_max = {budget}")
    n2, d2 = d - n * g, -d
    return KernelWitness(
        g=g, n1=n1, d1=d1, k1=k1, n=n, d=d, k=k, n2=n2, d2=d2, k_max=budget,
        kind=kind, cc=cc, base_decision=base,
        beta_universal=beta_universal(g, n1, d1, n2, d2, k))


def kernel_beta_quadratic(g: int, n1: int, d1: int, k1: int, n: int,
                          e: Optional[int] = None) -> Quadratic:
    """Expected pair count along the kernel family, as a quadratic in d.

    The family fixes the base (n1, d1, k1) and generator rank n, letting
    the twist degree d vary; the demanded section count is k(d) = w*d - e
    with w = k1 - n1, defaulting to the full budget e = n*(w*(g-1) + d1).
    """
    if n1 < 2:
        raise ConstructError(f"base rank must be at least 2, got {n1}")
    if k1 <= n1:
        raise ConstructError(f"base section count {k1} must exceed the base rank {n1}")
    if n < 1:
        raise ConstructError(f"generator rank must be positive, got {n}")
    w = k1 - n1
    if e is None:
        e = n * (w * (g - 1) + d1)
    c1 = d1 - n1 * g
    c0 = n * g * (n1 * (g - 1) - d1)
    a = (g - 1) - w * (w - c1)
    b = -2 * n * g * (g - 1) + w * (e + c0) + e * (w - c1)
    c = n1 * n1 * (g - 1) + 2 + n * n * g * g * (g - 1) - e * (e + c0)
    return Quadratic(a, b, c)


@dataclass(frozen=True)
class KernelNegativityWitness:
    g: int
    n1: int
    d1: int
    k1: int
    n: int
    e: int
    quadratic: Quadratic
    d_min: int
    beta: int
    k: int
    scan_start: int
    scan_stop: int


def kernel_negativity_min_d(g: int, n1: int, d1: int, k1: int, n: int, e: int,
                            cc: CurveClass = CurveClass.ANY_SMOOTH) -> KernelNegativityWitness:
    """First admissible twist degree where the kernel family count is negative.

    Requires the section family to fit under the budget for every degree
    (e large enough) and the quadratic's leading coefficient to be
    negative, which pins down the base degree window.
    """
    w = k1 - n1
    quad = kernel_beta_quadratic(g, n1, d1, k1, n, e)
    e_min = n * (w * (g - 1) + d1)
    if e < e_min:
        raise ConstructError(f"family parameter e = {e} must be at least "
                             f"n*(w*(g-1) + d1) = {e_min}")
    lead_cap = k1 + n1 * (g - 1) - Fraction(g - 1, w)
    if d1 >= lead_cap:
        raise ConstructError(f"leading coefficient is nonnegative: need "
                             f"d1 < k1 + n1*(g-1) - (g-1)/(k1-n1) = {lead_cap}")
    window_start = 2 * n * g + (0 if oracle.implies_nonhyperelliptic(cc, g) else 1)
    start = max(window_start, e // w + 1)
    stop = rat_ceil(Fraction(abs(quad.b) + abs(quad.c), abs(quad.a))) + 1
    for d in range(start, max(start, stop) + 1):
        val = quad(d)
        if val < 0:
            return KernelNegativityWitness(
                g=g, n1=n1, d1=d1, k1=k1, n=n, e=e, quadratic=quad,
                d_min=d, beta=int(val), k=w * d - e,
                scan_start=start, scan_stop=stop)
    raise RuntimeError("negativity scan passed the root bound without a hit")


# ---------------------------------------------------------------------------
# admissible-degree enumeration


def c6_enumerate(g: int, n1: int, k1: int) -> list[int]:
    """Base degrees admissible for the negative-count kernel family.

    The window combines the budget constraint from below and the leading
    coefficient constraint from above; degrees divisible by n1 are
    excluded.  In genus 2 the window is always empty, so it is rejected.
    """
    if g == 2:
        raise ConstructError("no admissible base degrees exist in genus 2")
    if g < 2:
        raise ConstructError(f"genus must be at least 2, got {g}")
    if n1 < 2:
        raise ConstructError(f"base rank must be at least 2, got {n1}")
    if not n1 < k1 <= n1 * (g - 1):
        raise ConstructError(f"need n1 < k1 <= n1*(g-1), got k1 = {k1}")
    s = rat_ceil(Fraction(k1, n1))
    lo = k1 + n1 * (g - 1) - n1 * ((g - 1) // s)
    hi = k1 + n1 * (g - 1) - Fraction(g - 1, k1 - n1)
    return [d1 for d1 in range(lo, rat_ceil(hi)) if d1 % n1 != 0]
