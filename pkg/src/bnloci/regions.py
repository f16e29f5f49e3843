"""Slope-plane nonemptiness regions.

Two piecewise-affine upper envelopes are tabulated per genus:

- the staircase top t_g, under which every rank point with integer
  invariants carries semistable bundles, and
- the sawtooth-with-spikes top f_g, under which some rank along the same
  ray works.

Both are exact piecewise functions over Q with explicit endpoint
closures; membership tests also report the stable-case exclusions, which
remove isolated points or segments from the semistable statement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from .bncore import beta_untwisted, serre_dual_point, slope_point
from .exactq import PiecewiseFn, Rational, RationalLike, Segment, as_rational, rat_ceil

EXCLUSION_T_GAP = "t-gap-family"
EXCLUSION_T_PETRI_LINE = "t-petri-line-family"
EXCLUSION_BMNO_ETA_HAT = "bmno-eta-hat"
EXCLUSION_BMNO_ETA_HAT_PLUS_ONE = "bmno-eta-hat-plus-one"
EXCLUSION_SERRE_DUAL = "serre-dual-of-excluded"


class StabilityKind(Enum):
    STABLE = "stable"
    SEMISTABLE = "semistable"


@dataclass(frozen=True)
class RegionVerdict:
    """Membership answer for one slope-plane point.

    excluded_for_stable implies inside: exclusions subtract isolated
    points from the stable statement, never from the semistable one.
    """

    inside: bool
    on_boundary: bool = False
    excluded_for_stable: bool = False
    exclusion_reason: Optional[str] = None


def eta_hat_prime(g: int, s: int) -> int:
    """Least degree from which a pencil-type count stays positive.

    Equals min{d : beta(1, d+1, s) >= 1} = s + g - 2 - floor((g-1)/s).
    """
    if g < 2:
        raise ValueError(f"genus must be >= 2, got {g}")
    if s < 1:
        raise ValueError(f"section count must be >= 1, got {s}")
    return s + g - 2 - (g - 1) // s


def eta_hat(g: int, s: int) -> int:
    """Least degree with nonnegative classical count.

    Equals min{d : beta(1, d, s) >= 0} = s + g - 1 - floor(g/s).
    """
    if g < 2:
        raise ValueError(f"genus must be >= 2, got {g}")
    if s < 1:
        raise ValueError(f"section count must be >= 1, got {s}")
    return s + g - 1 - g // s


@lru_cache(maxsize=None)
def tg_piecewise(g: int) -> PiecewiseFn:
    """The staircase top on [0, 2g-2].

    Zero at the origin; on each band (eta'(s), eta'(s+1)] an affine ramp
    of slope one up to the next integer, then flat at level s.  The band
    index runs s = 1..g-1, ending at eta'(g) = 2g-2 with value g-1.
    """
    if g < 2:
        raise ValueError(f"genus must be >= 2, got {g}")
    segs = [Segment(Fraction(0), Fraction(0), True, True, Fraction(0), Fraction(0))]
    for s in range(1, g):
        a = eta_hat_prime(g, s)
        b = eta_hat_prime(g, s + 1)
        segs.append(Segment(Fraction(a), Fraction(a + 1), False, True,
                            Fraction(1), Fraction(s - a - 1)))
        if a + 1 < b:
            segs.append(Segment(Fraction(a + 1), Fraction(b), False, True,
                                Fraction(0), Fraction(s)))
    return PiecewiseFn(segs)


def _fg_base_segments(g: int) -> list[Segment]:
    # base tabulation on [0, g-1]; spikes sit at eta(s) for s*s <= g
    top = g - 1
    segs: list[Segment] = []
    s_max = math.isqrt(g)
    for s in range(1, s_max + 1):
        e = eta_hat(g, s)
        e_next = eta_hat(g, s + 1)
        segs.append(Segment(Fraction(e), Fraction(e), True, True, Fraction(0), Fraction(s)))
        if e >= top:
            break
        # ramp through (e+1, s) with the shallow slope s/g
        hi1 = min(e + 1, top)
        segs.append(Segment(Fraction(e), Fraction(hi1), False, True,
                            Fraction(s, g), Fraction(s) - Fraction(s, g) * (e + 1)))
        # unit sawtooth pieces, same slope, restarting at each integer
        for m in range(e + 1, min(e_next - 1, top) - 1 + 1):
            segs.append(Segment(Fraction(m), Fraction(m + 1), False, True,
                                Fraction(s, g), Fraction(s) - Fraction(s, g) * m))
        # steeper connector rising toward the next spike, open at both ends
        if e_next <= top:
            slope = Fraction(e_next - s, g)
            segs.append(Segment(Fraction(e_next - 1), Fraction(e_next), False, False,
                                slope, Fraction(s) - slope * (e_next - 1)))
    return segs


@lru_cache(maxsize=None)
def fg_piecewise(g: int) -> PiecewiseFn:
    """The sawtooth-with-spikes top on [0, 2g-2].

    Built on [0, g-1] from the band construction, then extended to
    (g-1, 2g-2] by the reflection f(mu) = f(2g-2-mu) + mu - (g-1).
    """
    if g < 2:
        raise ValueError(f"genus must be >= 2, got {g}")
    base = _fg_base_segments(g)
    two = Fraction(2 * (g - 1))
    mirrored: list[Segment] = []
    for seg in base:
        lo, hi = two - seg.hi, two - seg.lo
        if lo == hi == Fraction(g - 1):
            continue
        lo_closed, hi_closed = seg.hi_closed, seg.lo_closed
        if lo == Fraction(g - 1):
            lo_closed = False
        slope = 1 - seg.slope
        intercept = seg.slope * two + seg.intercept - (g - 1)
        mirrored.append(Segment(lo, hi, lo_closed, hi_closed, slope, intercept))
    return PiecewiseFn(base + mirrored)


def tg_eval(g: int, mu: RationalLike) -> Fraction:
    return tg_piecewise(g)(as_rational(mu))


def fg_eval(g: int, mu: RationalLike) -> Fraction:
    return fg_piecewise(g)(as_rational(mu))


def _in_window(g: int, mu: Fraction, lam: Fraction) -> bool:
    return 0 <= mu <= 2 * (g - 1) and lam > 0


def membership_T(g: int, mu: RationalLike, lam: RationalLike,
                 kind: StabilityKind) -> RegionVerdict:
    """Membership in the staircase region, with stable-case exclusions.

    Inside means 0 <= mu <= 2g-2 and 0 < lam <= t_g(mu).  For the stable
    locus, points on the integer column mu = eta'(s)+1 with s-1 < lam <= s
    are excluded when the band has no flat part there, or when the
    rank-one count on the line through the column is nonpositive.  The
    two conditions are recorded separately; the union is applied because
    they are stated as restatements but are not literally identical.
    """
    mu, lam = as_rational(mu), as_rational(lam)
    if not _in_window(g, mu, lam):
        return RegionVerdict(inside=False)
    top = tg_eval(g, mu)
    if lam > top:
        return RegionVerdict(inside=False)
    verdict = RegionVerdict(inside=True, on_boundary=(lam == top))
    if kind is not StabilityKind.STABLE:
        return verdict
    s = rat_ceil(lam)
    if mu.denominator != 1 or mu != eta_hat_prime(g, s) + 1:
        return verdict
    reason: Optional[str] = None
    if eta_hat_prime(g, s) + 1 != eta_hat_prime(g, s + 1):
        reason = EXCLUSION_T_GAP
    elif beta_untwisted(g, 1, int(mu) + 1, s + 1) <= 0:
        reason = EXCLUSION_T_PETRI_LINE
    if reason is None:
        return verdict
    return RegionVerdict(inside=True, on_boundary=verdict.on_boundary,
                         excluded_for_stable=True, exclusion_reason=reason)


def _spike_index(g: int, mu: Fraction) -> Optional[int]:
    # unique s with eta(s) == mu <= g-1, if any; eta is strictly increasing
    if mu.denominator != 1 or mu < 0 or mu > g - 1:
        return None
    m = int(mu)
    for s in range(1, math.isqrt(g) + 1):
        if eta_hat(g, s) == m:
            return s
    return None


def _bmno_spike_excluded(g: int, mu: Fraction, lam: Fraction) -> bool:
    s = _spike_index(g, mu)
    if s is None:
        return False
    return lam > Fraction(s - 1, g) + (s - 1)


def membership_BMNO(g: int, mu: RationalLike, lam: RationalLike,
                    kind: StabilityKind) -> RegionVerdict:
    """Membership in the sawtooth region, with stable-case exclusions.

    Inside means 0 <= mu <= 2g-2 and 0 < lam <= f_g(mu).  For the stable
    locus three families are removed: the top of each spike column above
    the incoming ramp level, the Serre duals of those, and the isolated
    integer points one step past each spike at integer height.
    """
    mu, lam = as_rational(mu), as_rational(lam)
    if not _in_window(g, mu, lam):
        return RegionVerdict(inside=False)
    top = fg_eval(g, mu)
    if lam > top:
        return RegionVerdict(inside=False)
    verdict = RegionVerdict(inside=True, on_boundary=(lam == top))
    if kind is not StabilityKind.STABLE:
        return verdict
    reason: Optional[str] = None
    if _bmno_spike_excluded(g, mu, lam):
        reason = EXCLUSION_BMNO_ETA_HAT
    else:
        dual = serre_dual_point(g, slope_point(mu, lam))
        if _bmno_spike_excluded(g, dual.mu, dual.lam):
            reason = EXCLUSION_SERRE_DUAL
        elif lam.denominator == 1 and lam >= 1 and mu == eta_hat(g, int(lam)) + 1:
            reason = EXCLUSION_BMNO_ETA_HAT_PLUS_ONE
    if reason is None:
        return verdict
    return RegionVerdict(inside=True, on_boundary=verdict.on_boundary,
                         excluded_for_stable=True, exclusion_reason=reason)


RegionPoint = tuple[Union[Fraction, float], Union[Fraction, float]]


def _piecewise_polyline(fn: PiecewiseFn, samples_per_unit: int) -> list[RegionPoint]:
    pts: list[RegionPoint] = []

    def push(x: Fraction, y: Fraction) -> None:
        if not pts or pts[-1] != (x, y):
            pts.append((x, y))

    step = Fraction(1, samples_per_unit)
    for seg in fn.segments:
        push(seg.lo, seg.value(seg.lo))
        x = seg.lo + step
        while x < seg.hi:
            push(x, seg.value(x))
            x += step
        if seg.hi > seg.lo:
            push(seg.hi, seg.value(seg.hi))
    return pts


def region_polyline(g: int, region: str, samples_per_unit: int) -> list[RegionPoint]:
    """Vertices for plotting one of the named region tops or reference curves.

    T and BMNO yield exact rational vertices covering every breakpoint;
    Clifford yields its two endpoints; BNCurve yields decimal samples of
    the positive branch of lam*(lam - mu + g - 1) = g - 1, accurate to
    1e-9 and used for plotting only.
    """
    if samples_per_unit < 1:
        raise ValueError("samples_per_unit must be >= 1")
    if region == "T":
        return _piecewise_polyline(tg_piecewise(g), samples_per_unit)
    if region == "BMNO":
        return _piecewise_polyline(fg_piecewise(g), samples_per_unit)
    if region == "Clifford":
        return [(Fraction(0), Fraction(1)), (Fraction(2 * (g - 1)), Fraction(g))]
    if region == "BNCurve":
        pts: list[RegionPoint] = []
        n = 2 * (g - 1) * samples_per_unit
        for i in range(n + 1):
            mu = i / samples_per_unit
            lam = (mu - (g - 1) + math.sqrt((g - 1 - mu) ** 2 + 4 * (g - 1))) / 2
            pts.append((mu, lam))
        return pts
    raise ValueError(f"unknown region {region!r}")
