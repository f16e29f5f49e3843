"""Exact rational arithmetic kernels.

Everything downstream (Brill-Noether numbers, region tables, boundary
maximisation) is computed over Q.  This module supplies the few exact
primitives the rest of the package needs: floor/ceil on rationals,
quadratics with exact maximisation on closed intervals, and
piecewise-affine functions with explicit endpoint closures.

No floating point is used anywhere in this module.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]


class DomainError(ValueError):
    """Evaluation outside the declared domain of a piecewise function."""


def as_rational(x: RationalLike) -> Fraction:
    """Coerce ints, 'p/q' strings and Fractions to Fraction."""
    return x if isinstance(x, Fraction) else Fraction(x)


def rat_floor(x: RationalLike) -> int:
    return math.floor(as_rational(x))


def rat_ceil(x: RationalLike) -> int:
    return math.ceil(as_rational(x))


@dataclass(frozen=True)
class Quadratic:
    """a*t**2 + b*t + c with exact rational coefficients."""

    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self) -> None:
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))

    def __call__(self, t: RationalLike) -> Fraction:
        t = as_rational(t)
        return (self.a * t + self.b) * t + self.c

    @staticmethod
    def from_affine_product(a1: Fraction, b1: Fraction, a2: Fraction, b2: Fraction) -> "Quadratic":
        """The quadratic (a1*t + b1)*(a2*t + b2)."""
        return Quadratic(a1 * a2, a1 * b2 + a2 * b1, b1 * b2)


def quad_max_on_interval(q: Quadratic, lo: RationalLike, hi: RationalLike) -> tuple[Fraction, Fraction]:
    """Exact maximiser of q on the closed interval [lo, hi].

    Returns (argmax, max).  For concave q with interior vertex the vertex
    wins; otherwise the better endpoint does.  Ties are broken toward the
    smaller argument, so the result is deterministic.
    """
    lo, hi = as_rational(lo), as_rational(hi)
    if lo > hi:
        raise ValueError(f"empty interval: lo={lo} > hi={hi}")
    candidates = [lo, hi]
    if q.a < 0:
        vertex = -q.b / (2 * q.a)
        if lo < vertex < hi:
            candidates.append(vertex)
    best_t = None
    best_v = None
    for t in candidates:
        v = q(t)
        if best_v is None or v > best_v or (v == best_v and t < best_t):
            best_t, best_v = t, v
    return best_t, best_v


@dataclass(frozen=True)
class Segment:
    """One affine piece: slope*x + intercept on an interval with explicit closures.

    A degenerate point segment (lo == hi) must be closed on both sides.
    """

    lo: Fraction
    hi: Fraction
    lo_closed: bool
    hi_closed: bool
    slope: Fraction
    intercept: Fraction

    def __post_init__(self) -> None:
        for name in ("lo", "hi", "slope", "intercept"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        if self.lo > self.hi:
            raise ValueError(f"segment with lo={self.lo} > hi={self.hi}")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ValueError("point segment must be closed on both sides")

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: Fraction) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def value(self, x: RationalLike) -> Fraction:
        return self.slope * as_rational(x) + self.intercept


# atoms: canonical decomposition of a piecewise function into isolated
# points and open intervals; consumers that maximise over segments use it.
@dataclass(frozen=True)
class PointAtom:
    x: Fraction
    value: Fraction


@dataclass(frozen=True)
class IntervalAtom:
    lo: Fraction
    hi: Fraction
    slope: Fraction
    intercept: Fraction

    def value(self, x: Fraction) -> Fraction:
        return self.slope * x + self.intercept


class PiecewiseFn:
    """Piecewise-affine function over an interval of Q.

    Segments must be sorted, pairwise disjoint, and tile the domain with
    no gaps: consecutive segments touch at a shared endpoint carried by
    exactly one of them.  Evaluation therefore selects exactly one
    segment; anything outside the domain raises DomainError.  These
    checks run at construction time, so a malformed table (overlap, gap,
    double-closed junction) cannot be built at all.
    """

    __slots__ = ("segments", "_his")

    def __init__(self, segments: Sequence[Segment]):
        segs = sorted(segments, key=lambda s: (s.lo, s.hi))
        if not segs:
            raise ValueError("piecewise function needs at least one segment")
        for prev, cur in zip(segs, segs[1:]):
            if prev.hi > cur.lo:
                raise ValueError(f"overlapping segments at [{cur.lo}, {prev.hi}]")
            if prev.hi < cur.lo:
                raise ValueError(f"gap between {prev.hi} and {cur.lo}")
            if prev.hi_closed and cur.lo_closed:
                raise ValueError(f"point {cur.lo} carried by two segments")
            if not prev.hi_closed and not cur.lo_closed:
                raise ValueError(f"point {cur.lo} carried by no segment")
        self.segments: tuple[Segment, ...] = tuple(segs)
        self._his = [s.hi for s in segs]

    @property
    def domain_lo(self) -> Fraction:
        return self.segments[0].lo

    @property
    def domain_hi(self) -> Fraction:
        return self.segments[-1].hi

    def segment_at(self, x: RationalLike) -> Segment:
        x = as_rational(x)
        idx = bisect_left(self._his, x)
        for j in (idx, idx + 1):
            if j < len(self.segments) and self.segments[j].contains(x):
                return self.segments[j]
        raise DomainError(f"{x} outside domain [{self.domain_lo}, {self.domain_hi}]")

    def __call__(self, x: RationalLike) -> Fraction:
        return self.segment_at(x).value(x)

    def breakpoints(self) -> list[Fraction]:
        pts: list[Fraction] = []
        for s in self.segments:
            for x in (s.lo, s.hi):
                if not pts or pts[-1] != x:
                    pts.append(x)
        return pts

    def atoms(self) -> Iterator[Union[PointAtom, IntervalAtom]]:
        """Yield the point/open-interval decomposition, left to right."""
        for s in self.segments:
            if s.is_point:
                yield PointAtom(s.lo, s.value(s.lo))
                continue
            if s.lo_closed:
                yield PointAtom(s.lo, s.value(s.lo))
            yield IntervalAtom(s.lo, s.hi, s.slope, s.intercept)
            if s.hi_closed:
                yield PointAtom(s.hi, s.value(s.hi))


def _atoms_to_segments(atoms: Sequence[Union[PointAtom, IntervalAtom]]) -> list[Segment]:
    segs: list[Segment] = []
    for a in atoms:
        if isinstance(a, PointAtom):
            segs.append(Segment(a.x, a.x, True, True, Fraction(0), a.value))
        else:
            segs.append(Segment(a.lo, a.hi, False, False, a.slope, a.intercept))
    return segs


def pw_max(f: PiecewiseFn, g: PiecewiseFn) -> PiecewiseFn:
    """Pointwise maximum of two piecewise functions on the same domain.

    Crossing points inside a shared open interval are solved exactly and
    become breakpoints of the result; no epsilon merging is performed.
    """
    if (f.domain_lo, f.domain_hi) != (g.domain_lo, g.domain_hi):
        raise ValueError("pw_max requires identical domains")
    cuts = sorted(set(f.breakpoints()) | set(g.breakpoints()))
    atoms: list[Union[PointAtom, IntervalAtom]] = []

    def point(x: Fraction) -> None:
        # domain ends may be open in one operand; the max is then undefined there
        try:
            v1, v2 = f(x), g(x)
        except DomainError:
            return
        atoms.append(PointAtom(x, max(v1, v2)))

    def interval(u: Fraction, v: Fraction) -> None:
        mid = (u + v) / 2
        s1 = f.segment_at(mid)
        s2 = g.segment_at(mid)
        a1, b1 = s1.slope, s1.intercept
        a2, b2 = s2.slope, s2.intercept
        if a1 == a2:
            if b1 >= b2:
                atoms.append(IntervalAtom(u, v, a1, b1))
            else:
                atoms.append(IntervalAtom(u, v, a2, b2))
            return
        x_cross = (b2 - b1) / (a1 - a2)
        if not (u < x_cross < v):
            va = a1 * mid + b1
            vb = a2 * mid + b2
            if va >= vb:
                atoms.append(IntervalAtom(u, v, a1, b1))
            else:
                atoms.append(IntervalAtom(u, v, a2, b2))
            return
        left_mid = (u + x_cross) / 2
        if a1 * left_mid + b1 >= a2 * left_mid + b2:
            lo_affine, hi_affine = (a1, b1), (a2, b2)
        else:
            lo_affine, hi_affine = (a2, b2), (a1, b1)
        atoms.append(IntervalAtom(u, x_cross, *lo_affine))
        atoms.append(PointAtom(x_cross, a1 * x_cross + b1))
        atoms.append(IntervalAtom(x_cross, v, *hi_affine))

    point(cuts[0])
    for u, v in zip(cuts, cuts[1:]):
        interval(u, v)
        point(v)
    return PiecewiseFn(_atoms_to_segments(atoms))
