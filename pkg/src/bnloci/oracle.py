"""Certified nonemptiness decisions.

Decisions are tri-state (Nonempty / Empty / Unknown) and carry
certificates: the name of the rule applied, the instantiated parameters,
and the premise inequalities with their truth values.  Premises are
produced by per-rule builders that are also used by the verifier, so a
stored certificate can always be re-derived and re-checked from its
parameters alone.

Unknown is an honest output: several of the underlying statements are
one-directional, and the rank > 1 existence problem is open in general.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Iterator, Optional

from .bncore import (
    BNProblem,
    UniversalProblem,
    beta_tensor,
    beta_twisted,
    beta_universal,
    beta_untwisted,
    chi_pairing,
    serre_dual_problem,
    shift_line_bundle,
    swap_factors,
    universal_serre_dual,
)
from .exactq import rat_ceil
from .regions import StabilityKind, membership_BMNO, membership_T


class CurveClass(Enum):
    ANY_SMOOTH = "any"
    PETRI = "petri"
    GENERAL = "general"
    NON_HYPERELLIPTIC = "nonhyperelliptic"
    HYPERELLIPTIC = "hyperelliptic"


class Status(Enum):
    NONEMPTY = "Nonempty"
    EMPTY = "Empty"
    UNKNOWN = "Unknown"


class Scope(Enum):
    THIS_RANK = "ThisRank"
    SOME_RANK_SAME_SLOPE_POINT = "SomeRankSameSlopePoint"


RULE_TRIVIAL = "TrivialKNonpositive"
RULE_PETRI = "ClassicalPetri"
RULE_REGION_T = "RegionT"
RULE_REGION_BMNO = "RegionBMNO"
RULE_SMALL_SLOPE = "SmallSlope"
RULE_CANONICAL = "CanonicalDualSpan"
RULE_HYPERELLIPTIC = "HyperellipticSlopeTwo"
RULE_KNOWN_EMPTY = "KnownEmpty"
RULE_SERRE_DUAL_OF = "SerreDualOf"
RULE_SWAPPED_OF = "SwappedFactorsOf"
RULE_LINE_REDUCTION = "LineBundleReduction"
RULE_TWISTED_SCALING = "TwistedScaling"
RULE_PRODUCT = "ProductConstruction"
RULE_KERNEL = "KernelConstruction"


@dataclass(frozen=True)
class Premise:
    inequality: str
    holds: bool


@dataclass(frozen=True)
class Certificate:
    rule: str
    params: dict
    premises: tuple[Premise, ...]


@dataclass(frozen=True)
class Decision:
    status: Status
    scope: Scope
    beta: int
    certificates: tuple[Certificate, ...]


# loci known to be empty from explicit published computations; keyed by
# (g, n, d, k) -> strictest stability kind the emptiness applies to
KNOWN_EMPTY_TABLE: dict[tuple[int, int, int, int], StabilityKind] = {
    (3, 2, 6, 4): StabilityKind.STABLE,
}

PremiseBuilder = Callable[[dict], list[Premise]]
_BUILDERS: dict[str, PremiseBuilder] = {}


def premise_builder(rule: str) -> Callable[[PremiseBuilder], PremiseBuilder]:
    def register(fn: PremiseBuilder) -> PremiseBuilder:
        _BUILDERS[rule] = fn
        return fn
    return register


def make_certificate(rule: str, params: dict) -> Certificate:
    return Certificate(rule, params, tuple(_BUILDERS[rule](params)))


def _iter_nested_certificates(value: Any) -> Iterator[Certificate]:
    if isinstance(value, Certificate):
        yield value
    elif isinstance(value, dict):
        for v in value.values():
            yield from _iter_nested_certificates(v)
    elif isinstance(value, (list, tuple)):
        for v in value:
            yield from _iter_nested_certificates(v)


def verify_certificate(cert: Certificate) -> bool:
    """Re-derive the premises from the stored parameters and re-check them.

    A certificate passes when the rebuilt premise list matches the stored
    one exactly, every premise holds, and all nested certificates pass.
    """
    builder = _BUILDERS.get(cert.rule)
    if builder is None:
        return False
    try:
        rebuilt = tuple(builder(cert.params))
    except Exception:
        return False
    if rebuilt != cert.premises or not all(p.holds for p in rebuilt):
        return False
    return all(verify_certificate(c) for c in _iter_nested_certificates(cert.params))


def verify_decision(decision: Decision) -> bool:
    if decision.status is Status.NONEMPTY and not decision.certificates:
        return False
    return all(verify_certificate(c) for c in decision.certificates)


def resolves_hyperelliptic(cc: CurveClass, g: int) -> bool:
    """True when the curve class forces the curve to be hyperelliptic."""
    return cc is CurveClass.HYPERELLIPTIC or g == 2


def implies_nonhyperelliptic(cc: CurveClass, g: int) -> bool:
    """True when the curve class forces the curve to be non-hyperelliptic.

    Petri and general curves of genus >= 3 are non-hyperelliptic; in
    genus 2 every curve is hyperelliptic.
    """
    if g == 2:
        return False
    return cc in (CurveClass.NON_HYPERELLIPTIC, CurveClass.PETRI, CurveClass.GENERAL)


def check_curve_class(g: int, cc: CurveClass) -> None:
    if g == 2 and cc is CurveClass.NON_HYPERELLIPTIC:
        raise ValueError("every smooth curve of genus 2 is hyperelliptic")


def _problem_params(p: BNProblem) -> dict:
    return {"g": p.g, "n": p.n, "d": p.d, "k": p.k}


def _universal_params(p: UniversalProblem) -> dict:
    return {"g": p.g, "n1": p.n1, "d1": p.d1, "n2": p.n2, "d2": p.d2, "k": p.k}


# ---------------------------------------------------------------------------
# premise builders (single source for emission and verification)


@premise_builder(RULE_TRIVIAL)
def _build_trivial(params: dict) -> list[Premise]:
    k = params["k"]
    return [Premise(f"k = {k} <= 0 (no sections demanded; whole space qualifies)", k <= 0)]


@premise_builder(RULE_PETRI)
def _build_petri(params: dict) -> list[Premise]:
    g, n, d, k = params["g"], params["n"], params["d"], params["k"]
    cc = CurveClass(params["cc"])
    beta = beta_untwisted(g, 1, d, k)
    out = [
        Premise(f"rank n = {n} is 1", n == 1),
        Premise("curve class supports the classical dichotomy (petri or general)",
                cc in (CurveClass.PETRI, CurveClass.GENERAL)),
    ]
    if beta >= 0:
        out.append(Premise(f"beta(1, {d}, {k}) = {beta} >= 0", True))
    else:
        out.append(Premise(f"beta(1, {d}, {k}) = {beta} < 0 (locus empty)", True))
    return out


def _small_slope_interior(g: int, n: int, d: int, k: int,
                          kind: StabilityKind) -> tuple[Status, list[Premise]]:
    thr = n + g * (k - n)
    prem = [
        Premise(f"n = {n} >= 2", n >= 2),
        Premise(f"0 < d = {d} < 2n = {2 * n}", 0 < d < 2 * n),
    ]
    if kind is StabilityKind.STABLE and (d, k) == (n, n):
        prem.append(Premise(
            f"(d, k) = ({d}, {k}) = (n, n): trivially-shaped stable locus is empty", True))
        return Status.EMPTY, prem
    if d >= thr:
        prem.append(Premise(f"d = {d} >= n + g*(k - n) = {thr}", True))
        if kind is StabilityKind.STABLE:
            prem.append(Premise(f"(d, k) = ({d}, {k}) != (n, n)", True))
        return Status.NONEMPTY, prem
    prem.append(Premise(f"d = {d} < n + g*(k - n) = {thr} (locus empty)", True))
    return Status.EMPTY, prem


@premise_builder(RULE_SMALL_SLOPE)
def _build_small_slope(params: dict) -> list[Premise]:
    g, n, d, k = params["g"], params["n"], params["d"], params["k"]
    kind = StabilityKind(params["kind"])
    route = params["route"]
    if route == "interior":
        return _small_slope_interior(g, n, d, k, kind)[1]
    if route == "slope-two":
        thr = n + g * (k - n)
        cc = CurveClass(params["cc"])
        prem = [
            Premise(f"n = {n} >= 2", n >= 2),
            Premise(f"d = {d} == 2n", d == 2 * n),
            Premise("curve class implies non-hyperelliptic",
                    implies_nonhyperelliptic(cc, g)),
        ]
        if d >= thr:
            prem.append(Premise(f"d = {d} >= n + g*(k - n) = {thr}", True))
        else:
            prem.append(Premise(f"d = {d} < n + g*(k - n) = {thr}", True))
            prem.append(Premise(
                f"(n, d, k) = ({n}, {d}, {k}) != (g-1, 2g-2, g) (no canonical span)",
                (n, d, k) != (g - 1, 2 * g - 2, g)))
        return prem
    if route == "slope-two-agreement":
        hyper = Status.NONEMPTY if k <= n else Status.EMPTY
        thr = n + g * (k - n)
        nonhyp = Status.NONEMPTY if (d >= thr or (n, d, k) == (g - 1, 2 * g - 2, g)) else Status.EMPTY
        prem = [
            Premise(f"n = {n} >= 2", n >= 2),
            Premise(f"d = {d} == 2n", d == 2 * n),
            Premise(f"hyperelliptic-case answer is {hyper.value}", True),
            Premise(f"non-hyperelliptic-case answer is {nonhyp.value}", True),
            Premise("the two answers agree, so the curve type is irrelevant",
                    hyper is nonhyp),
        ]
        return prem
    raise ValueError(f"unknown small-slope route {route!r}")


@premise_builder(RULE_CANONICAL)
def _build_canonical(params: dict) -> list[Premise]:
    g, n, d, k = params["g"], params["n"], params["d"], params["k"]
    cc = CurveClass(params["cc"])
    return [
        Premise(f"(n, d, k) = ({n}, {d}, {k}) == (g-1, 2g-2, g) = "
                f"({g - 1}, {2 * g - 2}, {g})",
                (n, d, k) == (g - 1, 2 * g - 2, g)),
        Premise("curve class implies non-hyperelliptic",
                implies_nonhyperelliptic(cc, g)),
    ]


@premise_builder(RULE_HYPERELLIPTIC)
def _build_hyperelliptic(params: dict) -> list[Premise]:
    g, n, d, k = params["g"], params["n"], params["d"], params["k"]
    cc = CurveClass(params["cc"])
    prem = [
        Premise(f"n = {n} >= 2", n >= 2),
        Premise(f"d = {d} == 2n", d == 2 * n),
        Premise("curve class forces hyperelliptic", resolves_hyperelliptic(cc, g)),
    ]
    if k <= n:
        prem.append(Premise(f"k = {k} <= n = {n}", True))
    else:
        prem.append(Premise(f"k = {k} > n = {n} (locus empty)", True))
    return prem


@premise_builder(RULE_REGION_T)
def _build_region_t(params: dict) -> list[Premise]:
    g, n, d, k = params["g"], params["n"], params["d"], params["k"]
    kind = StabilityKind(params["kind"])
    mu, lam = Fraction(d, n), Fraction(k, n)
    v = membership_T(g, mu, lam, kind)
    prem = [
        Premise(f"({mu}, {lam}) lies in the staircase region (0 <= mu <= {2 * g - 2}, "
                f"0 < lam <= t_g(mu))", v.inside),
        Premise(f"rank {n} realizes integer invariants: n*mu = {d}, n*lam = {k}", True),
    ]
    if kind is StabilityKind.STABLE:
        prem.append(Premise("point is not stable-excluded", not v.excluded_for_stable))
    return prem


@premise_builder(RULE_REGION_BMNO)
def _build_region_bmno(params: dict) -> list[Premise]:
    g, n, d, k = params["g"], params["n"], params["d"], params["k"]
    kind = StabilityKind(params["kind"])
    cc = CurveClass(params["cc"])
    mu, lam = Fraction(d, n), Fraction(k, n)
    v = membership_BMNO(g, mu, lam, kind)
    prem = [
        Premise(f"({mu}, {lam}) lies in the sawtooth region (0 <= mu <= {2 * g - 2}, "
                f"0 < lam <= f_g(mu))", v.inside),
    ]
    if kind is StabilityKind.STABLE:
        prem.append(Premise("point is not stable-excluded", not v.excluded_for_stable))
        prem.append(Premise("curve class implies non-hyperelliptic",
                            implies_nonhyperelliptic(cc, g)))
    return prem


@premise_builder(RULE_KNOWN_EMPTY)
def _build_known_empty(params: dict) -> list[Premise]:
    g, n, d, k = params["g"], params["n"], params["d"], params["k"]
    kind = StabilityKind(params["kind"])
    entry = KNOWN_EMPTY_TABLE.get((g, n, d, k))
    holds = entry is not None and (entry is kind or kind is StabilityKind.STABLE
                                   and entry is StabilityKind.STABLE)
    return [Premise(f"({g}, {n}, {d}, {k}) with kind {kind.value} is in the "
                    "known-empty table", holds)]


@premise_builder(RULE_SERRE_DUAL_OF)
def _build_serre_dual_of(params: dict) -> list[Premise]:
    prob, dual = params["problem"], params["dual"]
    if "n1" in prob:
        p = UniversalProblem(**prob)
        q = universal_serre_dual(p)
        expect = _universal_params(q)
    else:
        p = BNProblem(**prob)
        q = serre_dual_problem(p)
        expect = _problem_params(q)
    return [Premise(f"dual data {dual} matches the Serre reflection of {prob}",
                    expect == dual)]


@premise_builder(RULE_SWAPPED_OF)
def _build_swapped_of(params: dict) -> list[Premise]:
    prob, swapped = params["problem"], params["swapped"]
    q = swap_factors(UniversalProblem(**prob))
    return [Premise(f"swapped data {swapped} matches the factor exchange of {prob}",
                    _universal_params(q) == swapped)]


@premise_builder(RULE_LINE_REDUCTION)
def _build_line_reduction(params: dict) -> list[Premise]:
    prob, reduced = params["problem"], params["reduced"]
    p = UniversalProblem(**prob)
    prem = [Premise(f"one moving factor has rank one ({p.n1}, {p.n2})",
                    p.n1 == 1 or p.n2 == 1)]
    if p.n2 == 1:
        expect = {"g": p.g, "n": p.n1, "d": p.d1 + p.n1 * p.d2, "k": p.k}
    else:
        expect = {"g": p.g, "n": p.n2, "d": p.d2 + p.n2 * p.d1, "k": p.k}
    prem.append(Premise(
        f"reduced untwisted data {reduced} matches the line-bundle twist {expect}",
        expect == reduced))
    return prem


@premise_builder(RULE_TWISTED_SCALING)
def _build_twisted_scaling(params: dict) -> list[Premise]:
    g, n1, d1, k = params["g"], params["n1"], params["d1"], params["k"]
    n2, d2, d0, k0 = params["n2"], params["d2"], params["d0"], params["k0"]
    variant = params["variant"]
    kind = StabilityKind(params["kind"])
    stable = kind is StabilityKind.STABLE
    b0 = beta_twisted(g, 1, d0, k0, n2, d2)
    prem = [
        Premise(f"n1 = {n1} >= 2", n1 >= 2),
        Premise(f"rank-one seed count beta(1, {d0}, {k0}) against the fixed "
                f"({n2}, {d2}) is {b0} >= 1", b0 >= 1),
    ]
    if variant == "direct":
        step = n1 * d0 + (1 if stable else 0)
        b_tw = beta_twisted(g, n1, d1, k, n2, d2)
        b_un = beta_universal(g, n1, d1, n2, d2, k)
        prem.append(Premise(f"k = {k} <= n1*k0 = {n1 * k0}", k <= n1 * k0))
        prem.append(Premise(f"d1 = {d1} >= {step}"
                            + (" (strict scaling step)" if stable else ""),
                            d1 >= step))
    elif variant == "serre":
        d2_dual = 2 * n2 * (g - 1) - d2
        chi = chi_pairing(g, n1, d1, n2, d2_dual)
        k1 = k - chi
        step = n1 * d0 + (1 if stable else 0)
        b_tw = n1 * n1 * (g - 1) + 1 - k * k1
        b_un = beta_universal(g, n1, d1, n2, d2_dual, k)
        prem.append(Premise(f"dual section count k1 = k - chi = {k1} <= n1*k0 = "
                            f"{n1 * k0}", k1 <= n1 * k0))
        prem.append(Premise(f"-d1 = {-d1} >= {step}", -d1 >= step))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    bound = n2 * n2 * (g - 1) + 2
    if stable:
        prem.append(Premise(f"guarantee: twisted count {b_tw} > 1", b_tw > 1))
        prem.append(Premise(f"guarantee: universal count {b_un} > {bound}", b_un > bound))
    else:
        prem.append(Premise(f"guarantee: twisted count {b_tw} >= 1", b_tw >= 1))
        prem.append(Premise(f"guarantee: universal count {b_un} >= {bound}", b_un >= bound))
    return prem


@premise_builder(RULE_PRODUCT)
def _build_product(params: dict) -> list[Premise]:
    g = params["g"]
    kind = StabilityKind(params["kind"])
    cc = CurveClass(params["cc"])
    pair = params["pair"]
    n1, d1, n2, d2 = pair["n1"], pair["d1"], pair["n2"], pair["d2"]
    ell, k, k1, k2 = params["ell"], params["k"], params["k1"], params["k2"]
    d1s, d2s = d1 - n1 * ell, d2 + n2 * ell
    window = params["window"]
    prem = [
        Premise(f"shifted pair ((n1, {d1s}), (n2, {d2s})) from ell = {ell}",
                (d1s, d2s) == (params["d1_shifted"], params["d2_shifted"])),
        Premise(f"k = {k} == k1*k2 = {k1}*{k2}", k == k1 * k2),
        Premise(f"ranks n1 = {n1}, n2 = {n2} both >= 2", n1 >= 2 and n2 >= 2),
        Premise(f"factor degrees {d1s}, {d2s} and section counts {k1}, {k2} "
                "all >= 1", d1s >= 1 and d2s >= 1 and k1 >= 1 and k2 >= 1),
    ]
    if window == "standard":
        prem.append(Premise(f"slope window: d1' = {d1s} < 2*n1 = {2 * n1}",
                            d1s < 2 * n1))
        prem.append(Premise(f"slope window: d2' = {d2s} <= 2*g*n2 = {2 * g * n2}",
                            d2s <= 2 * g * n2))
    else:
        prem.append(Premise(f"relaxed window: d1' = {d1s} <= 2*n1 = {2 * n1}",
                            d1s <= 2 * n1))
        prem.append(Premise(f"relaxed window: d2' = {d2s} < 2*g*n2 = {2 * g * n2}",
                            d2s < 2 * g * n2))
        prem.append(Premise("relaxed window requires non-hyperelliptic",
                            implies_nonhyperelliptic(cc, g)))
    f1 = decide_untwisted(BNProblem(g, n1, d1s, k1), cc, kind)
    f2 = decide_untwisted(BNProblem(g, n2, d2s, k2), cc, kind)
    ok1 = f1.status is Status.NONEMPTY and f1.scope is Scope.THIS_RANK
    ok2 = f2.status is Status.NONEMPTY and f2.scope is Scope.THIS_RANK
    prem.append(Premise(f"first factor ({n1}, {d1s}, {k1}) certified nonempty "
                        "at this rank", ok1))
    prem.append(Premise(f"second factor ({n2}, {d2s}, {k2}) certified nonempty "
                        "at this rank", ok2))
    bu = beta_universal(g, n1, d1, n2, d2, k)
    bt_pair = params["beta_tensor"]
    prem.append(Premise(f"universal count {params['beta_universal']} "
                        "matches recomputation", bu == params["beta_universal"]))
    prem.append(Premise(f"tensor count {bt_pair} matches recomputation",
                        beta_tensor(g, n1, d1, n2, d2, k) == bt_pair))
    return prem


@premise_builder(RULE_KERNEL)
def _build_kernel(params: dict) -> list[Premise]:
    g = params["g"]
    kind = StabilityKind(params["kind"])
    cc = CurveClass(params["cc"])
    n1, d1, k1 = params["n1"], params["d1"], params["k1"]
    n, d, k = params["n"], params["d"], params["k"]
    n2, d2 = params["n2"], params["d2"]
    k_max = (d - n * (g - 1)) * (k1 - n1) - n * d1
    prem = [
        Premise(f"n1 = {n1} >= 2 and k1 = {k1} > n1", n1 >= 2 and k1 > n1),
        Premise(f"generator rank n = {n} >= 1", n >= 1),
        Premise(f"induced pair (n2, d2) = ({n2}, {d2}) == (d - n*g, -d) = "
                f"({d - n * g}, {-d})", (n2, d2) == (d - n * g, -d)),
    ]
    if kind is StabilityKind.STABLE:
        if d > 2 * n * g:
            prem.append(Premise(f"d = {d} > 2ng = {2 * n * g}", True))
        else:
            prem.append(Premise(f"d = {d} == 2ng with non-hyperelliptic curve",
                                d == 2 * n * g and implies_nonhyperelliptic(cc, g)))
    else:
        prem.append(Premise(f"d = {d} >= 2ng = {2 * n * g}", d >= 2 * n * g))
    prem.append(Premise(f"section budget k_max = {k_max} matches "
                        f"(d - n(g-1))(k1 - n1) - n*d1", k_max == params["k_max"]))
    prem.append(Premise(f"0 < k = {k} <= k_max = {k_max}", 0 < k <= k_max))
    base = decide_untwisted(BNProblem(g, n1, d1, k1), cc, kind)
    prem.append(Premise(f"base locus ({n1}, {d1}, {k1}) certified nonempty at "
                        "this rank", base.status is Status.NONEMPTY
                        and base.scope is Scope.THIS_RANK))
    prem.append(Premise(f"universal count {params['beta_universal']} matches "
                        "recomputation",
                        beta_universal(g, n1, d1, n2, d2, k) == params["beta_universal"]))
    return prem


# ---------------------------------------------------------------------------
# small-slope deciders


def classify_small_slope(g: int, n: int, d: int,
                         hyperelliptic: bool = False) -> tuple[str, int, int]:
    """Structural case of a small-slope problem, with d = n + g*ell + ellprime.

    Cases I-III cover 0 < d < 2n by the position of d relative to n + g
    and the divisibility of d - n by g; d = 2n is the boundary case IV
    (V on a hyperelliptic curve).
    """
    if g < 2 or n < 2 or not 0 < d <= 2 * n:
        raise ValueError(f"need g >= 2, n >= 2, 0 < d <= 2n; got ({g}, {n}, {d})")
    ell, ellp = divmod(d - n, g)
    if d == 2 * n:
        return ("V" if hyperelliptic else "IV"), ell, ellp
    if d < n + g:
        return "I", ell, ellp
    if ellp == 0:
        return "II", ell, ellp
    return "III", ell, ellp


def small_slope_decide(g: int, n: int, d: int, k: int, cc: CurveClass) -> Decision:
    """Decide the stable locus in the small-slope window 0 < d <= 2n, n >= 2.

    Interior slopes are an if-and-only-if; at the boundary d = 2n the
    answer depends on whether the curve is hyperelliptic, so AnySmooth
    returns Unknown when the two answers diverge.
    """
    if n < 2 or not 0 < d <= 2 * n:
        raise ValueError(f"small-slope window needs n >= 2 and 0 < d <= 2n; "
                         f"got n={n}, d={d}")
    check_curve_class(g, cc)
    beta = beta_untwisted(g, n, d, k)
    base = {"g": g, "n": n, "d": d, "k": k}
    if d < 2 * n:
        status, _ = _small_slope_interior(g, n, d, k, StabilityKind.STABLE)
        cert = make_certificate(RULE_SMALL_SLOPE, {
            **base, "kind": StabilityKind.STABLE.value, "route": "interior"})
        return Decision(status, Scope.THIS_RANK, beta, (cert,))
    # boundary slope: resolve the curve type if the class allows it
    thr = n + g * (k - n)
    hyper_nonempty = k <= n
    nonhyp_nonempty = d >= thr or (n, d, k) == (g - 1, 2 * g - 2, g)
    if resolves_hyperelliptic(cc, g):
        cert = make_certificate(RULE_HYPERELLIPTIC, {**base, "cc": cc.value})
        status = Status.NONEMPTY if hyper_nonempty else Status.EMPTY
        return Decision(status, Scope.THIS_RANK, beta, (cert,))
    if implies_nonhyperelliptic(cc, g):
        certs = []
        if d >= thr:
            certs.append(make_certificate(RULE_SMALL_SLOPE, {
                **base, "kind": StabilityKind.STABLE.value, "route": "slope-two",
                "cc": cc.value}))
        if (n, d, k) == (g - 1, 2 * g - 2, g):
            certs.append(make_certificate(RULE_CANONICAL, {**base, "cc": cc.value}))
        if certs:
            return Decision(Status.NONEMPTY, Scope.THIS_RANK, beta, tuple(certs))
        cert = make_certificate(RULE_SMALL_SLOPE, {
            **base, "kind": StabilityKind.STABLE.value, "route": "slope-two",
            "cc": cc.value})
        return Decision(Status.EMPTY, Scope.THIS_RANK, beta, (cert,))
    # AnySmooth: both curve types possible; answer only when they agree
    if hyper_nonempty == nonhyp_nonempty:
        cert = make_certificate(RULE_SMALL_SLOPE, {
            **base, "kind": StabilityKind.STABLE.value,
            "route": "slope-two-agreement"})
        status = Status.NONEMPTY if hyper_nonempty else Status.EMPTY
        return Decision(status, Scope.THIS_RANK, beta, (cert,))
    return Decision(Status.UNKNOWN, Scope.THIS_RANK, beta, ())


# ---------------------------------------------------------------------------
# untwisted pipeline

StepResult = Optional[tuple[Status, Scope, tuple[Certificate, ...]]]


def _step_trivial(p: BNProblem) -> StepResult:
    if p.k > 0:
        return None
    cert = make_certificate(RULE_TRIVIAL, {"k": p.k})
    return Status.NONEMPTY, Scope.THIS_RANK, (cert,)


def _step_rank_one(p: BNProblem, cc: CurveClass) -> StepResult:
    if p.n != 1 or cc not in (CurveClass.PETRI, CurveClass.GENERAL):
        return None
    beta = beta_untwisted(p.g, 1, p.d, p.k)
    cert = make_certificate(RULE_PETRI, {**_problem_params(p), "cc": cc.value})
    status = Status.NONEMPTY if beta >= 0 else Status.EMPTY
    return status, Scope.THIS_RANK, (cert,)


def _step_small_slope(p: BNProblem, cc: CurveClass, kind: StabilityKind) -> StepResult:
    if p.n < 2 or not 0 < p.d <= 2 * p.n:
        return None
    if kind is StabilityKind.STABLE:
        dec = small_slope_decide(p.g, p.n, p.d, p.k, cc)
        if dec.status is Status.UNKNOWN:
            return None
        return dec.status, dec.scope, dec.certificates
    if p.d < 2 * p.n:
        status, _ = _small_slope_interior(p.g, p.n, p.d, p.k, kind)
        cert = make_certificate(RULE_SMALL_SLOPE, {
            **_problem_params(p), "kind": kind.value, "route": "interior"})
        return status, Scope.THIS_RANK, (cert,)
    # boundary slope, semistable: the stable sublocus is the only handle
    # here; stable emptiness says nothing about the semistable closure
    dec = small_slope_decide(p.g, p.n, p.d, p.k, cc)
    if dec.status is Status.NONEMPTY:
        return Status.NONEMPTY, dec.scope, dec.certificates
    return None


def _step_region_t(p: BNProblem, kind: StabilityKind) -> StepResult:
    v = membership_T(p.g, p.slope, p.section_density, kind)
    if not v.inside or v.excluded_for_stable:
        return None
    cert = make_certificate(RULE_REGION_T, {**_problem_params(p), "kind": kind.value})
    return Status.NONEMPTY, Scope.THIS_RANK, (cert,)


def _step_region_bmno(p: BNProblem, cc: CurveClass, kind: StabilityKind) -> StepResult:
    if kind is StabilityKind.STABLE and not implies_nonhyperelliptic(cc, p.g):
        return None
    v = membership_BMNO(p.g, p.slope, p.section_density, kind)
    if not v.inside or v.excluded_for_stable:
        return None
    cert = make_certificate(RULE_REGION_BMNO, {
        **_problem_params(p), "kind": kind.value, "cc": cc.value})
    return Status.NONEMPTY, Scope.SOME_RANK_SAME_SLOPE_POINT, (cert,)


def _wrap_serre(p: BNProblem, q: BNProblem, inner: tuple[Certificate, ...]) -> Certificate:
    return make_certificate(RULE_SERRE_DUAL_OF, {
        "problem": _problem_params(p), "dual": _problem_params(q),
        "inner": list(inner)})


def _step_dual(p: BNProblem, cc: CurveClass, kind: StabilityKind) -> StepResult:
    q = serre_dual_problem(p)
    for sub in (_step_trivial(q),
                _step_small_slope(q, cc, kind),
                _step_region_t(q, kind),
                _step_region_bmno(q, cc, kind)):
        if sub is not None:
            status, scope, certs = sub
            return status, scope, (_wrap_serre(p, q, certs),)
    return None


def _step_known_empty(p: BNProblem, kind: StabilityKind) -> StepResult:
    entry = KNOWN_EMPTY_TABLE.get((p.g, p.n, p.d, p.k))
    if entry is None or (entry is StabilityKind.STABLE
                         and kind is not StabilityKind.STABLE):
        return None
    cert = make_certificate(RULE_KNOWN_EMPTY, {
        **_problem_params(p), "kind": kind.value})
    return Status.EMPTY, Scope.THIS_RANK, (cert,)


def decide_untwisted(p: BNProblem, cc: CurveClass, kind: StabilityKind) -> Decision:
    """Decide nonemptiness of the rank-n locus, collecting certificates.

    Steps run in a fixed order and the first definite answer fixes the
    status; the remaining steps still run so that every rule agreeing
    with that status contributes its certificate.  The scope is the
    strongest granted by any collected step.
    """
    check_curve_class(p.g, cc)
    steps = (
        lambda: _step_trivial(p),
        lambda: _step_rank_one(p, cc),
        lambda: _step_small_slope(p, cc, kind),
        lambda: _step_region_t(p, kind),
        lambda: _step_region_bmno(p, cc, kind),
        lambda: _step_dual(p, cc, kind),
        lambda: _step_known_empty(p, kind),
    )
    results = []
    for step in steps:
        res = step()
        if res is not None:
            results.append(res)
    beta = beta_untwisted(p.g, p.n, p.d, p.k)
    if not results:
        return Decision(Status.UNKNOWN, Scope.THIS_RANK, beta, ())
    status = results[0][0]
    agreeing = [(sc, certs) for st, sc, certs in results if st is status]
    scope = (Scope.THIS_RANK if any(sc is Scope.THIS_RANK for sc, _ in agreeing)
             else Scope.SOME_RANK_SAME_SLOPE_POINT)
    collected: list[Certificate] = []
    for _, certs in agreeing:
        for c in certs:
            if c not in collected:
                collected.append(c)
    return Decision(status, scope, beta, tuple(collected))


# ---------------------------------------------------------------------------
# twisted scaling (fixed second bundle)


def t1_twisted_decide(g: int, n1: int, d1: int, k: int, n2: int, d2: int,
                      d0: int, k0: int, variant: str,
                      kind: StabilityKind = StabilityKind.STABLE) -> Decision:
    """Scaling construction from a rank-one seed against a fixed bundle.

    All hypotheses holding yields Nonempty with the guaranteed count
    bounds attached; any failure yields Unknown (the statement is
    one-directional, so Empty is never produced).
    """
    if n1 < 2:
        raise ValueError(f"scaling needs n1 >= 2, got {n1}")
    if variant not in ("direct", "serre"):
        raise ValueError(f"variant must be direct or serre, got {variant!r}")
    params = {"g": g, "n1": n1, "d1": d1, "k": k, "n2": n2, "d2": d2,
              "d0": d0, "k0": k0, "variant": variant, "kind": kind.value}
    cert = make_certificate(RULE_TWISTED_SCALING, params)
    if variant == "direct":
        beta = beta_twisted(g, n1, d1, k, n2, d2)
    else:
        d2_dual = 2 * n2 * (g - 1) - d2
        beta = n1 * n1 * (g - 1) + 1 - k * (k - chi_pairing(g, n1, d1, n2, d2_dual))
    if all(pr.holds for pr in cert.premises):
        return Decision(Status.NONEMPTY, Scope.THIS_RANK, beta, (cert,))
    return Decision(Status.UNKNOWN, Scope.THIS_RANK, beta, ())


# ---------------------------------------------------------------------------
# universal pipeline


def _divisor_pairs(k: int) -> list[tuple[int, int]]:
    pairs = []
    for k1 in range(1, k + 1):
        if k % k1 == 0:
            pairs.append((k1, k // k1))
    pairs.sort(key=lambda pk: (max(pk), pk[0]))
    return pairs


def _presentations(p: UniversalProblem, cap: int = 8
                   ) -> list[tuple[UniversalProblem, list[str], list[UniversalProblem]]]:
    """Breadth-first presentations of p under factor swap and Serre duality.

    Each entry is (problem, ops, chain) where ops lists the generators
    applied in order and chain holds the intermediate problems from p.
    The two generators compose to a line-bundle shift, so the raw orbit
    is infinite; the cap keeps one lap of it, which already contains
    every presentation that differs by more than a shift.
    """
    seen = {p}
    queue = [(p, [], [p])]
    out = []
    while queue and len(out) < cap:
        cur, ops, chain = queue.pop(0)
        out.append((cur, ops, chain))
        for name, fn in (("swap", swap_factors), ("serre", universal_serre_dual)):
            nxt = fn(cur)
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, ops + [name], chain + [nxt]))
    return out


def _wrap_chain(cert: Certificate, ops: list[str],
                chain: list[UniversalProblem]) -> Certificate:
    for i in range(len(ops) - 1, -1, -1):
        src, dst = chain[i], chain[i + 1]
        if ops[i] == "serre":
            cert = make_certificate(RULE_SERRE_DUAL_OF, {
                "problem": _universal_params(src), "dual": _universal_params(dst),
                "inner": [cert]})
        else:
            cert = make_certificate(RULE_SWAPPED_OF, {
                "problem": _universal_params(src), "swapped": _universal_params(dst),
                "inner": [cert]})
    return cert


def _try_product(q: UniversalProblem, cc: CurveClass,
                 kind: StabilityKind) -> Optional[Certificate]:
    from . import construct
    mu1 = Fraction(q.d1, q.n1)
    if q.n1 < 2 or q.n2 < 2:
        return None
    candidates: list[int] = []
    base = rat_ceil(mu1)
    for ell in (base - 2, base - 1):
        if 0 < mu1 - ell < 2:
            candidates.append(ell)
    if mu1.denominator == 1 and implies_nonhyperelliptic(cc, q.g):
        ell = int(mu1) - 2
        if ell not in candidates:
            candidates.append(ell)
    for ell in sorted(candidates):
        shifted = shift_line_bundle(q, ell)
        for k1, k2 in _divisor_pairs(q.k):
            try:
                witness = construct.product_construct(
                    q.g, BNProblem(q.g, q.n1, shifted.d1, k1),
                    BNProblem(q.g, q.n2, shifted.d2, k2), cc, kind)
            except (construct.ConstructError, ValueError):
                continue
            params = {
                "g": q.g, "kind": kind.value, "cc": cc.value,
                "pair": {"n1": q.n1, "d1": q.d1, "n2": q.n2, "d2": q.d2},
                "ell": ell, "k": q.k, "k1": k1, "k2": k2,
                "d1_shifted": shifted.d1, "d2_shifted": shifted.d2,
                "window": witness.window,
                "beta_universal": witness.beta_universal,
                "beta_tensor": witness.beta_tensor,
                "inner": list(witness.factor1_decision.certificates)
                + list(witness.factor2_decision.certificates),
            }
            return make_certificate(RULE_PRODUCT, params)
    return None


def _try_kernel(q: UniversalProblem, cc: CurveClass,
                kind: StabilityKind) -> Optional[Certificate]:
    from . import construct
    if q.n1 < 2 or q.d2 >= 0:
        return None
    d = -q.d2
    if (d - q.n2) % q.g != 0:
        return None
    n = (d - q.n2) // q.g
    if n < 1:
        return None
    denom = d - n * (q.g - 1)
    if denom <= 0:
        return None
    lo = max(q.n1 + 1, q.n1 + rat_ceil(Fraction(q.k + n * q.d1, denom)))
    hi = q.n1 + max(q.d1, 0)
    for k1 in range(lo, hi + 1):
        try:
            witness = construct.kernel_construct(q.g, q.n1, q.d1, k1, n, d, q.k,
                                                 cc, kind)
        except construct.ConstructError:
            continue
        params = {
            "g": q.g, "kind": kind.value, "cc": cc.value,
            "n1": q.n1, "d1": q.d1, "k1": k1, "n": n, "d": d, "k": q.k,
            "n2": q.n2, "d2": q.d2, "k_max": witness.k_max,
            "beta_universal": witness.beta_universal,
            "inner": list(witness.base_decision.certificates),
        }
        return make_certificate(RULE_KERNEL, params)
    return None


def _try_scaling(q: UniversalProblem, cc: CurveClass,
                 kind: StabilityKind) -> Optional[Certificate]:
    if q.n1 < 2:
        return None
    if kind is StabilityKind.STABLE:
        d0 = (q.d1 - 1) // q.n1
    else:
        d0 = q.d1 // q.n1
    chi0 = chi_pairing(q.g, 1, d0, q.n2, q.d2)
    lo = max(1, rat_ceil(Fraction(q.k, q.n1)))
    for k0 in range(lo, chi0 + q.g):
        if beta_twisted(q.g, 1, d0, k0, q.n2, q.d2) >= 1:
            dec = t1_twisted_decide(q.g, q.n1, q.d1, q.k, q.n2, q.d2, d0, k0,
                                    "direct", kind)
            if dec.status is Status.NONEMPTY:
                return dec.certificates[0]
    return None


def decide_universal(p: UniversalProblem, cc: CurveClass,
                     kind: StabilityKind) -> Decision:
    """Decide nonemptiness of the universal locus for a moving pair.

    After the trivial and rank-one reductions, every presentation in the
    swap/Serre orbit is tried with the product, kernel, and scaling
    constructions in that order; the first success is wrapped back
    through the presentation chain.  All three constructions are
    one-directional, so the fall-through answer is Unknown.
    """
    check_curve_class(p.g, cc)
    beta = beta_universal(p.g, p.n1, p.d1, p.n2, p.d2, p.k)
    if p.k <= 0:
        cert = make_certificate(RULE_TRIVIAL, {"k": p.k})
        return Decision(Status.NONEMPTY, Scope.THIS_RANK, beta, (cert,))
    if p.n1 == 1 or p.n2 == 1:
        if p.n2 == 1:
            reduced = BNProblem(p.g, p.n1, p.d1 + p.n1 * p.d2, p.k)
        else:
            reduced = BNProblem(p.g, p.n2, p.d2 + p.n2 * p.d1, p.k)
        inner = decide_untwisted(reduced, cc, kind)
        cert = make_certificate(RULE_LINE_REDUCTION, {
            "problem": _universal_params(p),
            "reduced": _problem_params(reduced),
            "inner": list(inner.certificates)})
        return Decision(inner.status, inner.scope, beta, (cert,))
    for q, ops, chain in _presentations(p):
        for attempt in (_try_product, _try_kernel, _try_scaling):
            cert = attempt(q, cc, kind)
            if cert is not None:
                wrapped = _wrap_chain(cert, ops, chain)
                return Decision(Status.NONEMPTY, Scope.THIS_RANK, beta, (wrapped,))
    return Decision(Status.UNKNOWN, Scope.THIS_RANK, beta, ())


# ---------------------------------------------------------------------------
# serialization


def _jsonify(value: Any) -> Any:
    if isinstance(value, Certificate):
        return certificate_to_json(value)
    if isinstance(value, Premise):
        return {"inequality": value.inequality, "holds": value.holds}
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    return value


def certificate_to_json(cert: Certificate) -> dict:
    return {"rule": cert.rule, "params": _jsonify(cert.params),
            "premises": [_jsonify(p) for p in cert.premises]}


def decision_to_json(decision: Decision) -> dict:
    return {"status": decision.status.value, "scope": decision.scope.value,
            "beta": decision.beta,
            "certificates": [certificate_to_json(c) for c in decision.certificates]}
