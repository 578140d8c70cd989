"""
Chatelet surfaces y^2 - a z^2 = q1(x) q2(x): local points, evaluation of the
quaternion class A = (a, q1(x)) at local points, and the case-by-case prover
that certifies the local invariant at every place of Q at once
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from arith import (
    RationalLike,
    format_rational,
    is_rational_square,
    legendre,
    parse_rational,
    rational_primes,
    sqrt_bracket,
    square_class_test,
    to_rational,
    valuation,
)
from errors import NoLocalPointOnFiber, NotLocallySolvable, ParseError, RuleHypothesisFailed, SquareA
from hilbert import dominance_rewrite, even_valuation_rule, hilbert_symbol
from places_fields import Place

if TYPE_CHECKING:
    from construct import ConstructionParams

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
HALF = Fraction(1, 2)
BOTH = frozenset({ZERO, HALF})

c_DEFAULT_UNIT_BOUND = 50
c_DEFAULT_EXTRA_DEPTH = 2


class SurfaceKind(Enum):
    V1 = "v1"
    V2 = "v2"

    @classmethod
    def parse(cls, text: str) -> "SurfaceKind":
        try:
            return cls(str(text).strip().lower())
        except ValueError as e:
            raise ParseError(f"unknown surface kind {text!r}; expected v1 or v2") from e


def format_invariant(value: Fraction) -> str:
    return format_rational(value)


def parse_invariant(text: str) -> Fraction:
    value = parse_rational(text)
    if value not in BOTH:
        raise ParseError(f"invariant {text!r} is not 0 or 1/2")
    return value


@dataclass(frozen=True)
class EvenQuadratic:
    """lead * x^2 + const"""

    lead: Fraction
    const: Fraction

    def __post_init__(self) -> None:
        if self.lead == 0 or self.const == 0:
            raise ValueError("even quadratic needs nonzero leading and constant coefficients")

    @classmethod
    def of(cls, lead: RationalLike, const: RationalLike) -> "EvenQuadratic":
        return cls(to_rational(lead), to_rational(const))

    def __call__(self, x: Fraction) -> Fraction:
        return self.lead * x * x + self.const

    def root_square(self) -> Optional[Fraction]:
        """r^2 for the real roots +-r, or None when there are no real roots"""
        t = -self.const / self.lead
        return t if t > 0 else None

    def to_json(self) -> List[str]:
        return [format_rational(self.lead), format_rational(self.const)]


@dataclass(frozen=True)
class ChateletSurface:
    """y^2 - a z^2 = q1(x) q2(x)"""

    a: Fraction
    q1: EvenQuadratic
    q2: EvenQuadratic

    def __post_init__(self) -> None:
        if self.a == 0:
            raise ValueError("a must be nonzero")
        if is_rational_square(self.a):
            raise SquareA(f"a = {self.a} is a rational square")
        if self.q1.lead * self.q2.const == self.q2.lead * self.q1.const:
            raise ValueError("q1 and q2 share a root; P is not separable")

    def P(self, x: Fraction) -> Fraction:
        return self.q1(x) * self.q2(x)

    @property
    def leading(self) -> Fraction:
        return self.q1.lead * self.q2.lead

    def coefficients(self) -> List[Fraction]:
        return [self.a, self.q1.lead, self.q1.const, self.q2.lead, self.q2.const]

    def to_json(self) -> dict:
        return {"a": format_rational(self.a), "q1": self.q1.to_json(), "q2": self.q2.to_json()}


@dataclass(frozen=True)
class XCoordinate:
    """A finite x or the fiber at infinity"""

    value: Optional[Fraction] = None

    @classmethod
    def at(cls, x: RationalLike) -> "XCoordinate":
        return cls(to_rational(x))

    @classmethod
    def infinity(cls) -> "XCoordinate":
        return cls(None)

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def serialize(self) -> str:
        return "inf" if self.value is None else format_rational(self.value)

    @classmethod
    def parse(cls, text: str) -> "XCoordinate":
        if str(text).strip().lower() in ("inf", "infinity"):
            return cls.infinity()
        return cls(parse_rational(text))

    def __str__(self) -> str:
        return self.serialize()


@dataclass(frozen=True)
class Witness:
    """A local point given by its x-coordinate, with the exact symbols that place it and evaluate A"""

    x: XCoordinate
    invariant: Fraction
    norm_symbol: int
    factor_symbols: Tuple[Optional[int], Optional[int]]

    def to_json(self) -> dict:
        return {
            "x": self.x.serialize(),
            "invariant": format_invariant(self.invariant),
            "norm_symbol": self.norm_symbol,
            "factor_symbols": list(self.factor_symbols),
        }


def evaluate_witness(V: ChateletSurface, v: Place, x: XCoordinate) -> Witness:
    """
    Evaluate A at a point of the fiber over x

    The fiber over finite x has a Q_v-point iff P(x) = 0 or (a, P(x))_v = +1;
    the fiber at infinity is the conic y^2 - a z^2 = lc(P) w^2.

    Raises:
        NoLocalPointOnFiber: the fiber has no Q_v-point
    """
    a = V.a
    if x.is_infinity:
        norm = hilbert_symbol(a, V.leading, v)
        if norm != 1:
            raise NoLocalPointOnFiber(f"fiber at infinity has no {v}-adic point")
        s1 = hilbert_symbol(a, V.q1.lead, v)
        s2 = hilbert_symbol(a, V.q2.lead, v)
        return Witness(x, HALF if s1 == -1 else ZERO, norm, (s1, s2))

    t = x.value
    assert t is not None
    f1, f2 = V.q1(t), V.q2(t)
    s1 = hilbert_symbol(a, f1, v) if f1 != 0 else None
    s2 = hilbert_symbol(a, f2, v) if f2 != 0 else None
    if f1 != 0 and f2 != 0:
        norm = hilbert_symbol(a, f1 * f2, v)
        if norm != 1:
            raise NoLocalPointOnFiber(f"(a, P({t}))_{v} = -1")
    else:
        norm = 1
    s = s1 if s1 is not None else s2
    return Witness(x, HALF if s == -1 else ZERO, norm, (s1, s2))


def evaluate_invariant(V: ChateletSurface, v: Place, x: XCoordinate) -> Fraction:
    """inv_v A(P) in {0, 1/2} for a local point P over x"""
    return evaluate_witness(V, v, x).invariant


# --- local search -------------------------------------------------------------


@dataclass(frozen=True)
class SearchBounds:
    unit_bound: int = c_DEFAULT_UNIT_BOUND
    extra_depth: int = c_DEFAULT_EXTRA_DEPTH
    depth: Optional[int] = None

    def to_json(self) -> dict:
        return {"unit_bound": self.unit_bound, "extra_depth": self.extra_depth, "depth": self.depth}


def search_depth(V: ChateletSurface, p: int, bounds: SearchBounds) -> int:
    if bounds.depth is not None:
        return bounds.depth
    return max(abs(valuation(t, p)) for t in V.coefficients()) + bounds.extra_depth


def unit_representatives(p: int, unit_bound: int) -> List[int]:
    if p == 2:
        return [1, 3, 5, 7]
    units = list(range(1, min(p - 1, unit_bound) + 1))
    if p - 1 > unit_bound and all(legendre(u, p) == 1 for u in units):
        r = unit_bound + 1
        while legendre(r, p) == 1:
            r += 1
        units.append(r)
    return units


def _separating_points(roots_sq: Sequence[Fraction]) -> List[Fraction]:
    """Rationals in every gap of 0 < r_1 < ... < r_k and one beyond r_k (r_i = sqrt(roots_sq[i]))"""
    ordered = sorted(set(roots_sq))
    if not ordered:
        return [Fraction(1)]
    scale = 1
    while True:
        brackets = [sqrt_bracket(t, scale) for t in ordered]
        if all(brackets[i][1] < brackets[i + 1][0] for i in range(len(brackets) - 1)):
            break
        scale *= 2
    points = [(brackets[i][1] + brackets[i + 1][0]) / 2 for i in range(len(brackets) - 1)]
    points.append(brackets[-1][1] + 1)
    return points


def candidate_xs(V: ChateletSurface, v: Place, bounds: SearchBounds) -> Iterator[XCoordinate]:
    """
    Deterministic x-coordinates to try at v

    Finite p: 0, infinity, then +-u p^n for n = 1..B, 0, -1..-B and unit
    representatives u. Real: 0, a point in every sign interval of P and q1
    on the positive axis (P and q1 are even), and infinity.
    """
    yield XCoordinate.at(0)
    yield XCoordinate.infinity()
    if v.is_real:
        roots = [t for t in (V.q1.root_square(), V.q2.root_square()) if t is not None]
        for point in _separating_points(roots):
            yield XCoordinate.at(point)
        return
    p = v.prime
    depth = search_depth(V, p, bounds)
    units = unit_representatives(p, bounds.unit_bound)
    exponents = list(range(1, depth + 1)) + [0] + [-n for n in range(1, depth + 1)]
    for n in exponents:
        scale = Fraction(p) ** n
        for u in units:
            yield XCoordinate.at(u * scale)
            yield XCoordinate.at(-u * scale)


def local_solvable(
    V: ChateletSurface,
    v: Place,
    bounds: SearchBounds = SearchBounds(),
    rule: Optional["RuleOutcome"] = None,
) -> Tuple[bool, Optional[XCoordinate]]:
    """
    (True, x) for the first candidate fiber carrying a Q_v-point

    When the search runs out, a passing rule case that proves solvability
    for v's class gives (True, None); otherwise (False, None).
    """
    for x in candidate_xs(V, v, bounds):
        try:
            evaluate_witness(V, v, x)
        except NoLocalPointOnFiber:
            continue
        return True, x
    if rule is not None and rule.solvable and rule.passed:
        logger.debug("no %s-adic witness within bounds; solvable by case %s", v, rule.case_id)
        return True, None
    return False, None


@dataclass(frozen=True)
class InvariantSearch:
    place: Place
    values: FrozenSet[Fraction]
    witnesses: Tuple[Witness, ...]
    candidates_checked: int

    def to_json(self) -> dict:
        return {
            "place": str(self.place),
            "invariant_set": [format_invariant(x) for x in sorted(self.values)],
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def invariant_set(V: ChateletSurface, v: Place, bounds: SearchBounds = SearchBounds()) -> InvariantSearch:
    """
    Invariant values found on local points at v, each with the first witness that produced it

    Raises:
        NotLocallySolvable: no candidate fiber has a Q_v-point
    """
    found: Dict[Fraction, Witness] = {}
    checked = 0
    for x in candidate_xs(V, v, bounds):
        checked += 1
        try:
            w = evaluate_witness(V, v, x)
        except NoLocalPointOnFiber:
            continue
        found.setdefault(w.invariant, w)
        if len(found) == 2:
            break
    if not found:
        raise NotLocallySolvable(f"no {v}-adic point among {checked} candidate fibers")
    logger.debug("invariants at %s: %s after %d candidates", v, sorted(found), checked)
    witnesses = tuple(found[value] for value in sorted(found))
    return InvariantSearch(v, frozenset(found), witnesses, checked)


# --- place classes and the constancy prover -----------------------------------


class PlaceClass(Enum):
    INF_MINUS_SPRIME_OR_2ADIC = "inf_minus_sprime_or_2adic"
    SPRIME_MINUS_S_ARCH = "sprime_minus_s_arch"
    SPRIME_MINUS_S_FINITE = "sprime_minus_s_finite"
    OUTSIDE_SPRIME_FINITE = "outside_sprime_finite"
    S_ARCH = "s_arch"
    S_FINITE = "s_finite"
    SDOUBLEPRIME = "sdoubleprime"


def s_prime(a: RationalLike) -> List[Place]:
    """Real if a < 0, and the odd primes at which v(a) is odd"""
    a = to_rational(a)
    places = [Place.real()] if a < 0 else []
    places += [Place.finite(p) for p in rational_primes(a) if p != 2 and valuation(a, p) % 2]
    return places


def s_double_prime(b: RationalLike) -> List[Place]:
    """The odd primes at which v(b) != 0"""
    return [Place.finite(p) for p in rational_primes(b) if p != 2]


def classify_place(
    v: Place, a: RationalLike, b: RationalLike, S: Iterable[Place], kind: SurfaceKind
) -> PlaceClass:
    a, b = to_rational(a), to_rational(b)
    if is_rational_square(a):
        raise SquareA(f"a = {a} is a rational square")
    members = set(S)
    if v.is_real:
        if a > 0:
            return PlaceClass.INF_MINUS_SPRIME_OR_2ADIC
        return PlaceClass.S_ARCH if v in members else PlaceClass.SPRIME_MINUS_S_ARCH
    p = v.prime
    if p == 2:
        return PlaceClass.INF_MINUS_SPRIME_OR_2ADIC
    if v in members:
        return PlaceClass.S_FINITE
    if valuation(a, p) % 2:
        return PlaceClass.SPRIME_MINUS_S_FINITE
    if kind is SurfaceKind.V2 and valuation(b, p) != 0:
        return PlaceClass.SDOUBLEPRIME
    return PlaceClass.OUTSIDE_SPRIME_FINITE


@dataclass(frozen=True)
class Hypothesis:
    description: str
    passed: bool

    def to_json(self) -> list:
        return [self.description, self.passed]


@dataclass(frozen=True)
class RuleOutcome:
    """One case of the constancy proof: its places, checked hypotheses and conclusion"""

    case_id: str
    place_class: PlaceClass
    places: Tuple[str, ...]
    hypotheses: Tuple[Hypothesis, ...]
    solvable: Optional[bool]
    invariant_claim: FrozenSet[Fraction]
    vacuous: bool = False
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.vacuous or all(h.passed for h in self.hypotheses)

    def first_failure(self) -> Optional[Hypothesis]:
        return next((h for h in self.hypotheses if not h.passed), None)

    def to_json(self) -> dict:
        return {
            "case_id": self.case_id,
            "place_class": self.place_class.value,
            "places": list(self.places),
            "hypotheses": [h.to_json() for h in self.hypotheses],
            "solvable": self.solvable,
            "invariant_claim": [format_invariant(x) for x in sorted(self.invariant_claim)],
            "vacuous": self.vacuous,
            "note": self.note,
        }


def _in_z_half(x: Fraction) -> bool:
    d = x.denominator
    while d % 2 == 0:
        d //= 2
    return d == 1


def _v(x: Fraction, p: int) -> Optional[int]:
    return None if x == 0 else valuation(x, p)


def _rule_symbol(a: Fraction, b: Fraction, p: int) -> int:
    """(a, b)_p, settled by the even-valuation rule when it applies"""
    shortcut = even_valuation_rule(a, b, p)
    return shortcut if shortcut is not None else hilbert_symbol(a, b, p)


def _dominated_by_b(a: Fraction, b: Fraction, bc1: Fraction, p: int) -> bool:
    """(a, b x^2 - (bc + 1))_p reduces to (a, b)_p for p-adic units x"""
    return b != 0 and bc1 != 0 and dominance_rewrite(a, b, -bc1, p) is not None


@dataclass
class _Checks:
    """Collects hypotheses for one case"""

    items: List[Hypothesis] = field(default_factory=list)

    def add(self, description: str, passed: bool) -> None:
        self.items.append(Hypothesis(description, bool(passed)))

    def frozen(self) -> Tuple[Hypothesis, ...]:
        return tuple(self.items)


def _outcome(
    case_id: str,
    place_class: PlaceClass,
    places: Sequence[str],
    checks: _Checks,
    claim: FrozenSet[Fraction],
    vacuous: bool = False,
    note: str = "",
) -> RuleOutcome:
    return RuleOutcome(case_id, place_class, tuple(places), checks.frozen(), True, claim, vacuous, note)


def _common_checks(checks: _Checks, a: Fraction) -> None:
    checks.add("a is not a rational square", not is_rational_square(a))
    checks.add("a ∈ Q_2^×2 (a ≡ 1 mod 8 on its unit part, even 2-adic valuation)", square_class_test(a, 2))


def _v1_outcomes(V: ChateletSurface, a: Fraction, b: Fraction, c: Fraction, S: Set[Place]) -> List[RuleOutcome]:
    Sp = set(s_prime(a))
    s_fin = sorted(v.prime for v in S if not v.is_real)
    sp_minus_s = sorted(v.prime for v in Sp - S if not v.is_real)
    real_in_S = Place.real() in S
    real_in_sp_minus_s = Place.real() in Sp and not real_in_S
    rational_point = V.P(ZERO) == b * b
    outcomes = []

    checks = _Checks()
    checks.add("rational point (0, b, 0): P(0) = b^2", rational_point)
    _common_checks(checks, a)
    places = ["2"] + (["real"] if a > 0 else [])
    outcomes.append(_outcome("V1-(1)", PlaceClass.INF_MINUS_SPRIME_OR_2ADIC, places, checks, frozenset({ZERO})))

    checks = _Checks()
    if real_in_sp_minus_s:
        checks.add("rational point (0, b, 0): P(0) = b^2", rational_point)
        checks.add("c > 0, so c x^2 + 1 > 0 for every real x", c > 0)
    outcomes.append(
        _outcome(
            "V1-(2)",
            PlaceClass.SPRIME_MINUS_S_ARCH,
            ["real"] if real_in_sp_minus_s else [],
            checks,
            frozenset({ZERO}),
            vacuous=not real_in_sp_minus_s,
        )
    )

    checks = _Checks()
    if sp_minus_s:
        checks.add("rational point (0, b, 0): P(0) = b^2", rational_point)
    for p in sp_minus_s:
        checks.add(f"v_{p}(b) = v_{p}(a) > 0", _v(b, p) == valuation(a, p) > 0)
        checks.add(f"v_{p}(c) >= 0", _v(c, p) is not None and _v(c, p) >= 0)
    outcomes.append(
        _outcome(
            "V1-(3)",
            PlaceClass.SPRIME_MINUS_S_FINITE,
            [str(p) for p in sp_minus_s],
            checks,
            frozenset({ZERO}),
            vacuous=not sp_minus_s,
        )
    )

    checks = _Checks()
    checks.add("rational point (0, b, 0): P(0) = b^2", rational_point)
    checks.add("c ∈ Z[1/2]", _in_z_half(c))
    negative_b = [p for p in rational_primes(b) if p != 2 and valuation(b, p) < 0]
    checks.add(
        "v_p(b) >= 0 for every odd p outside S",
        all(Place.finite(p) in S for p in negative_b),
    )
    outcomes.append(
        _outcome("V1-(4)", PlaceClass.OUTSIDE_SPRIME_FINITE, ["odd primes outside S′"], checks, frozenset({ZERO}))
    )

    checks = _Checks()
    if real_in_S:
        checks.add("rational point (0, b, 0): P(0) = b^2", rational_point)
        checks.add("a < 0", a < 0)
        checks.add("1 + c b^2 < 0", 1 + c * b * b < 0)
    outcomes.append(
        _outcome(
            "V1-(5)", PlaceClass.S_ARCH, ["real"] if real_in_S else [], checks, BOTH, vacuous=not real_in_S
        )
    )

    checks = _Checks()
    if s_fin:
        checks.add("rational point (0, b, 0): P(0) = b^2", rational_point)
    for p in s_fin:
        vb, vc = _v(b, p), _v(c, p)
        checks.add(f"v_{p}(a) is odd", valuation(a, p) % 2 == 1)
        checks.add(f"v_{p}(b) = -v_{p}(a)", vb == -valuation(a, p))
        checks.add(f"v_{p}(c) = 0", vc == 0)
        checks.add(f"(a, c)_{p} = -1", c != 0 and _rule_symbol(a, c, p) == -1)
    outcomes.append(
        _outcome("V1-(6)", PlaceClass.S_FINITE, [str(p) for p in s_fin], checks, BOTH, vacuous=not s_fin)
    )
    return outcomes


def _v2_outcomes(V: ChateletSurface, a: Fraction, b: Fraction, c: Fraction, S: Set[Place]) -> List[RuleOutcome]:
    Sp = set(s_prime(a))
    s_fin = sorted(v.prime for v in S if not v.is_real)
    sp_minus_s = sorted(v.prime for v in Sp - S if not v.is_real)
    sdp = sorted(v.prime for v in s_double_prime(b) if v not in Sp and v not in S)
    real_in_S = Place.real() in S
    real_in_sp_minus_s = Place.real() in Sp and not real_in_S
    bc1 = b * c + 1
    outcomes = []

    checks = _Checks()
    _common_checks(checks, a)
    places = ["2"] + (["real"] if a > 0 else [])
    outcomes.append(
        _outcome("V2-sol(1)/inv(1)", PlaceClass.INF_MINUS_SPRIME_OR_2ADIC, places, checks, frozenset({ZERO}))
    )

    checks = _Checks()
    if real_in_sp_minus_s:
        checks.add("b > 0", b > 0)
        checks.add("bc + 1 < 0", bc1 < 0)
    outcomes.append(
        _outcome(
            "V2-sol(2)/inv(2)",
            PlaceClass.SPRIME_MINUS_S_ARCH,
            ["real"] if real_in_sp_minus_s else [],
            checks,
            frozenset({ZERO}),
            vacuous=not real_in_sp_minus_s,
        )
    )

    checks = _Checks()
    if sp_minus_s:
        checks.add("c ∈ Z[1/2]", _in_z_half(c))
    for p in sp_minus_s:
        checks.add(f"v_{p}(b) = 0", _v(b, p) == 0)
        checks.add(f"(a, b)_{p} = +1", _rule_symbol(a, b, p) == 1)
        checks.add(f"v_{p}(c) = 0", _v(c, p) == 0)
        checks.add(f"v_{p}(bc + 1) = v_{p}(a) + 2", _v(bc1, p) == valuation(a, p) + 2)
        checks.add(f"(a, q2(x))_{p} = (a, b)_{p} for units x", _dominated_by_b(a, b, bc1, p))
    outcomes.append(
        _outcome(
            "V2-sol(3)/inv(3)",
            PlaceClass.SPRIME_MINUS_S_FINITE,
            [str(p) for p in sp_minus_s],
            checks,
            frozenset({ZERO}),
            vacuous=not sp_minus_s,
        )
    )

    checks = _Checks()
    for p in sdp:
        checks.add(f"v_{p}(a) is even", valuation(a, p) % 2 == 0)
        checks.add(f"(a, c)_{p} = +1", c != 0 and _rule_symbol(a, c, p) == 1)
        checks.add(f"v_{p}(bc + 1) = 0", _v(bc1, p) == 0)
        checks.add(f"v_{p}(b) >= 0", _v(b, p) is not None and _v(b, p) >= 0)
        checks.add(f"v_{p}(c) >= 0", _v(c, p) is not None and _v(c, p) >= 0)
    outcomes.append(
        _outcome(
            "V2-sol(4)/inv(4)",
            PlaceClass.SDOUBLEPRIME,
            [str(p) for p in sdp],
            checks,
            frozenset({ZERO}),
            vacuous=not sdp,
        )
    )

    checks = _Checks()
    checks.add("b ∈ Z[1/2]", _in_z_half(b))
    checks.add("c ∈ Z[1/2]", _in_z_half(c))
    outcomes.append(
        _outcome(
            "V2-sol(5)/inv(4)",
            PlaceClass.OUTSIDE_SPRIME_FINITE,
            ["odd primes outside S′ ∪ S″"],
            checks,
            frozenset({ZERO}),
        )
    )

    checks = _Checks()
    if real_in_S:
        checks.add("a < 0", a < 0)
        checks.add("b < 0", b < 0)
        checks.add("c > 0", c > 0)
        checks.add("bc + 1 > 0", bc1 > 0)
    outcomes.append(
        _outcome(
            "V2-sol(6)/inv(5)",
            PlaceClass.S_ARCH,
            ["real"] if real_in_S else [],
            checks,
            frozenset({HALF}),
            vacuous=not real_in_S,
            note='the case hypothesis "A(P_v) = 0" is read as inv_v A(P_v) = 0',
        )
    )

    checks = _Checks()
    for p in s_fin:
        checks.add(f"v_{p}(a) is odd", valuation(a, p) % 2 == 1)
        checks.add(f"v_{p}(b) = 0", _v(b, p) == 0)
        checks.add(f"v_{p}(c) = 0", _v(c, p) == 0)
        checks.add(f"v_{p}(bc + 1) = v_{p}(a) + 2", _v(bc1, p) == valuation(a, p) + 2)
        checks.add(f"(a, b)_{p} = -1", _rule_symbol(a, b, p) == -1)
        checks.add(f"(a, q2(x))_{p} = (a, b)_{p} for units x", _dominated_by_b(a, b, bc1, p))
    outcomes.append(
        _outcome(
            "V2-sol(7)/inv(6)",
            PlaceClass.S_FINITE,
            [str(p) for p in s_fin],
            checks,
            frozenset({HALF}),
            vacuous=not s_fin,
        )
    )
    return outcomes


def expected_surface(kind: SurfaceKind, a: RationalLike, b: RationalLike, c: RationalLike) -> ChateletSurface:
    """V1: (c x^2 + 1)((1 + c b^2) x^2 + b^2); V2: (x^2 - c)(b x^2 - bc - 1)"""
    a, b, c = to_rational(a), to_rational(b), to_rational(c)
    if kind is SurfaceKind.V1:
        return ChateletSurface(a, EvenQuadratic.of(c, 1), EvenQuadratic.of(1 + c * b * b, b * b))
    return ChateletSurface(a, EvenQuadratic.of(1, -c), EvenQuadratic.of(b, -b * c - 1))


def evaluate_rules(V: ChateletSurface, kind: SurfaceKind, params: "ConstructionParams") -> List[RuleOutcome]:
    """All case outcomes, failing hypotheses included; never raises for a failed hypothesis"""
    a, b, c = params.a, params.b, params.c
    S = set(params.S)
    shape = _Checks()
    try:
        shape.add(f"surface has the {kind.value} shape for (a, b, c)", expected_surface(kind, a, b, c) == V)
    except (ValueError, SquareA):
        shape.add(f"surface has the {kind.value} shape for (a, b, c)", False)
    shape.add("2 ∉ S", Place.finite(2) not in S)
    shape.add("S ⊆ S′", S <= set(s_prime(a)))
    shape.add("recorded S′ matches a", set(params.S_prime) == set(s_prime(a)))
    expected_sdp = set(s_double_prime(b))
    shape.add("recorded S″ matches b", set(params.S_dprime) == expected_sdp)
    outcomes = [
        RuleOutcome(
            f"{kind.value.upper()}-shape", PlaceClass.INF_MINUS_SPRIME_OR_2ADIC, (), shape.frozen(), None, frozenset()
        )
    ]
    if kind is SurfaceKind.V1:
        outcomes += _v1_outcomes(V, a, b, c, S)
    else:
        outcomes += _v2_outcomes(V, a, b, c, S)
    return outcomes


def constancy_certificate(
    V: ChateletSurface, kind: SurfaceKind, params: "ConstructionParams"
) -> List[RuleOutcome]:
    """
    Check every case of the constancy proof for the kind's construction

    A full pass fixes the set of invariant values at every place of Q:
    finitely many classes cover all places, and each class is settled by
    hypotheses checked on the finitely many primes of a, b, c.

    Raises:
        RuleHypothesisFailed: at the first case whose hypothesis does not hold
    """
    outcomes = evaluate_rules(V, kind, params)
    for outcome in outcomes:
        failure = None if outcome.vacuous else outcome.first_failure()
        if failure is not None:
            raise RuleHypothesisFailed(outcome.case_id, failure.description)
    return outcomes


def outcome_for(outcomes: Sequence[RuleOutcome], place_class: PlaceClass) -> Optional[RuleOutcome]:
    for outcome in outcomes:
        if outcome.place_class is place_class and outcome.solvable is not None:
            return outcome
    return None
