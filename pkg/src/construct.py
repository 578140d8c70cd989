"""
Parameter selection for the two surface families

    V1: y^2 - a z^2 = (c x^2 + 1)((1 + c b^2) x^2 + b^2)
    V2: y^2 - a z^2 = (x^2 - c)(b x^2 - bc - 1)

Every local condition on a, b or c is turned into a congruence condition
and handed to the CRT scan in arith; the validators below re-check the
complete condition lists independently of how the values were found.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Set, Tuple

from arith import (
    CongruenceSystem,
    PrimeCondition,
    RationalLike,
    c_DEFAULT_MAX_ITERATIONS,
    crt_solve,
    format_rational,
    is_prime,
    is_rational_square,
    parse_rational,
    rational_primes,
    residue,
    square_class_test,
    to_rational,
    valuation,
)
from chatelet_local import ChateletSurface, SurfaceKind, expected_surface, s_double_prime, s_prime
from errors import Exhausted, Inconsistent, ParseError, SolverExhausted, SplitCheckFailed
from hilbert import hilbert_symbol
from places_fields import (
    NumberField,
    Place,
    c_DEFAULT_NONSQUARE_SEARCH,
    c_DEFAULT_PRIME_BOUND,
    find_split_primes,
    nonsquare_witness,
    place_splits_completely,
    splits_completely,
)

logger = logging.getLogger(__name__)

c_DEFAULT_INTERVAL_PERIODS = 64


@dataclass(frozen=True)
class ConstructionParams:
    kind: SurfaceKind
    L: NumberField
    S: Tuple[Place, ...]
    a: Fraction
    b: Fraction
    c: Fraction
    S_prime: Tuple[Place, ...]
    S_dprime: Tuple[Place, ...]
    v1: int
    v2: int

    def surface(self) -> ChateletSurface:
        return expected_surface(self.kind, self.a, self.b, self.c)

    def replace(self, **changes) -> "ConstructionParams":
        """Copy with some values changed; S′ and S″ follow a and b unless given"""
        values = {
            "kind": self.kind,
            "L": self.L,
            "S": self.S,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "v1": self.v1,
            "v2": self.v2,
        }
        values.update({k: v for k, v in changes.items() if k not in ("S_prime", "S_dprime")})
        values["a"], values["b"], values["c"] = (to_rational(values[k]) for k in ("a", "b", "c"))
        S_prime = changes.get("S_prime", tuple(s_prime(values["a"])))
        S_dprime = changes.get("S_dprime", tuple(s_double_prime(values["b"])))
        return ConstructionParams(S_prime=tuple(S_prime), S_dprime=tuple(S_dprime), **values)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "minpoly": [str(x) for x in self.L.serialize()],
            "S": [str(v) for v in self.S],
            "a": format_rational(self.a),
            "b": format_rational(self.b),
            "c": format_rational(self.c),
            "S_prime": [str(v) for v in self.S_prime],
            "S_dprime": [str(v) for v in self.S_dprime],
            "v1": str(self.v1),
            "v2": str(self.v2),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ConstructionParams":
        try:
            return cls(
                kind=SurfaceKind.parse(data["kind"]),
                L=NumberField.from_coefficients(int(x) for x in data["minpoly"]),
                S=tuple(Place.parse(v) for v in data["S"]),
                a=parse_rational(data["a"]),
                b=parse_rational(data["b"]),
                c=parse_rational(data["c"]),
                S_prime=tuple(Place.parse(v) for v in data["S_prime"]),
                S_dprime=tuple(Place.parse(v) for v in data["S_dprime"]),
                v1=int(data["v1"]),
                v2=int(data["v2"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"malformed params block: {e}") from e


@dataclass(frozen=True)
class ConditionCheck:
    condition: str
    passed: bool
    detail: str = ""


@dataclass
class ConditionReport:
    """Every checked condition in order, failures included"""

    checks: List[ConditionCheck] = field(default_factory=list)

    def add(self, condition: str, passed: bool, detail: str = "") -> None:
        self.checks.append(ConditionCheck(condition, bool(passed), detail))

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def __bool__(self) -> bool:
        return self.passed

    def failures(self) -> List[ConditionCheck]:
        return [check for check in self.checks if not check.passed]

    def failed_conditions(self) -> List[str]:
        return [check.condition for check in self.failures()]

    def to_json(self) -> list:
        return [[c.condition, c.passed, c.detail] for c in self.checks]


def _in_z_half(x: Fraction, extra: Iterable[int] = ()) -> bool:
    allowed = {2} | set(extra)
    return all(p in allowed for p in rational_primes(Fraction(x.denominator)))


def _v(x: Fraction, p: int) -> Optional[int]:
    return None if x == 0 else valuation(x, p)


def _finite(places: Iterable[Place]) -> List[int]:
    return sorted(v.prime for v in places if not v.is_real)


def check_places(L: NumberField, S: Iterable[Place]) -> Tuple[Place, ...]:
    """
    Normalize S and require every member to split completely in L

    Raises:
        Inconsistent: 2 ∈ S
        SplitCheckFailed: a member of S does not split completely (or ramifies)
    """
    places = tuple(sorted(set(S)))
    for v in places:
        if not v.is_real and v.prime == 2:
            raise Inconsistent("S may not contain the prime 2")
        if not place_splits_completely(v, L):
            if v.is_real:
                raise SplitCheckFailed(f"the real place splits completely only in totally real fields; {L} is not")
            status = splits_completely(v.prime, L).status.value
            raise SplitCheckFailed(f"{v} does not split completely in Q[x]/({L}): {status}")
    return places


def _check_auxiliary(L: NumberField, p: int, avoid: Set[int], name: str) -> None:
    if p in avoid or p == 2:
        raise Inconsistent(f"{name} = {p} must avoid {sorted(avoid | {2})}")
    if not place_splits_completely(Place.finite(p), L):
        raise SplitCheckFailed(f"{name} = {p} does not split completely in Q[x]/({L})")


def _choose_v1_v2(
    L: NumberField, avoid: Set[int], v1: Optional[int], v2: Optional[int], prime_bound: int
) -> Tuple[int, int]:
    if v1 is not None:
        _check_auxiliary(L, v1, avoid, "v1")
    if v2 is not None:
        _check_auxiliary(L, v2, avoid, "v2")
    if v1 is not None and v2 is not None:
        if v1 == v2:
            raise Inconsistent("v1 and v2 must differ")
        return v1, v2
    pinned = {p for p in (v1, v2) if p is not None}
    try:
        free = find_split_primes(L, 2 - len(pinned), avoid=avoid | pinned, prime_bound=prime_bound)
    except Exhausted as e:
        raise SolverExhausted(str(e)) from e
    if v1 is None:
        v1 = free.pop(0)
    if v2 is None:
        v2 = free.pop(0)
    return v1, v2


def _solve(system: CongruenceSystem, what: str, max_iterations: int) -> Fraction:
    try:
        value = crt_solve(system, max_iterations=max_iterations)
    except Exhausted as e:
        raise SolverExhausted(f"{what}: {e}") from e
    logger.debug("%s = %s", what, value)
    return value


# --- a --------------------------------------------------------------------------


def validate_a(
    a: RationalLike,
    S: Iterable[Place],
    L: NumberField,
    search_count: int = c_DEFAULT_NONSQUARE_SEARCH,
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
    report: Optional[ConditionReport] = None,
) -> ConditionReport:
    """The conditions on a: sign at real places of S, square at 2, odd valuation on S, a ∉ L^2"""
    report = report if report is not None else ConditionReport()
    a = to_rational(a)
    S = set(S)
    if a == 0:
        report.add("a ≠ 0", False)
        return report
    report.add("a ∈ Z", a.denominator == 1)
    report.add("a is not a rational square", not is_rational_square(a))
    if Place.real() in S:
        report.add("a < 0", a < 0)
    report.add("a ∈ Q_2^×2", square_class_test(a, 2))
    for p in _finite(S):
        report.add(f"v_{p}(a) is odd", valuation(a, p) % 2 == 1, f"v_{p}(a) = {valuation(a, p)}")
    witness = nonsquare_witness(a, S | set(s_prime(a)), L, search_count, prime_bound)
    report.add("a ∉ L^2", witness is not None, f"non-square at split place {witness}" if witness else "")
    return report


def choose_a(
    S: Iterable[Place],
    L: NumberField,
    *,
    max_iterations: int = c_DEFAULT_MAX_ITERATIONS,
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
    search_count: int = c_DEFAULT_NONSQUARE_SEARCH,
) -> Fraction:
    """
    Smallest a = sign * prod(S) * a' with a' > 0 prime to S and a ≡ 1 mod 8

    For S = ∅ the smallest odd prime splitting completely in L stands in
    for S while a is chosen.

    Raises:
        SplitCheckFailed: a member of S does not split completely in L
        SolverExhausted: no admissible a' within max_iterations candidates
    """
    S = check_places(L, S)
    anchor: Tuple[Place, ...] = S
    if not anchor:
        try:
            anchor = (Place.finite(find_split_primes(L, 1, prime_bound=prime_bound)[0]),)
        except Exhausted as e:
            raise SolverExhausted(str(e)) from e
        logger.debug("S is empty; choosing a from the split place %s", anchor[0])

    sign = -1 if Place.real() in anchor else 1
    base = math.prod(_finite(anchor))
    conditions = [PrimeCondition.residue_in(2, 3, [residue(Fraction(1, sign * base), 8)], "a ≡ 1 mod 8")]
    conditions += [PrimeCondition.residue_in(p, 1, range(1, p), f"v_{p}(a) = 1") for p in _finite(anchor)]

    lower = Fraction(0)
    for _ in range(max_iterations):
        system = CongruenceSystem(tuple(conditions), sign=1, interval=(lower, None))
        cofactor = _solve(system, "cofactor of a", max_iterations)
        a = sign * base * cofactor
        if not is_rational_square(a) and nonsquare_witness(a, anchor, L, search_count, prime_bound) is not None:
            logger.debug("a = %s for S = %s", a, [str(v) for v in S])
            return a
        lower = cofactor
    raise SolverExhausted(f"no admissible a within {max_iterations} candidates")


def _resolve_a(
    a: Optional[RationalLike], S: Tuple[Place, ...], L: NumberField, max_iterations: int, prime_bound: int, search_count: int
) -> Fraction:
    if a is None:
        return choose_a(S, L, max_iterations=max_iterations, prime_bound=prime_bound, search_count=search_count)
    report = validate_a(a, S, L, search_count, prime_bound)
    if not report:
        raise Inconsistent(f"a = {a} fails: {', '.join(report.failed_conditions())}")
    return to_rational(a)


# --- V1 -------------------------------------------------------------------------


def build_v1(
    L: NumberField,
    S: Iterable[Place],
    *,
    a: Optional[RationalLike] = None,
    v1: Optional[int] = None,
    v2: Optional[int] = None,
    max_iterations: int = c_DEFAULT_MAX_ITERATIONS,
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
    search_count: int = c_DEFAULT_NONSQUARE_SEARCH,
) -> Tuple[ChateletSurface, ConstructionParams]:
    """
    Choose (a, b, c, v1, v2) for V1 over L with distinguished places S

    b is the S-unit prod_{S′ \\ S} p^v(a) / prod_S p^v(a); c solves the
    residue conditions at S, v1, v2 and the sign conditions at the real place.

    Raises:
        SplitCheckFailed: a member of S (or a pinned v1, v2) does not split completely
        Inconsistent: a pinned value violates its conditions
        SolverExhausted: the c scan gave up
    """
    S = check_places(L, S)
    a = _resolve_a(a, S, L, max_iterations, prime_bound, search_count)
    S_prime = tuple(s_prime(a))
    members = set(S)

    b = Fraction(1)
    for p in _finite(S_prime):
        e = valuation(a, p)
        b *= Fraction(p) ** (-e if Place.finite(p) in members else e)
    S_dprime = tuple(s_double_prime(b))
    v1, v2 = _choose_v1_v2(L, set(_finite(S_dprime)), v1, v2, prime_bound)

    b2 = b * b
    conditions = [PrimeCondition.legendre_sign(p, -1, f"(a, c)_{p} = -1, v_{p}(c) = 0") for p in _finite(S)]
    conditions.append(PrimeCondition.valuation_equals(v1, 1, f"v_{v1}(c) = 1"))
    conditions.append(PrimeCondition.affine_valuation(v2, 1, slope=b2, offset=1, label=f"v_{v2}(1 + c b^2) = 1"))
    sign = None
    interval = None
    if Place.real() in members:
        interval = (None, -1 / b2)
    elif Place.real() in S_prime:
        sign = 1
    c = _solve(CongruenceSystem(tuple(conditions), sign=sign, interval=interval), "c for V1", max_iterations)

    params = ConstructionParams(SurfaceKind.V1, L, S, a, b, c, S_prime, S_dprime, v1, v2)
    report = validate_params_v1(params, search_count=search_count, prime_bound=prime_bound)
    if not report:
        raise Inconsistent(f"V1 parameters fail: {', '.join(report.failed_conditions())}")
    return params.surface(), params


def _report_common(report: ConditionReport, params: ConstructionParams, search_count: int, prime_bound: int) -> None:
    S = set(params.S)
    report.add("2 ∉ S", Place.finite(2) not in S)
    for v in sorted(S):
        report.add(f"{v} splits completely in L", place_splits_completely(v, params.L))
    validate_a(params.a, S, params.L, search_count, prime_bound, report)
    if params.a != 0:
        report.add("S′ = {real if a < 0} ∪ {odd p : v_p(a) odd}", set(params.S_prime) == set(s_prime(params.a)))
    if params.b != 0:
        report.add("S″ = {odd p : v_p(b) ≠ 0}", set(params.S_dprime) == set(s_double_prime(params.b)))


def _report_auxiliary(report: ConditionReport, params: ConstructionParams, avoid: Set[int]) -> None:
    v1, v2 = params.v1, params.v2
    report.add("v1 ≠ v2", v1 != v2)
    for name, p in (("v1", v1), ("v2", v2)):
        report.add(f"{name} = {p} is an odd prime outside {sorted(avoid)}", p != 2 and p not in avoid and p > 2)
        report.add(f"{name} = {p} splits completely in L", p > 2 and is_prime(p) and place_splits_completely(Place.finite(p), params.L))


def validate_params_v1(
    params: ConstructionParams,
    *,
    search_count: int = c_DEFAULT_NONSQUARE_SEARCH,
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
) -> ConditionReport:
    """Check every condition on a, b and c for V1; never raises for a failed condition"""
    report = ConditionReport()
    report.add("kind is v1", params.kind is SurfaceKind.V1)
    a, b, c = params.a, params.b, params.c
    if a == 0 or b == 0 or c == 0:
        report.add("a, b, c ≠ 0", False)
        return report
    _report_common(report, params, search_count, prime_bound)
    S = set(params.S)
    Sp = set(s_prime(a))
    s_fin = _finite(S)

    report.add("b ∈ Z[1/2, 1/S]", _in_z_half(b, s_fin), f"b = {b}")
    for p in s_fin:
        report.add(f"v_{p}(b) = -v_{p}(a)", _v(b, p) == -valuation(a, p), f"v_{p}(b) = {_v(b, p)}")
    for p in _finite(Sp - S):
        report.add(f"v_{p}(b) = v_{p}(a)", _v(b, p) == valuation(a, p), f"v_{p}(b) = {_v(b, p)}")

    report.add("c ∈ Z[1/2]", _in_z_half(c), f"c = {c}")
    if Place.real() in S:
        report.add("1 + c b^2 < 0", 1 + c * b * b < 0)
    elif Place.real() in Sp:
        report.add("c > 0", c > 0)
    for p in s_fin:
        report.add(f"v_{p}(c) = 0", _v(c, p) == 0)
        report.add(f"(a, c)_{p} = -1", hilbert_symbol(a, c, p) == -1)

    _report_auxiliary(report, params, set(_finite(s_double_prime(b))))
    v1, v2 = params.v1, params.v2
    q2_const = 1 + c * b * b
    report.add(f"v_{v1}(c) = 1", _v(c, v1) == 1, "x^2 + c is Eisenstein at v1")
    report.add(
        f"v_{v2}(1 + c b^2) = 1",
        q2_const != 0 and _v(q2_const, v2) == 1 and _v(b, v2) == 0,
        "b^2 x^2 + (1 + c b^2) is Eisenstein at v2",
    )
    return report


# --- V2 -------------------------------------------------------------------------


def _interval_denominator(conditions: Sequence[PrimeCondition], width: Fraction, periods: int) -> int:
    """Smallest 2^k such that (0, width) holds `periods` full periods of the c progression"""
    modulus = math.prod(cond.modulus for cond in CongruenceSystem(tuple(conditions)).merged().values())
    d = 1
    while width * d < periods * modulus:
        d *= 2
    return d


def build_v2(
    L: NumberField,
    S: Iterable[Place],
    *,
    a: Optional[RationalLike] = None,
    v1: Optional[int] = None,
    v2: Optional[int] = None,
    max_iterations: int = c_DEFAULT_MAX_ITERATIONS,
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
    interval_periods: int = c_DEFAULT_INTERVAL_PERIODS,
    search_count: int = c_DEFAULT_NONSQUARE_SEARCH,
) -> Tuple[ChateletSurface, ConstructionParams]:
    """
    Choose (a, b, c, v1, v2) for V2 over L with distinguished places S

    b is the smallest integer whose Legendre symbols are -1 on S and +1 on
    S′ \\ S; c solves v(bc + 1) = v(a) + 2 on S′, units on S″, the Eisenstein
    conditions at v1, v2 and the real conditions. When the real place is in
    S, c = c' / 2^k lies in (0, -1/b) with 2^k chosen so the interval holds
    `interval_periods` periods of the progression.

    Raises:
        SplitCheckFailed: a member of S (or a pinned v1, v2) does not split completely
        Inconsistent: a pinned value violates its conditions
        SolverExhausted: the b or c scan gave up
    """
    S = check_places(L, S)
    a = _resolve_a(a, S, L, max_iterations, prime_bound, search_count)
    S_prime = tuple(s_prime(a))
    members = set(S)
    sp_fin = _finite(S_prime)

    b_conditions = [
        PrimeCondition.legendre_sign(p, -1 if Place.finite(p) in members else 1, f"(a, b)_{p}, v_{p}(b) = 0")
        for p in sp_fin
    ]
    b_sign = None
    if Place.real() in members:
        b_sign = -1
    elif Place.real() in S_prime:
        b_sign = 1
    b = _solve(CongruenceSystem(tuple(b_conditions), sign=b_sign), "b for V2", max_iterations)
    S_dprime = tuple(s_double_prime(b))
    v1, v2 = _choose_v1_v2(L, set(sp_fin) | set(_finite(S_dprime)), v1, v2, prime_bound)

    conditions = [
        PrimeCondition.affine_valuation(p, valuation(a, p) + 2, slope=b, offset=1, label=f"v_{p}(bc + 1) = v_{p}(a) + 2")
        for p in sp_fin
    ]
    conditions += [PrimeCondition.residue_in(p, 1, range(1, p), f"(a, c)_{p} = 1") for p in _finite(S_dprime)]
    conditions.append(PrimeCondition.valuation_equals(v1, 1, f"v_{v1}(c) = 1"))
    conditions.append(PrimeCondition.affine_valuation(v2, 1, slope=b, offset=1, label=f"v_{v2}(bc + 1) = 1"))

    denominator = 1
    interval = None
    if Place.real() in members:
        interval = (Fraction(0), -1 / b)
        denominator = _interval_denominator(conditions, -1 / b, interval_periods)
    elif Place.real() in S_prime:
        interval = (None, -1 / b)
    system = CongruenceSystem(tuple(conditions), interval=interval, denominator=denominator)
    c = _solve(system, "c for V2", max_iterations)

    params = ConstructionParams(SurfaceKind.V2, L, S, a, b, c, S_prime, S_dprime, v1, v2)
    report = validate_params_v2(params, search_count=search_count, prime_bound=prime_bound)
    if not report:
        raise Inconsistent(f"V2 parameters fail: {', '.join(report.failed_conditions())}")
    return params.surface(), params


def validate_params_v2(
    params: ConstructionParams,
    *,
    search_count: int = c_DEFAULT_NONSQUARE_SEARCH,
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
) -> ConditionReport:
    """Check every condition on a, b and c for V2; never raises for a failed condition"""
    report = ConditionReport()
    report.add("kind is v2", params.kind is SurfaceKind.V2)
    a, b, c = params.a, params.b, params.c
    if a == 0 or b == 0 or c == 0:
        report.add("a, b, c ≠ 0", False)
        return report
    _report_common(report, params, search_count, prime_bound)
    S = set(params.S)
    Sp = set(s_prime(a))
    Sdp = set(s_double_prime(b))
    report.add("S′ ∩ S″ = ∅", not (Sp & Sdp))

    report.add("b ∈ Z[1/2]", _in_z_half(b), f"b = {b}")
    if Place.real() in S:
        report.add("b < 0", b < 0)
    elif Place.real() in Sp:
        report.add("b > 0", b > 0)
    for p in _finite(S):
        report.add(f"v_{p}(b) = 0", _v(b, p) == 0)
        report.add(f"(a, b)_{p} = -1", hilbert_symbol(a, b, p) == -1)
    for p in _finite(Sp - S):
        report.add(f"v_{p}(b) = 0", _v(b, p) == 0)
        report.add(f"(a, b)_{p} = +1", hilbert_symbol(a, b, p) == 1)

    bc1 = b * c + 1
    report.add("c ∈ Z[1/2]", _in_z_half(c), f"c = {c}")
    if Place.real() in S:
        report.add("0 < c < -1/b", b < 0 and 0 < c < -1 / b)
    elif Place.real() in Sp:
        report.add("bc + 1 < 0", bc1 < 0)
    for p in _finite(Sp):
        report.add(
            f"v_{p}(bc + 1) = v_{p}(a) + 2",
            _v(bc1, p) == valuation(a, p) + 2,
            f"v_{p}(bc + 1) = {_v(bc1, p)}, v_{p}(a) = {valuation(a, p)}",
        )
    for p in _finite(Sdp):
        report.add(f"(a, c)_{p} = +1", hilbert_symbol(a, c, p) == 1)

    _report_auxiliary(report, params, set(_finite(Sp | Sdp)))
    v1, v2 = params.v1, params.v2
    report.add(f"v_{v1}(c) = 1", _v(c, v1) == 1, "x^2 - c is Eisenstein at v1")
    report.add(
        f"v_{v2}(bc + 1) = 1",
        bc1 != 0 and _v(bc1, v2) == 1 and _v(b, v2) == 0,
        "b x^2 - (bc + 1) is Eisenstein at v2",
    )
    return report


def validate_params(params: ConstructionParams, **kwargs) -> ConditionReport:
    if params.kind is SurfaceKind.V1:
        return validate_params_v1(params, **kwargs)
    return validate_params_v2(params, **kwargs)


def build(kind: SurfaceKind, L: NumberField, S: Iterable[Place], **kwargs) -> Tuple[ChateletSurface, ConstructionParams]:
    if kind is SurfaceKind.V1:
        kwargs.pop("interval_periods", None)  # V1 has no bounded interval
        return build_v1(L, S, **kwargs)
    return build_v2(L, S, **kwargs)
