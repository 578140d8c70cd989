"""
Certificates - assemble, serialize and independently re-verify the local
invariant profile of a constructed surface, and derive verdicts over Q or
over a field in which every place of S splits completely
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import primerange

from arith import format_rational, valuation
from chatelet_local import (
    BOTH,
    HALF,
    ZERO,
    ChateletSurface,
    InvariantSearch,
    PlaceClass,
    RuleOutcome,
    SearchBounds,
    SurfaceKind,
    Witness,
    XCoordinate,
    classify_place,
    constancy_certificate,
    evaluate_invariant,
    evaluate_rules,
    format_invariant,
    invariant_set,
    local_solvable,
    outcome_for,
)
from construct import ConditionReport, ConstructionParams, build, validate_params
from errors import (
    ChateletError,
    ConstancyNotProven,
    Inconsistent,
    NotLocallySolvable,
    ParseError,
    RuleHypothesisFailed,
    SplitCheckFailed,
)
from hilbert import hilbert_symbol
from places_fields import (
    NumberField,
    Place,
    c_DEFAULT_NONSQUARE_SEARCH,
    c_DEFAULT_PRIME_BOUND,
    nonsquare_witness,
    place_splits_completely,
    split_count,
    splits_completely,
)

logger = logging.getLogger(__name__)

c_CERTIFICATE_VERSION = "chatelet-certificate/1"
c_DEFAULT_SAMPLE_PRIME_BOUND = 100

c_ONLY_OBSTRUCTION = (
    "For Chatelet surfaces the Brauer-Manin obstruction to the Hasse principle and to weak approximation "
    "is the only one (Colliot-Thelene, Sansuc, Swinnerton-Dyer 1987); used, not proven here"
)
c_RECIPROCITY = "The local invariants of a global Brauer class sum to 0 in Q/Z at every rational point"
c_SPLITTING = "Above a place splitting completely in L' every completion of L' equals the completion of Q"
c_INTERMEDIATE = "The field is taken on trust to lie between Q and L; intermediacy is not checked"

_REQUIRED_KEYS = (
    "version",
    "kind",
    "params",
    "surface",
    "conditions",
    "rules",
    "irreducibility",
    "places",
    "reciprocity_sum",
    "rational_point",
    "verdict",
    "search",
    "provenance",
)


def canonical_json(document: Any) -> bytes:
    """Sorted keys, no whitespace, UTF-8"""
    return json.dumps(document, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def digest(document: Any) -> str:
    return hashlib.sha256(canonical_json(document)).hexdigest()


# --- verdicts -------------------------------------------------------------------


class HPStatus(Enum):
    HP_COUNTEREXAMPLE = "HPCounterexample"
    HAS_RATIONAL_POINT = "HasRationalPoint"
    NOT_APPLICABLE = "NotApplicable"


class WAStatus(Enum):
    FAILS_WA = "FailsWA"
    SATISFIES_WA = "SatisfiesWA"
    SATISFIES_WA_OFF = "SatisfiesWA_off"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class Verdict:
    field: NumberField
    hp: HPStatus
    wa: WAStatus
    off: Tuple[Place, ...] = ()
    places_above_S: int = 0
    provenance: Tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "field": [str(x) for x in self.field.serialize()],
            "hp": self.hp.value,
            "wa": self.wa.value,
            "off": [str(v) for v in self.off],
            "places_above_S": self.places_above_S,
            "provenance": list(self.provenance),
        }


# --- certificate ----------------------------------------------------------------


@dataclass(frozen=True)
class PlaceRecord:
    place: Place
    place_class: PlaceClass
    case_id: str
    claim: frozenset
    solvable_x: Optional[XCoordinate]
    search: Optional[InvariantSearch]

    @property
    def values(self) -> frozenset:
        return self.search.values if self.search is not None else frozenset()

    @property
    def consistent(self) -> bool:
        return self.search is not None and self.values == self.claim

    def to_json(self) -> dict:
        return {
            "place": str(self.place),
            "class": self.place_class.value,
            "case_id": self.case_id,
            "claim": [format_invariant(x) for x in sorted(self.claim)],
            "solvable_x": self.solvable_x.serialize() if self.solvable_x is not None else None,
            "invariant_set": [format_invariant(x) for x in sorted(self.values)],
            "witnesses": [w.to_json() for w in self.search.witnesses] if self.search is not None else [],
        }


@dataclass
class Certificate:
    params: ConstructionParams
    surface: ChateletSurface
    conditions: ConditionReport
    rules: List[RuleOutcome]
    irreducibility: Dict[str, Any]
    places: List[PlaceRecord]
    reciprocity_sum: Fraction
    rational_point: Optional[Dict[str, Any]]
    bounds: SearchBounds
    sample_prime_bound: int
    verdict: Optional[Verdict] = None
    version: str = c_CERTIFICATE_VERSION

    @property
    def kind(self) -> SurfaceKind:
        return self.params.kind

    def passes(self) -> bool:
        return (
            self.conditions.passed
            and all(rule.passed for rule in self.rules)
            and all(record.consistent for record in self.places)
            and self.irreducibility.get("holds", False)
        )

    def record(self, v: Place) -> Optional[PlaceRecord]:
        return next((r for r in self.places if r.place == v), None)

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "kind": self.kind.value,
            "params": self.params.to_json(),
            "surface": self.surface.to_json(),
            "conditions": self.conditions.to_json(),
            "rules": [rule.to_json() for rule in self.rules],
            "irreducibility": self.irreducibility,
            "places": [record.to_json() for record in self.places],
            "reciprocity_sum": format_invariant(self.reciprocity_sum),
            "rational_point": self.rational_point,
            "verdict": self.verdict.to_json() if self.verdict is not None else None,
            "search": {**self.bounds.to_json(), "sample_prime_bound": self.sample_prime_bound},
            "provenance": [c_ONLY_OBSTRUCTION, c_RECIPROCITY, c_SPLITTING],
        }

    def serialize(self) -> bytes:
        return canonical_json(self.to_json())


def recorded_places(params: ConstructionParams, sample_prime_bound: int) -> List[Place]:
    """S ∪ S′ ∪ S″ ∪ {v1, v2, 2, real} and the primes below the sample bound"""
    places = set(params.S) | set(params.S_prime) | set(params.S_dprime)
    places |= {Place.finite(params.v1), Place.finite(params.v2), Place.finite(2), Place.real()}
    places |= {Place.finite(int(p)) for p in primerange(2, sample_prime_bound)}
    return sorted(places)


def _irreducibility(
    params: ConstructionParams, search_count: int, prime_bound: int
) -> Dict[str, Any]:
    """Eisenstein primes for both factors, split reports of v1, v2, and the place certifying a ∉ L^2"""
    a, b, c = params.a, params.b, params.c
    if params.kind is SurfaceKind.V1:
        q1_value, q2_value = c, 1 + c * b * b
        q1_text, q2_text = "c", "1 + c b^2"
    else:
        q1_value, q2_value = c, b * c + 1
        q1_text, q2_text = "c", "bc + 1"

    def factor_evidence(p: int, value: Fraction, text: str, root_square: Fraction) -> dict:
        v_value = valuation(value, p) if value != 0 else None
        v_a = valuation(a, p)
        v_root = valuation(root_square, p) if root_square != 0 else None
        return {
            "eisenstein_prime": str(p),
            "valuation": f"v_{p}({text}) = {v_value}",
            "eisenstein": v_value == 1 and valuation(b, p) == 0,
            # Q(sqrt a) is unramified at p while the factor's quadratic field ramifies
            "differs_from_Q(sqrt a)": v_a % 2 == 0 and v_root is not None and v_root % 2 == 1,
        }

    V = params.surface()
    q1 = factor_evidence(params.v1, q1_value, q1_text, -V.q1.const / V.q1.lead)
    q2 = factor_evidence(params.v2, q2_value, q2_text, -V.q2.const / V.q2.lead)
    split_v1 = splits_completely(params.v1, params.L)
    split_v2 = splits_completely(params.v2, params.L)
    witness = nonsquare_witness(a, set(params.S) | set(params.S_prime), params.L, search_count, prime_bound)
    holds = (
        q1["eisenstein"]
        and q2["eisenstein"]
        and q1["differs_from_Q(sqrt a)"]
        and q2["differs_from_Q(sqrt a)"]
        and witness is not None
        and split_v1.status.value == "splits"
        and split_v2.status.value == "splits"
    )
    return {
        "q1": q1,
        "q2": q2,
        "v1": split_v1.to_json(),
        "v2": split_v2.to_json(),
        "a_not_square_in_L_at": str(witness) if witness is not None else None,
        "holds": bool(holds),
    }


def _rational_point(V: ChateletSurface, params: ConstructionParams, places: Sequence[Place]) -> Optional[dict]:
    if params.kind is not SurfaceKind.V1:
        return None
    origin = XCoordinate.at(0)
    total = sum((evaluate_invariant(V, v, origin) for v in places), Fraction(0)) % 1
    return {
        "x": "0",
        "y": format_rational(params.b),
        "z": "0",
        "on_surface": V.P(Fraction(0)) == params.b * params.b,
        "invariant_sum": format_invariant(total),
    }


def _assemble(
    V: ChateletSurface,
    params: ConstructionParams,
    rules: List[RuleOutcome],
    conditions: ConditionReport,
    bounds: SearchBounds,
    sample_prime_bound: int,
    search_count: int,
    prime_bound: int,
    strict: bool,
) -> Certificate:
    places = recorded_places(params, sample_prime_bound)
    records = []
    for v in places:
        place_class = classify_place(v, params.a, params.b, params.S, params.kind)
        outcome = outcome_for(rules, place_class)
        case_id = outcome.case_id if outcome is not None else "none"
        claim = outcome.invariant_claim if outcome is not None else frozenset()
        solvable, x = local_solvable(V, v, bounds, rule=outcome)
        search = None
        if solvable:
            try:
                search = invariant_set(V, v, bounds)
            except NotLocallySolvable:
                search = None
        record = PlaceRecord(v, place_class, case_id, claim, x, search)
        if strict and not record.consistent:
            raise RuleHypothesisFailed(
                case_id, f"local search at {v} found {sorted(record.values)}, rules claim {sorted(claim)}"
            )
        records.append(record)

    constant = [next(iter(r.values)) for r in records if len(r.values) == 1]
    reciprocity_sum = sum(constant, Fraction(0)) % 1
    cert = Certificate(
        params=params,
        surface=V,
        conditions=conditions,
        rules=rules,
        irreducibility=_irreducibility(params, search_count, prime_bound),
        places=records,
        reciprocity_sum=reciprocity_sum,
        rational_point=_rational_point(V, params, places),
        bounds=bounds,
        sample_prime_bound=sample_prime_bound,
    )
    if cert.passes():
        cert.verdict = verdict_hp(cert) if params.kind is SurfaceKind.V2 else verdict_wa(cert)
    elif strict:
        raise ConstancyNotProven("certificate does not pass its own checks")
    return cert


def make_certificate(
    V: ChateletSurface,
    kind: SurfaceKind,
    params: ConstructionParams,
    L: Optional[NumberField] = None,
    *,
    bounds: SearchBounds = SearchBounds(),
    sample_prime_bound: int = c_DEFAULT_SAMPLE_PRIME_BOUND,
    search_count: int = c_DEFAULT_NONSQUARE_SEARCH,
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
) -> Certificate:
    """
    Run the constancy prover, the validator and the local searches and bundle the results

    Raises:
        RuleHypothesisFailed: a rule case fails, a validator condition fails
            (case id "params"), or a local search contradicts the rules
    """
    if kind is not params.kind:
        raise Inconsistent(f"surface kind {kind.value} does not match params kind {params.kind.value}")
    if L is not None and L != params.L:
        raise Inconsistent(f"field {L} does not match params field {params.L}")
    rules = constancy_certificate(V, kind, params)
    conditions = validate_params(params, search_count=search_count, prime_bound=prime_bound)
    failures = conditions.failed_conditions()
    if failures:
        raise RuleHypothesisFailed("params", failures[0])
    cert = _assemble(V, params, rules, conditions, bounds, sample_prime_bound, search_count, prime_bound, True)
    logger.debug("certificate for %s assembled over %d places", kind.value, len(cert.places))
    return cert


def _check_field(cert: Certificate, F: NumberField) -> int:
    """#S_F, after checking that every place of S splits completely in F"""
    for v in cert.params.S:
        if v.is_real and F.degree > 1:
            raise SplitCheckFailed(
                "the real place is in S: counting places of a field of degree > 1 above it is not supported"
            )
        if not place_splits_completely(v, F):
            raise SplitCheckFailed(f"{v} does not split completely in Q[x]/({F})")
    return split_count(cert.params.S, F)


def _case_ids(cert: Certificate) -> str:
    return ", ".join(rule.case_id for rule in cert.rules if rule.solvable is not None)


def _require_passing(cert: Certificate, kind: SurfaceKind) -> None:
    if cert.kind is not kind:
        raise Inconsistent(f"this verdict needs a {kind.value} certificate, got {cert.kind.value}")
    if not cert.passes():
        raise ConstancyNotProven("the certificate does not pass; no verdict")


def verdict_hp(cert: Certificate, field: Optional[NumberField] = None) -> Verdict:
    """
    Hasse principle over Q or over a field F ⊆ L

    Over F the invariant is 1/2 at each of the #S·[F:Q] places above S and 0
    elsewhere on every adelic point, so the sum is #S·[F:Q] / 2: an odd count
    leaves no point orthogonal to Br, an even count leaves all of them.

    Raises:
        SplitCheckFailed: a place of S does not split completely in F
        ConstancyNotProven: the certificate does not pass
    """
    _require_passing(cert, SurfaceKind.V2)
    F = field if field is not None else NumberField.rationals()
    count = _check_field(cert, F)
    provenance = [
        f"local invariants: 1/2 on S, 0 elsewhere (rules {_case_ids(cert)})",
        f"#S_F = #S·[F:Q] = {len(cert.params.S)}·{F.degree} = {count}",
        c_SPLITTING,
        c_RECIPROCITY,
        c_ONLY_OBSTRUCTION,
    ]
    if field is not None:
        provenance.append(c_INTERMEDIATE)
    if count % 2:
        return Verdict(F, HPStatus.HP_COUNTEREXAMPLE, WAStatus.NOT_APPLICABLE, (), count, tuple(provenance))
    return Verdict(F, HPStatus.HAS_RATIONAL_POINT, WAStatus.SATISFIES_WA, (), count, tuple(provenance))


def verdict_wa(cert: Certificate, field: Optional[NumberField] = None, T: Iterable[Place] = ()) -> Verdict:
    """
    Weak approximation off T over Q or over a field F ⊆ L

    T lists places of Q; a member stands for a place of F above it. With S
    nonempty the surface satisfies weak approximation off T iff T meets S.

    Raises:
        SplitCheckFailed: a place of S does not split completely in F
        ConstancyNotProven: the certificate does not pass
    """
    _require_passing(cert, SurfaceKind.V1)
    F = field if field is not None else NumberField.rationals()
    count = _check_field(cert, F)
    off = tuple(sorted(set(T)))
    provenance = [
        f"local invariants: 0 and 1/2 both occur on S, constant 0 elsewhere (rules "
        f"{_case_ids(cert)})",
        "rational point (0, b, 0)",
        c_SPLITTING,
        c_RECIPROCITY,
        c_ONLY_OBSTRUCTION,
    ]
    if field is not None:
        provenance.append(c_INTERMEDIATE)
    S = set(cert.params.S)
    if not S:
        wa = WAStatus.SATISFIES_WA
    elif S & set(off):
        wa = WAStatus.SATISFIES_WA_OFF
    else:
        wa = WAStatus.FAILS_WA
    return Verdict(F, HPStatus.HAS_RATIONAL_POINT, wa, off, count, tuple(provenance))


# --- verification ---------------------------------------------------------------


@dataclass(frozen=True)
class Mismatch:
    path: str
    expected: Any
    found: Any

    def __str__(self) -> str:
        return f"{self.path}: expected {self.expected!r}, found {self.found!r}"


def witness_mismatches(w: Witness, v: Place) -> List[Mismatch]:
    """Factor symbols of a point must multiply to its norm symbol, and agree since that norm is +1"""
    s1, s2 = w.factor_symbols
    if s1 is None or s2 is None:
        return []
    path = f"witness {w.x} at {v}"
    found = []
    if s1 * s2 != w.norm_symbol:
        found.append(Mismatch(path, f"(a, q1)(a, q2) = (a, P) = {w.norm_symbol}", [s1, s2]))
    if s1 != s2:
        found.append(Mismatch(path, "equal factor symbols", [s1, s2]))
    return found


@dataclass
class VerificationReport:
    mismatches: List[Mismatch] = field(default_factory=list)
    passes: bool = False

    @property
    def ok(self) -> bool:
        return self.passes and not self.mismatches

    def to_json(self) -> dict:
        return {"ok": self.ok, "passes": self.passes, "mismatches": [str(m) for m in self.mismatches]}


def _diff(expected: Any, found: Any, path: str, out: List[Mismatch]) -> None:
    if isinstance(expected, dict) and isinstance(found, dict):
        for key in sorted(set(expected) | set(found)):
            sub = f"{path}.{key}" if path else key
            if key not in found:
                out.append(Mismatch(sub, expected[key], None))
            elif key not in expected:
                out.append(Mismatch(sub, None, found[key]))
            else:
                _diff(expected[key], found[key], sub, out)
        return
    if isinstance(expected, list) and isinstance(found, list):
        if len(expected) != len(found):
            out.append(Mismatch(f"{path}.length", len(expected), len(found)))
        for i, (e, f) in enumerate(zip(expected, found)):
            _diff(e, f, f"{path}[{i}]", out)
        return
    if expected != found:
        out.append(Mismatch(path, expected, found))


def parse_document(serialized: Union[str, bytes, dict]) -> dict:
    if isinstance(serialized, dict):
        document = serialized
    else:
        try:
            document = json.loads(serialized)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise ParseError(f"certificate is not valid JSON: {e}") from e
    if not isinstance(document, dict):
        raise ParseError("certificate must be a JSON object")
    missing = [key for key in _REQUIRED_KEYS if key not in document]
    if missing:
        raise ParseError(f"certificate is missing {missing}")
    if document["version"] != c_CERTIFICATE_VERSION:
        raise ParseError(f"unsupported certificate version {document['version']!r}")
    search = document["search"]
    if not isinstance(search, dict):
        raise ParseError("search block must be an object")
    return document


def _bounds_from(document: dict) -> Tuple[SearchBounds, int]:
    search = document["search"]
    try:
        depth = search.get("depth")
        bounds = SearchBounds(
            unit_bound=int(search["unit_bound"]),
            extra_depth=int(search["extra_depth"]),
            depth=int(depth) if depth is not None else None,
        )
        return bounds, int(search["sample_prime_bound"])
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed search block: {e}") from e


def recompute(
    document: dict,
    search_count: int = c_DEFAULT_NONSQUARE_SEARCH,
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
) -> Certificate:
    """Rebuild the certificate from its params and search settings alone, without raising on failed checks"""
    params = ConstructionParams.from_json(document["params"])
    bounds, sample_bound = _bounds_from(document)
    V = params.surface()
    rules = evaluate_rules(V, params.kind, params)
    conditions = validate_params(params, search_count=search_count, prime_bound=prime_bound)
    return _assemble(V, params, rules, conditions, bounds, sample_bound, search_count, prime_bound, False)


def verify_certificate(
    serialized: Union[str, bytes, dict],
    search_count: int = c_DEFAULT_NONSQUARE_SEARCH,
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
) -> VerificationReport:
    """
    Recompute every symbol, rule, witness and the reciprocity sum from the
    recorded params and compare field by field

    Raises:
        ParseError: the document is not a certificate
    """
    document = parse_document(serialized)
    report = VerificationReport()
    try:
        expected = recompute(document, search_count, prime_bound)
    except ParseError:
        raise
    except ChateletError as e:
        report.mismatches.append(Mismatch("params", "constructible parameters", f"{type(e).__name__}: {e}"))
        return report
    except ValueError as e:
        report.mismatches.append(Mismatch("params", "a valid surface", str(e)))
        return report
    report.passes = expected.passes()
    _diff(expected.to_json(), document, "", report.mismatches)
    if expected.kind is SurfaceKind.V2 and report.passes:
        parity = HALF if len(expected.params.S) % 2 else ZERO
        if expected.reciprocity_sum != parity:
            report.mismatches.append(Mismatch("reciprocity_sum", format_invariant(parity), document["reciprocity_sum"]))
    for record in expected.places:
        for w in record.search.witnesses if record.search is not None else ():
            report.mismatches.extend(witness_mismatches(w, record.place))
    logger.debug("verification found %d mismatches", len(report.mismatches))
    return report


def load_certificate(
    serialized: Union[str, bytes, dict],
    search_count: int = c_DEFAULT_NONSQUARE_SEARCH,
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
) -> Certificate:
    """
    Parse and re-verify a document, returning the recomputed certificate

    Raises:
        ParseError: the document is not a certificate
        ConstancyNotProven: the document does not verify
    """
    document = parse_document(serialized)
    report = verify_certificate(document, search_count, prime_bound)
    if not report.ok:
        detail = str(report.mismatches[0]) if report.mismatches else "certificate checks fail"
        raise ConstancyNotProven(f"certificate does not verify: {detail}")
    return recompute(document, search_count, prime_bound)


# --- worked examples ------------------------------------------------------------


@dataclass(frozen=True)
class ReferenceExample:
    name: str
    kind: SurfaceKind
    minpoly: Tuple[int, ...]
    S: Tuple[Place, ...]
    a: int
    b: Fraction
    c: Fraction
    v1: int
    v2: int
    expected_sets: Tuple[Tuple[Place, frozenset], ...]


REFERENCE_EXAMPLES: Tuple[ReferenceExample, ...] = (
    ReferenceExample(
        name="weak approximation fails over Q(sqrt 3), S = {73}",
        kind=SurfaceKind.V1,
        minpoly=(-3, 0, 1),
        S=(Place.finite(73),),
        a=73,
        b=Fraction(1, 73),
        c=Fraction(99),
        v1=11,
        v2=23,
        expected_sets=((Place.finite(73), BOTH),)
        + tuple((Place(p), frozenset({ZERO})) for p in (0, 2, 3, 5, 7, 11, 23, 29, 97)),
    ),
    ReferenceExample(
        name="Hasse principle fails over the cubic field x^3 + x^2 - 2x - 1, S = {13}",
        kind=SurfaceKind.V2,
        minpoly=(-1, -2, 1, 1),
        S=(Place.finite(13),),
        a=377,
        b=Fraction(5),
        c=Fraction(878755181),
        v1=43,
        v2=41,
        expected_sets=((Place.finite(13), frozenset({HALF})),),
    ),
)


@dataclass
class ExampleResult:
    example: ReferenceExample
    report: ConditionReport
    certificate: Optional[Certificate] = None

    @property
    def passed(self) -> bool:
        return self.report.passed


def _check_example_specifics(example: ReferenceExample, cert: Certificate, report: ConditionReport) -> None:
    a, b, c = cert.params.a, cert.params.b, cert.params.c
    if example.kind is SurfaceKind.V2:
        bc1 = b * c + 1
        for p, n in ((13, 3), (29, 3), (41, 1)):
            report.add(f"v_{p}(bc + 1) = {n}", valuation(bc1, p) == n)
        report.add("v_43(c) = 1", valuation(c, 43) == 1)
        report.add("(a, b)_13 = -1", hilbert_symbol(a, b, 13) == -1)
        report.add("(a, c)_5 = +1", hilbert_symbol(a, c, 5) == 1)
        report.add("reciprocity sum = 1/2", cert.reciprocity_sum == HALF)
        over_q = verdict_hp(cert)
        over_l = verdict_hp(cert, cert.params.L)
        report.add("Hasse principle fails over Q", over_q.hp is HPStatus.HP_COUNTEREXAMPLE)
        report.add("Hasse principle fails over L", over_l.hp is HPStatus.HP_COUNTEREXAMPLE)
    else:
        report.add("reciprocity sum = 0", cert.reciprocity_sum == ZERO)
        report.add("weak approximation fails over Q", verdict_wa(cert).wa is WAStatus.FAILS_WA)
        report.add(
            f"weak approximation holds off {{{', '.join(str(v) for v in example.S)}}}",
            verdict_wa(cert, T=example.S).wa is WAStatus.SATISFIES_WA_OFF,
        )
        report.add("rational point (0, b, 0)", bool(cert.rational_point and cert.rational_point["on_surface"]))


def run_reference_example(
    example: ReferenceExample,
    *,
    bounds: SearchBounds = SearchBounds(),
    sample_prime_bound: int = c_DEFAULT_SAMPLE_PRIME_BOUND,
    **builder_options,
) -> ExampleResult:
    """Rebuild a worked example with a, v1, v2 pinned and check every published value"""
    report = ConditionReport()
    L = NumberField.from_coefficients(example.minpoly)
    V, params = build(example.kind, L, example.S, a=example.a, v1=example.v1, v2=example.v2, **builder_options)
    report.add(f"b = {example.b}", params.b == example.b, f"built b = {params.b}")
    report.add(f"c = {example.c}", params.c == example.c, f"built c = {params.c}")
    published = params.replace(b=example.b, c=example.c)
    for check in validate_params(published).checks:
        report.add(check.condition, check.passed, check.detail)
    try:
        cert = make_certificate(
            published.surface(), published.kind, published, bounds=bounds, sample_prime_bound=sample_prime_bound
        )
    except ChateletError as e:
        report.add("certificate assembles", False, f"{type(e).__name__}: {e}")
        return ExampleResult(example, report)
    report.add("all rule cases pass", all(rule.passed for rule in cert.rules))
    for v, expected in example.expected_sets:
        record = cert.record(v)
        found = record.values if record is not None else frozenset()
        report.add(
            f"invariant set at {v} = {{{', '.join(format_invariant(x) for x in sorted(expected))}}}",
            found == expected,
            f"found {[format_invariant(x) for x in sorted(found)]}",
        )
    _check_example_specifics(example, cert, report)
    verification = verify_certificate(cert.to_json())
    report.add("certificate re-verifies", verification.ok, "; ".join(str(m) for m in verification.mismatches[:3]))
    return ExampleResult(example, report, cert)


def run_reference_examples(**options) -> List[ExampleResult]:
    return [run_reference_example(example, **options) for example in REFERENCE_EXAMPLES]
