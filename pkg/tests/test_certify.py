import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from certify import (  # noqa: E402
    HPStatus,
    WAStatus,
    canonical_json,
    digest,
    load_certificate,
    make_certificate,
    parse_document,
    run_reference_examples,
    verdict_hp,
    verdict_wa,
    verify_certificate,
    witness_mismatches,
)
from chatelet_local import BOTH, HALF, ZERO, SurfaceKind, Witness, XCoordinate  # noqa: E402
from construct import ConstructionParams, build  # noqa: E402
from errors import ConstancyNotProven, Inconsistent, ParseError, RuleHypothesisFailed, SplitCheckFailed  # noqa: E402
from places_fields import NumberField, Place  # noqa: E402

QUADRATIC = NumberField.parse("-3,0,1")
CUBIC = NumberField.parse("-1,-2,1,1")
SAMPLE_BOUND = 30

V1_EXAMPLE = ConstructionParams(
    SurfaceKind.V1,
    QUADRATIC,
    (Place(73),),
    Fraction(73),
    Fraction(1, 73),
    Fraction(99),
    (Place(73),),
    (Place(73),),
    11,
    23,
)
V2_EXAMPLE = ConstructionParams(
    SurfaceKind.V2,
    CUBIC,
    (Place(13),),
    Fraction(377),
    Fraction(5),
    Fraction(878755181),
    (Place(13), Place(29)),
    (Place(5),),
    43,
    41,
)


def _certify(params, sample_prime_bound=100):
    return make_certificate(params.surface(), params.kind, params, sample_prime_bound=sample_prime_bound)


@pytest.fixture(scope="module")
def v1_cert():
    return _certify(V1_EXAMPLE)


@pytest.fixture(scope="module")
def v2_cert():
    return _certify(V2_EXAMPLE)


def test_v1_example_profile(v1_cert):
    assert v1_cert.passes()
    assert v1_cert.record(Place(73)).values == BOTH
    for p in (0, 2, 3, 5, 7, 11, 23, 29, 97):
        record = v1_cert.record(Place(p))
        assert record.values == {ZERO}, p
        assert record.consistent
    assert v1_cert.reciprocity_sum == ZERO
    assert v1_cert.rational_point["on_surface"]
    assert v1_cert.rational_point["invariant_sum"] == "0"
    assert v1_cert.irreducibility["holds"]
    assert v1_cert.verdict.wa is WAStatus.FAILS_WA


def test_v2_example_profile(v2_cert):
    assert v2_cert.passes()
    assert v2_cert.record(Place(13)).values == {HALF}
    assert v2_cert.record(Place(13)).solvable_x.serialize() == "13"
    for p in (0, 2, 5, 29, 41, 43):
        assert v2_cert.record(Place(p)).values == {ZERO}, p
    assert v2_cert.reciprocity_sum == HALF
    assert v2_cert.rational_point is None
    assert v2_cert.irreducibility["q1"]["eisenstein_prime"] == "43"
    assert v2_cert.irreducibility["q2"]["eisenstein_prime"] == "41"


def test_witness_symbols_checked_against_norm():
    x = XCoordinate.at(3)
    assert witness_mismatches(Witness(x, HALF, 1, (-1, -1)), Place(13)) == []
    assert witness_mismatches(Witness(x, ZERO, 1, (1, None)), Place(13)) == []
    forged = witness_mismatches(Witness(x, HALF, 1, (-1, 1)), Place(13))
    assert [m.expected for m in forged] == ["(a, q1)(a, q2) = (a, P) = 1", "equal factor symbols"]
    assert all(m.path == "witness 3 at 13" for m in forged)
    assert len(witness_mismatches(Witness(x, ZERO, -1, (1, 1)), Place(13))) == 1


def test_hasse_verdicts_for_cubic_example(v2_cert):
    over_q = verdict_hp(v2_cert)
    assert over_q.hp is HPStatus.HP_COUNTEREXAMPLE
    assert over_q.wa is WAStatus.NOT_APPLICABLE
    over_l = verdict_hp(v2_cert, CUBIC)
    assert over_l.hp is HPStatus.HP_COUNTEREXAMPLE
    assert over_l.places_above_S == 3
    with pytest.raises(SplitCheckFailed):
        verdict_hp(v2_cert, NumberField.parse("-2,0,1"))


def test_weak_approximation_verdicts(v1_cert):
    assert verdict_wa(v1_cert).wa is WAStatus.FAILS_WA
    assert verdict_wa(v1_cert, T=[Place(73)]).wa is WAStatus.SATISFIES_WA_OFF
    assert verdict_wa(v1_cert, T=[Place(11)]).wa is WAStatus.FAILS_WA
    over_l = verdict_wa(v1_cert, QUADRATIC, T=[Place(73)])
    assert over_l.wa is WAStatus.SATISFIES_WA_OFF
    assert over_l.hp is HPStatus.HAS_RATIONAL_POINT
    assert over_l.places_above_S == 2


def test_verdict_needs_matching_kind(v1_cert, v2_cert):
    with pytest.raises(Inconsistent):
        verdict_hp(v1_cert)
    with pytest.raises(Inconsistent):
        verdict_wa(v2_cert)


def test_certificate_serialization(v1_cert):
    payload = v1_cert.serialize()
    document = json.loads(payload)
    assert payload == canonical_json(document)
    assert document["kind"] == "v1"
    assert document["params"]["c"] == "99"
    assert digest(document) == digest(json.loads(payload))
    assert len(digest(document)) == 64


def test_certificate_verifies(v1_cert, v2_cert):
    assert verify_certificate(v1_cert.serialize()).ok
    assert verify_certificate(v2_cert.to_json()).ok


def test_flipped_invariant_is_located(v1_cert):
    document = json.loads(v1_cert.serialize())
    index = next(i for i, r in enumerate(document["places"]) if r["place"] == "73")
    document["places"][index]["invariant_set"] = ["0"]
    report = verify_certificate(document)
    assert not report.ok
    assert any(m.path.startswith(f"places[{index}].invariant_set") for m in report.mismatches)
    with pytest.raises(ConstancyNotProven):
        load_certificate(document)


def test_tampered_params_fail_verification(v1_cert):
    document = json.loads(v1_cert.serialize())
    document["params"]["c"] = "98"
    report = verify_certificate(document)
    assert not report.passes
    assert not report.ok


def test_malformed_documents():
    with pytest.raises(ParseError):
        parse_document(b'{"version": "chatelet-certificate/1", "kind"')
    with pytest.raises(ParseError):
        parse_document("[]")
    with pytest.raises(ParseError):
        parse_document({"version": "chatelet-certificate/1"})


def test_unknown_version(v1_cert):
    document = json.loads(v1_cert.serialize())
    document["version"] = "chatelet-certificate/0"
    with pytest.raises(ParseError):
        parse_document(document)


FAULTS = [
    (V1_EXAMPLE, {"c": 98}, "V1-(6)", "(a, c)_73 = -1"),
    (V1_EXAMPLE, {"c": 73 * 99}, "V1-(6)", "v_73(c) = 0"),
    (V1_EXAMPLE, {"c": 33}, "params", "v_23(1 + c b^2) = 1"),
    (V1_EXAMPLE, {"c": Fraction(1, 3)}, "V1-(4)", "c ∈ Z[1/2]"),
    (V1_EXAMPLE, {"b": 1}, "V1-(6)", "v_73(b) = -v_73(a)"),
    (V1_EXAMPLE, {"b": Fraction(2, 73)}, "params", "v_23(1 + c b^2) = 1"),
    (V1_EXAMPLE, {"a": 219}, "V1-(1)", "a ∈ Q_2^×2"),
    (V1_EXAMPLE, {"S": ()}, "V1-(3)", "v_73(b) = v_73(a) > 0"),
    (V1_EXAMPLE, {"v1": 13}, "params", "v_13(c) = 1"),
    (V1_EXAMPLE, {"v2": 73}, "params", "v2 = 73 is an odd prime outside [73]"),
    (V2_EXAMPLE, {"b": -5}, "V2-sol(3)/inv(3)", "v_29(bc + 1) = v_29(a) + 2"),
    (V2_EXAMPLE, {"c": 878755182}, "V2-sol(3)/inv(3)", "v_29(bc + 1) = v_29(a) + 2"),
    (V2_EXAMPLE, {"S": ()}, "V2-sol(3)/inv(3)", "(a, b)_13 = +1"),
    (V2_EXAMPLE, {"S": (Place(13), Place(29))}, "V2-sol(7)/inv(6)", "(a, b)_29 = -1"),
    (V2_EXAMPLE, {"a": 1131}, "V2-sol(1)/inv(1)", "a ∈ Q_2^×2"),
    (V2_EXAMPLE, {"v1": 41, "v2": 43}, "params", "v_41(c) = 1"),
]


@pytest.mark.parametrize("base, changes, case_id, condition", FAULTS)
def test_fault_injection(base, changes, case_id, condition):
    params = base.replace(**changes)
    with pytest.raises(RuleHypothesisFailed) as excinfo:
        _certify(params)
    assert excinfo.value.case_id == case_id
    assert excinfo.value.condition.startswith(condition)


ROUND_TRIP_FIELDS = [
    ("-1,1", 3),
    ("-3,0,1", 11),
    ("1,0,1", 5),
    ("-1,-2,1,1", 13),
]


@pytest.mark.parametrize("minpoly, p", ROUND_TRIP_FIELDS)
@pytest.mark.parametrize("kind", [SurfaceKind.V1, SurfaceKind.V2])
def test_round_trip_over_fields(minpoly, p, kind):
    L = NumberField.parse(minpoly)
    S = [Place(p)]
    V, params = build(kind, L, S)
    cert = make_certificate(V, kind, params, L, sample_prime_bound=SAMPLE_BOUND)
    assert cert.passes()
    assert verify_certificate(cert.serialize()).ok
    on_S = BOTH if kind is SurfaceKind.V1 else frozenset({HALF})
    for record in cert.places:
        expected = on_S if record.place in S else frozenset({ZERO})
        assert record.values == expected, (minpoly, kind, str(record.place))


def test_verdict_parity_over_quadratic_field():
    V, params = build(SurfaceKind.V2, QUADRATIC, [Place(11)])
    cert = make_certificate(V, SurfaceKind.V2, params, sample_prime_bound=SAMPLE_BOUND)
    assert verdict_hp(cert).hp is HPStatus.HP_COUNTEREXAMPLE
    over_l = verdict_hp(cert, QUADRATIC)
    assert over_l.hp is HPStatus.HAS_RATIONAL_POINT
    assert over_l.wa is WAStatus.SATISFIES_WA
    assert over_l.places_above_S == 2


def test_empty_S_over_rationals():
    Q = NumberField.rationals()
    V, params = build(SurfaceKind.V1, Q, [])
    cert = make_certificate(V, SurfaceKind.V1, params, sample_prime_bound=SAMPLE_BOUND)
    assert verdict_wa(cert).wa is WAStatus.SATISFIES_WA
    V, params = build(SurfaceKind.V2, Q, [])
    cert = make_certificate(V, SurfaceKind.V2, params, sample_prime_bound=SAMPLE_BOUND)
    assert verdict_hp(cert).hp is HPStatus.HAS_RATIONAL_POINT
    assert cert.reciprocity_sum == ZERO


def test_real_place_in_S_verdicts():
    V, params = build(SurfaceKind.V2, QUADRATIC, [Place.real()])
    cert = make_certificate(V, SurfaceKind.V2, params, sample_prime_bound=SAMPLE_BOUND)
    assert cert.record(Place.real()).values == {HALF}
    assert verdict_hp(cert).hp is HPStatus.HP_COUNTEREXAMPLE
    with pytest.raises(SplitCheckFailed):
        verdict_hp(cert, QUADRATIC)


def test_reference_examples_rebuild():
    results = run_reference_examples()
    assert [r.example.kind for r in results] == [SurfaceKind.V1, SurfaceKind.V2]
    for result in results:
        assert result.passed, result.report.failed_conditions()
