import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from chatelet_local import (  # noqa: E402
    BOTH,
    HALF,
    ZERO,
    ChateletSurface,
    EvenQuadratic,
    PlaceClass,
    SearchBounds,
    SurfaceKind,
    XCoordinate,
    classify_place,
    constancy_certificate,
    evaluate_invariant,
    evaluate_rules,
    evaluate_witness,
    expected_surface,
    invariant_set,
    local_solvable,
    outcome_for,
    parse_invariant,
    s_double_prime,
    s_prime,
    unit_representatives,
)
from errors import NoLocalPointOnFiber, ParseError, RuleHypothesisFailed, SquareA  # noqa: E402
from hilbert import hilbert_symbol  # noqa: E402
from places_fields import Place  # noqa: E402

V1_QUIET_PLACES = [0, 2, 3, 5, 7, 11, 23, 29, 97]


def test_surface_construction():
    V = expected_surface(SurfaceKind.V1, 73, Fraction(1, 73), 99)
    assert V.q1 == EvenQuadratic.of(99, 1)
    assert V.q2 == EvenQuadratic.of(Fraction(5428, 5329), Fraction(1, 5329))
    assert V.P(Fraction(0)) == Fraction(1, 5329)
    assert V.leading == 99 * Fraction(5428, 5329)
    with pytest.raises(SquareA):
        ChateletSurface(Fraction(9), EvenQuadratic.of(1, 1), EvenQuadratic.of(1, 2))
    with pytest.raises(ValueError):
        ChateletSurface(Fraction(0), EvenQuadratic.of(1, 1), EvenQuadratic.of(1, 2))
    with pytest.raises(ValueError):
        EvenQuadratic.of(0, 1)


def test_x_coordinate_and_invariant_parsing():
    assert XCoordinate.parse("inf").is_infinity
    assert XCoordinate.parse("-1/73").value == Fraction(-1, 73)
    assert XCoordinate.at(13).serialize() == "13"
    assert parse_invariant("1/2") == HALF
    with pytest.raises(ParseError):
        parse_invariant("1/3")
    with pytest.raises(ParseError):
        SurfaceKind.parse("v3")


def test_evaluate_invariant_v1(v1_params):
    V = v1_params.surface()
    assert evaluate_invariant(V, Place(73), XCoordinate.at(Fraction(1, 73))) == HALF
    assert evaluate_invariant(V, Place(73), XCoordinate.at(0)) == ZERO
    witness = evaluate_witness(V, Place(73), XCoordinate.at(Fraction(1, 73)))
    assert witness.norm_symbol == 1
    assert witness.factor_symbols == (-1, -1)


def test_fiber_without_point(v2_params):
    V = v2_params.surface()
    with pytest.raises(NoLocalPointOnFiber):
        evaluate_witness(V, Place(13), XCoordinate.at(0))
    with pytest.raises(NoLocalPointOnFiber):
        evaluate_witness(V, Place(13), XCoordinate.infinity())


def test_local_solvable(v1_params, v2_params):
    V1 = v1_params.surface()
    for p in V1_QUIET_PLACES + [73]:
        assert local_solvable(V1, Place(p)) == (True, XCoordinate.at(0))
    assert local_solvable(v2_params.surface(), Place(13)) == (True, XCoordinate.at(13))


def test_invariant_sets_v1(v1_params):
    V = v1_params.surface()
    search = invariant_set(V, Place(73))
    assert search.values == BOTH
    assert [w.invariant for w in search.witnesses] == [ZERO, HALF]
    for p in V1_QUIET_PLACES:
        assert invariant_set(V, Place(p)).values == {ZERO}, p


def test_invariant_sets_v2(v2_params):
    V = v2_params.surface()
    assert invariant_set(V, Place(13)).values == {HALF}
    for p in (0, 2, 5, 29, 41, 43):
        assert invariant_set(V, Place(p)).values == {ZERO}, p


def test_witness_factor_symbols_agree(v2_params):
    V = v2_params.surface()
    for p in (5, 13, 29):
        for w in invariant_set(V, Place(p)).witnesses:
            s1, s2 = w.factor_symbols
            if s1 is not None and s2 is not None:
                assert s1 == s2


def test_unit_representatives():
    assert unit_representatives(2, 50) == [1, 3, 5, 7]
    assert unit_representatives(13, 50) == list(range(1, 13))
    reps = unit_representatives(1009, 3)
    assert reps[:3] == [1, 2, 3]
    assert any(pow(u, 504, 1009) == 1008 for u in reps)


def test_exceptional_sets():
    assert s_prime(377) == [Place(13), Place(29)]
    assert s_prime(-7) == [Place.real(), Place(7)]
    assert s_prime(73 * 9) == [Place(73)]
    assert s_double_prime(Fraction(1, 73)) == [Place(73)]
    assert s_double_prime(5) == [Place(5)]
    assert s_double_prime(Fraction(3, 8)) == [Place(3)]


def test_classify_place():
    S = [Place(73)]
    assert classify_place(Place(73), 73, Fraction(1, 73), S, SurfaceKind.V1) is PlaceClass.S_FINITE
    assert classify_place(Place(3), 73, Fraction(1, 73), S, SurfaceKind.V1) is PlaceClass.OUTSIDE_SPRIME_FINITE
    assert classify_place(Place(2), 73, Fraction(1, 73), S, SurfaceKind.V1) is PlaceClass.INF_MINUS_SPRIME_OR_2ADIC
    assert classify_place(Place.real(), 73, 1, S, SurfaceKind.V1) is PlaceClass.INF_MINUS_SPRIME_OR_2ADIC

    S = [Place(13)]
    assert classify_place(Place(13), 377, 5, S, SurfaceKind.V2) is PlaceClass.S_FINITE
    assert classify_place(Place(29), 377, 5, S, SurfaceKind.V2) is PlaceClass.SPRIME_MINUS_S_FINITE
    assert classify_place(Place(5), 377, 5, S, SurfaceKind.V2) is PlaceClass.SDOUBLEPRIME
    assert classify_place(Place(5), 377, 5, S, SurfaceKind.V1) is PlaceClass.OUTSIDE_SPRIME_FINITE
    assert classify_place(Place(7), 377, 5, S, SurfaceKind.V2) is PlaceClass.OUTSIDE_SPRIME_FINITE

    assert classify_place(Place.real(), -7, 1, [Place.real()], SurfaceKind.V1) is PlaceClass.S_ARCH
    assert classify_place(Place.real(), -7, 1, [], SurfaceKind.V1) is PlaceClass.SPRIME_MINUS_S_ARCH
    with pytest.raises(SquareA):
        classify_place(Place(3), 9, 1, [], SurfaceKind.V1)


def test_constancy_v1(v1_params):
    outcomes = constancy_certificate(v1_params.surface(), SurfaceKind.V1, v1_params)
    ids = [o.case_id for o in outcomes]
    assert ids == ["V1-shape", "V1-(1)", "V1-(2)", "V1-(3)", "V1-(4)", "V1-(5)", "V1-(6)"]
    assert all(o.passed for o in outcomes)
    vacuous = {o.case_id for o in outcomes if o.vacuous}
    assert vacuous == {"V1-(2)", "V1-(3)", "V1-(5)"}
    assert outcome_for(outcomes, PlaceClass.S_FINITE).invariant_claim == BOTH


def test_constancy_v2(v2_params):
    outcomes = constancy_certificate(v2_params.surface(), SurfaceKind.V2, v2_params)
    assert all(o.passed for o in outcomes)
    s_finite = outcome_for(outcomes, PlaceClass.S_FINITE)
    assert s_finite.case_id == "V2-sol(7)/inv(6)"
    assert s_finite.invariant_claim == {HALF}
    assert outcome_for(outcomes, PlaceClass.SDOUBLEPRIME).places == ("5",)
    assert outcome_for(outcomes, PlaceClass.SPRIME_MINUS_S_FINITE).places == ("29",)
    assert outcome_for(outcomes, PlaceClass.S_ARCH).vacuous


def test_constancy_fails_on_wrong_c(v1_params):
    params = v1_params.replace(c=98)
    with pytest.raises(RuleHypothesisFailed) as excinfo:
        constancy_certificate(params.surface(), SurfaceKind.V1, params)
    assert excinfo.value.case_id == "V1-(6)"
    assert excinfo.value.condition == "(a, c)_73 = -1"


def test_rules_report_every_failure(v1_params):
    params = v1_params.replace(b=1)
    outcomes = evaluate_rules(params.surface(), SurfaceKind.V1, params)
    s_finite = outcome_for(outcomes, PlaceClass.S_FINITE)
    assert not s_finite.passed
    assert s_finite.first_failure().description == "v_73(b) = -v_73(a)"


def test_shape_check_catches_foreign_surface(v1_params):
    other = expected_surface(SurfaceKind.V1, 73, Fraction(1, 73), 98)
    with pytest.raises(RuleHypothesisFailed) as excinfo:
        constancy_certificate(other, SurfaceKind.V1, v1_params)
    assert excinfo.value.case_id == "V1-shape"


def test_norm_symbol_is_computed_on_P(v1_params, v2_params):
    for params, p in ((v1_params, 73), (v2_params, 13), (v2_params, 29)):
        V = params.surface()
        for w in invariant_set(V, Place(p)).witnesses:
            if w.x.is_infinity or 0 in (V.q1(w.x.value), V.q2(w.x.value)):
                continue
            assert w.norm_symbol == hilbert_symbol(V.a, V.P(w.x.value), Place(p)) == 1


def test_local_solvable_falls_back_to_rule(v2_params):
    V = v2_params.surface()
    # 0, infinity and +-2 carry no 13-adic point
    tight = SearchBounds(unit_bound=0, depth=0)
    assert local_solvable(V, Place(13), tight) == (False, None)

    place_class = classify_place(Place(13), V.a, v2_params.b, v2_params.S, SurfaceKind.V2)
    rule = outcome_for(constancy_certificate(V, SurfaceKind.V2, v2_params), place_class)
    assert local_solvable(V, Place(13), tight, rule=rule) == (True, None)

    broken = v2_params.replace(S=(Place(13), Place(29)))
    failing = outcome_for(evaluate_rules(V, SurfaceKind.V2, broken), place_class)
    assert not failing.passed
    assert local_solvable(V, Place(13), tight, rule=failing) == (False, None)


def test_v2_cases_record_dominant_term(v2_params):
    outcomes = constancy_certificate(v2_params.surface(), SurfaceKind.V2, v2_params)
    for place_class, p in ((PlaceClass.S_FINITE, 13), (PlaceClass.SPRIME_MINUS_S_FINITE, 29)):
        descriptions = [h.description for h in outcome_for(outcomes, place_class).hypotheses]
        assert f"(a, q2(x))_{p} = (a, b)_{p} for units x" in descriptions

    # v_29(b) >= v_29(bc + 1) leaves nothing to dominate
    params = v2_params.replace(b=Fraction(29 ** 4 * 5))
    outcome = outcome_for(evaluate_rules(params.surface(), SurfaceKind.V2, params), PlaceClass.SPRIME_MINUS_S_FINITE)
    failed = [h.description for h in outcome.hypotheses if not h.passed]
    assert "(a, q2(x))_29 = (a, b)_29 for units x" in failed
