import sys
from pathlib import Path

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from arith import is_rational_square, legendre  # noqa: E402
from errors import InvalidField, NotPrime, ParseError  # noqa: E402
from places_fields import (  # noqa: E402
    NumberField,
    Place,
    SplitStatus,
    certify_nonsquare_in_L,
    discriminant,
    find_split_primes,
    nonsquare_witness,
    parse_places,
    place_splits_completely,
    split_count,
    splits_completely,
)

QUADRATIC = NumberField.parse("-3,0,1")
GAUSSIAN = NumberField.parse("1,0,1")
CUBIC = NumberField.parse("-1,-2,1,1")


def test_place_parse_and_order():
    assert Place.parse("real").is_real
    assert Place.parse(" 13 ") == Place(13)
    assert str(Place.real()) == "real"
    assert sorted([Place(13), Place.real(), Place(2)]) == [Place.real(), Place(2), Place(13)]
    assert parse_places("13,real,13") == [Place.real(), Place(13)]
    assert parse_places("") == []
    for bad in ("4", "x", "-3"):
        with pytest.raises(ParseError):
            Place.parse(bad)
    with pytest.raises(NotPrime):
        Place(9)


def test_number_field_parse():
    assert QUADRATIC.degree == 2
    assert QUADRATIC.disc == 12
    assert discriminant([-1, -2, 1, 1]) == 49
    assert NumberField.rationals().degree == 1
    assert str(CUBIC) == "-1,-2,1,1"
    assert CUBIC.serialize() == [-1, -2, 1, 1]


def test_number_field_rejects_bad_polynomials():
    with pytest.raises(InvalidField):
        NumberField.parse("-1,0,1")  # reducible
    with pytest.raises(InvalidField):
        NumberField.parse("1,2")  # not monic
    with pytest.raises(InvalidField):
        NumberField.parse("5")
    with pytest.raises(ParseError):
        NumberField.parse("1,x,1")


def test_totally_real():
    assert QUADRATIC.is_totally_real()
    assert CUBIC.is_totally_real()
    assert not GAUSSIAN.is_totally_real()


def test_splits_completely():
    report = splits_completely(11, QUADRATIC)
    assert report.status is SplitStatus.SPLITS
    assert set(report.roots) == {5, 6}
    assert splits_completely(73, QUADRATIC).status is SplitStatus.SPLITS
    assert splits_completely(5, QUADRATIC).status is SplitStatus.DOES_NOT_SPLIT
    assert splits_completely(7, QUADRATIC).status is SplitStatus.DOES_NOT_SPLIT
    assert splits_completely(3, QUADRATIC).status is SplitStatus.INDETERMINATE
    assert len(splits_completely(13, CUBIC).roots) == 3
    assert splits_completely(7, CUBIC).status is SplitStatus.INDETERMINATE
    assert splits_completely(5, CUBIC).status is SplitStatus.DOES_NOT_SPLIT


def test_real_place_splitting():
    assert place_splits_completely(Place.real(), QUADRATIC)
    assert not place_splits_completely(Place.real(), GAUSSIAN)
    assert place_splits_completely(Place(13), CUBIC)


def test_find_split_primes():
    assert find_split_primes(QUADRATIC, 2) == [11, 13]
    assert find_split_primes(CUBIC, 2) == [13, 29]
    assert find_split_primes(GAUSSIAN, 2) == [5, 13]
    assert find_split_primes(NumberField.rationals(), 2) == [3, 5]
    assert find_split_primes(CUBIC, 2, avoid=[13]) == [29, 41]


def test_nonsquare_certificate():
    assert certify_nonsquare_in_L(73, [Place(73)], QUADRATIC)
    assert nonsquare_witness(73, [Place(73)], QUADRATIC) == Place(73)
    # 3 is a square in Q(sqrt 3), so no split place can witness otherwise
    assert not certify_nonsquare_in_L(3, [], QUADRATIC, search_count=20)
    assert nonsquare_witness(9, [], QUADRATIC) is None


def test_split_count():
    assert split_count([Place(13)], CUBIC) == 3
    assert split_count([Place(73), Place(73)], QUADRATIC) == 2


@settings(max_examples=200, deadline=None)
@given(
    st.integers(min_value=-500, max_value=500).filter(lambda a: a and not is_rational_square(a)),
    st.sampled_from([3, 5, 7, 11, 13, 29, 73]),
)
def test_quadratic_splitting_is_legendre(a, p):
    assume(a % p)
    F = NumberField.from_coefficients([-a, 0, 1])
    splits = splits_completely(p, F).status is SplitStatus.SPLITS
    assert splits == (legendre(a, p) == 1)


@pytest.mark.parametrize("field", [QUADRATIC, GAUSSIAN, CUBIC, NumberField.parse("-5,0,1")])
def test_found_split_primes_split(field):
    for p in find_split_primes(field, 6):
        assert splits_completely(p, field).status is SplitStatus.SPLITS
