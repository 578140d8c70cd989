import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from chatelet_local import SurfaceKind  # noqa: E402
from construct import ConstructionParams  # noqa: E402
from places_fields import NumberField, Place  # noqa: E402

QUADRATIC = NumberField.parse("-3,0,1")
CUBIC = NumberField.parse("-1,-2,1,1")


@pytest.fixture
def v1_params() -> ConstructionParams:
    """Weak approximation example over Q(sqrt 3) with S = {73}"""
    return ConstructionParams(
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


@pytest.fixture
def v2_params() -> ConstructionParams:
    """Hasse principle example over the cubic field of conductor 7 with S = {13}"""
    return ConstructionParams(
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


@pytest.fixture
def no_home_config(tmp_path, monkeypatch):
    """Point the config lookup at an empty temp dir"""
    monkeypatch.setenv("CHATELET_CONFIG", str(tmp_path / "config.json"))
    monkeypatch.delenv("CHATELET_MAX_ITER", raising=False)
    return tmp_path
