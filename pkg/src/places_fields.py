"""
Places of Q, monogenic number fields and complete splitting of primes
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy import Poly, primerange, symbols
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_degree, gf_factor_sqf, gf_from_int_poly, gf_gcd, gf_pow_mod, gf_sub

from arith import RationalLike, is_prime, is_rational_square, square_class_test, to_rational
from errors import Exhausted, InvalidField, NotPrime, ParseError

logger = logging.getLogger(__name__)

c_DEFAULT_PRIME_BOUND = 1_000_000
c_DEFAULT_NONSQUARE_SEARCH = 200

_x = symbols("x")


@dataclass(frozen=True, order=True)
class Place:
    """The real place (prime == 0) or a finite prime; orders real first"""

    prime: int

    def __post_init__(self) -> None:
        if self.prime != 0 and not is_prime(self.prime):
            raise NotPrime(f"{self.prime} is not prime")

    @classmethod
    def real(cls) -> "Place":
        return cls(0)

    @classmethod
    def finite(cls, p: int) -> "Place":
        return cls(p)

    @classmethod
    def parse(cls, text: str) -> "Place":
        token = str(text).strip().lower()
        if token in ("real", "inf", "infinity", "oo"):
            return cls.real()
        try:
            p = int(token)
        except ValueError as e:
            raise ParseError(f"not a place: {text!r}") from e
        if not is_prime(p):
            raise ParseError(f"not a place: {text!r} is not prime")
        return cls(p)

    @property
    def is_real(self) -> bool:
        return self.prime == 0

    @property
    def p(self) -> int:
        return self.prime

    def __str__(self) -> str:
        return "real" if self.is_real else str(self.prime)


def parse_places(text: str) -> List[Place]:
    """Comma separated places, e.g. "real,13,29"; the empty string is no places"""
    return sorted({Place.parse(tok) for tok in text.split(",") if tok.strip()})


def discriminant(coeffs: Sequence[int]) -> int:
    """Discriminant of a monic polynomial given constant term first"""
    if len(coeffs) < 2:
        raise InvalidField("polynomial must have degree >= 1")
    if len(coeffs) == 2:
        return 1
    poly = Poly(list(reversed(coeffs)), _x)
    return int(poly.discriminant())


@dataclass(frozen=True)
class NumberField:
    """Q[x]/(f) for a monic irreducible integer polynomial f (constant term first)"""

    coeffs: Tuple[int, ...]
    disc: int

    @classmethod
    def from_coefficients(cls, coeffs: Iterable[int]) -> "NumberField":
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) < 2:
            raise InvalidField("minimal polynomial must have degree >= 1")
        if coeffs[-1] != 1:
            raise InvalidField(f"minimal polynomial must be monic, leading coefficient is {coeffs[-1]}")
        if len(coeffs) > 2 and not Poly(list(reversed(coeffs)), _x).is_irreducible:
            raise InvalidField(f"{list(coeffs)} is reducible over Q")
        disc = discriminant(coeffs)
        if disc == 0:
            raise InvalidField("minimal polynomial is not separable")
        return cls(coeffs, disc)

    @classmethod
    def parse(cls, text: str) -> "NumberField":
        try:
            coeffs = [int(tok) for tok in str(text).replace(" ", "").split(",") if tok]
        except ValueError as e:
            raise ParseError(f"not a coefficient list: {text!r}") from e
        return cls.from_coefficients(coeffs)

    @classmethod
    def rationals(cls) -> "NumberField":
        return cls.from_coefficients((-1, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_totally_real(self) -> bool:
        if self.degree == 1:
            return True
        return Poly(list(reversed(self.coeffs)), _x).count_roots() == self.degree

    def serialize(self) -> List[int]:
        return list(self.coeffs)

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coeffs)


class SplitStatus(Enum):
    SPLITS = "splits"
    DOES_NOT_SPLIT = "does_not_split"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class SplitReport:
    prime: int
    status: SplitStatus
    roots: Tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {"prime": str(self.prime), "status": self.status.value, "roots": [str(r) for r in self.roots]}


def _roots_mod_p(F: NumberField, p: int) -> List[int]:
    """Distinct roots of f in F_p, from gcd(f, x^p - x)"""
    f = gf_from_int_poly(list(reversed(F.coeffs)), p)
    x_p = gf_pow_mod([ZZ(1), ZZ(0)], p, f, p, ZZ)
    g = gf_gcd(gf_sub(x_p, [ZZ(1), ZZ(0)], p, ZZ), f, p, ZZ)
    if gf_degree(g) <= 0:
        return []
    _, linear = gf_factor_sqf(g, p, ZZ)
    return sorted(int(-fac[1]) % p for fac in linear)


def splits_completely(p: int, F: NumberField) -> SplitReport:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if F.disc % p == 0:
        return SplitReport(p, SplitStatus.INDETERMINATE)
    if F.degree == 1:
        return SplitReport(p, SplitStatus.SPLITS, ((-F.coeffs[0]) % p,))
    roots = _roots_mod_p(F, p)
    if len(roots) == F.degree:
        return SplitReport(p, SplitStatus.SPLITS, tuple(roots))
    return SplitReport(p, SplitStatus.DOES_NOT_SPLIT)


def place_splits_completely(v: Place, F: NumberField) -> bool:
    """Finite places via splits_completely; the real place iff F is totally real"""
    if v.is_real:
        return F.is_totally_real()
    return splits_completely(v.prime, F).status is SplitStatus.SPLITS


def find_split_primes(
    F: NumberField,
    count: int,
    avoid: Iterable[int] = (),
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
) -> List[int]:
    """The `count` smallest odd primes outside `avoid` splitting completely in F"""
    if count < 1:
        raise ValueError("count must be positive")
    skip = set(avoid)
    found: List[int] = []
    for p in primerange(3, prime_bound):
        p = int(p)
        if p in skip or F.disc % p == 0:
            continue
        if splits_completely(p, F).status is SplitStatus.SPLITS:
            found.append(p)
            if len(found) == count:
                logger.debug("split primes in %s: %s", F, found)
                return found
    raise Exhausted(f"only {len(found)} of {count} split primes below {prime_bound}")


def nonsquare_witness(
    a: RationalLike,
    S: Iterable[Place],
    F: NumberField,
    search_count: int = c_DEFAULT_NONSQUARE_SEARCH,
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
) -> Optional[Place]:
    """A place splitting completely in F at which a is not a local square, if one is found"""
    a = to_rational(a)
    if is_rational_square(a):
        return None
    for v in sorted(set(S)):
        if not square_class_test(a, v) and place_splits_completely(v, F):
            return v
    try:
        auxiliary = find_split_primes(F, search_count, prime_bound=prime_bound)
    except Exhausted:
        auxiliary = []
    for p in auxiliary:
        if not square_class_test(a, p):
            return Place.finite(p)
    return None


def certify_nonsquare_in_L(
    a: RationalLike,
    S: Iterable[Place],
    F: NumberField,
    search_count: int = c_DEFAULT_NONSQUARE_SEARCH,
    prime_bound: int = c_DEFAULT_PRIME_BOUND,
) -> bool:
    """True certifies a is not a square in F; False only means no certificate was found"""
    return nonsquare_witness(a, S, F, search_count, prime_bound) is not None


def split_count(S: Iterable[Place], F: NumberField) -> int:
    """Number of places of F above S when every member of S splits completely"""
    return len(set(S)) * F.degree
