"""
Hilbert symbols (a, b)_v over Q at the real place and at every prime
"""

from typing import List, Optional, Union

from arith import RationalLike, legendre, rational_primes, residue, to_rational, unit_part, valuation
from errors import ZeroArgument
from places_fields import Place

PlaceLike = Union[Place, int]


def _as_place(v: PlaceLike) -> Place:
    return v if isinstance(v, Place) else Place.finite(v)


def _epsilon(t: int) -> int:
    return ((t - 1) // 2) % 2


def _omega(t: int) -> int:
    return ((t * t - 1) // 8) % 2


def hilbert_symbol(a: RationalLike, b: RationalLike, v: PlaceLike) -> int:
    """
    (a, b)_v in {+1, -1}: +1 iff x0^2 - a x1^2 - b x2^2 = 0 has a nontrivial Q_v point

    Odd p, a = p^alpha u, b = p^beta w:
        (-1)^(alpha beta (p-1)/2) (u/p)^beta (w/p)^alpha
    p = 2 with unit parts u, w mod 8:
        (-1)^(eps(u) eps(w) + alpha omega(w) + beta omega(u))
    """
    a, b = to_rational(a), to_rational(b)
    if a == 0 or b == 0:
        raise ZeroArgument("Hilbert symbol needs nonzero arguments")
    place = _as_place(v)
    if place.is_real:
        return -1 if a < 0 and b < 0 else 1

    p = place.prime
    alpha, beta = valuation(a, p), valuation(b, p)
    if p == 2:
        u, w = residue(unit_part(a, 2), 8), residue(unit_part(b, 2), 8)
        exponent = _epsilon(u) * _epsilon(w) + alpha * _omega(w) + beta * _omega(u)
        return -1 if exponent % 2 else 1

    u, w = residue(unit_part(a, p), p), residue(unit_part(b, p), p)
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    if beta % 2:
        sign *= legendre(u, p)
    if alpha % 2:
        sign *= legendre(w, p)
    return sign


def candidate_places(a: RationalLike, b: RationalLike) -> List[Place]:
    """Real, 2 and the primes of a and b; the symbol is +1 everywhere else"""
    primes = set(rational_primes(a)) | set(rational_primes(b)) | {2}
    return [Place.real()] + [Place.finite(p) for p in sorted(primes)]


def symbol_support(a: RationalLike, b: RationalLike) -> List[Place]:
    """Places where (a, b)_v = -1, sorted real first"""
    return [v for v in candidate_places(a, b) if hilbert_symbol(a, b, v) == -1]


def even_valuation_rule(a: RationalLike, b: RationalLike, p: int) -> Optional[int]:
    """+1 when p is odd and v_p(a), v_p(b) are both even; None when the rule does not apply"""
    if p == 2:
        return None
    if valuation(a, p) % 2 == 0 and valuation(b, p) % 2 == 0:
        return 1
    return None


def dominance_rewrite(a: RationalLike, b: RationalLike, c: RationalLike, p: int) -> Optional[int]:
    """(a, b + c)_p as (a, b)_p when p is odd and v_p(b) < v_p(c); None otherwise"""
    if p == 2 or to_rational(c) == 0:
        return None
    if valuation(b, p) < valuation(c, p):
        return hilbert_symbol(a, b, p)
    return None
