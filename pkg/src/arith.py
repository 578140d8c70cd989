"""
Exact arithmetic - valuations, square classes, Legendre symbols, factorization
and the congruence solver used to approximate local conditions globally
"""

import functools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

from sympy import factorint, isprime, multiplicity
from sympy.functions.combinatorial.numbers import legendre_symbol
from sympy.ntheory.modular import crt

from errors import Exhausted, Inconsistent, NotCoprime, NotOddPrime, NotPrime, ParseError, ZeroArgument

if TYPE_CHECKING:
    from places_fields import Place

logger = logging.getLogger(__name__)

Rational = Fraction
RationalLike = Union[Fraction, int]

c_DEFAULT_MAX_ITERATIONS = 1_000_000


def to_rational(x: RationalLike) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def format_rational(x: RationalLike) -> str:
    """Serialize as "num/den", dropping the denominator when it is 1"""
    return str(to_rational(x))


def parse_rational(text: str) -> Fraction:
    try:
        value = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"not a rational number: {text!r}") from e
    return value


@functools.lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    """Deterministic for n < 2**64 (sympy runs Miller-Rabin on fixed bases there, BPSW above)"""
    return n >= 2 and bool(isprime(n))


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")


def valuation(x: RationalLike, p: int) -> int:
    """p-adic valuation of a nonzero rational"""
    x = to_rational(x)
    if x == 0:
        raise ZeroArgument("valuation of 0 is undefined")
    _require_prime(p)
    return int(multiplicity(p, abs(x.numerator))) - int(multiplicity(p, x.denominator))


def unit_part(x: RationalLike, p: int) -> Fraction:
    """x / p**v_p(x)"""
    x = to_rational(x)
    v = valuation(x, p)
    return x / Fraction(p) ** v


def residue(x: RationalLike, modulus: int) -> int:
    """Residue of a rational whose denominator is invertible modulo `modulus`"""
    x = to_rational(x)
    if math.gcd(x.denominator, modulus) != 1:
        raise NotCoprime(f"denominator of {x} is not invertible mod {modulus}")
    return (x.numerator * pow(x.denominator, -1, modulus)) % modulus


def legendre(u: int, p: int) -> int:
    """Legendre symbol (u/p) for an odd prime p not dividing u"""
    if p == 2 or not is_prime(p):
        raise NotOddPrime(f"{p} is not an odd prime")
    if u % p == 0:
        raise NotCoprime(f"{p} divides {u}")
    return int(legendre_symbol(u % p, p))


def square_class_test(x: RationalLike, v: Union["Place", int]) -> bool:
    """True iff x is a square in the completion Q_v"""
    x = to_rational(x)
    if x == 0:
        raise ZeroArgument("0 has no square class")
    if not isinstance(v, int):
        if v.is_real:
            return x > 0
        v = v.prime
    alpha = valuation(x, v)
    if alpha % 2:
        return False
    u = unit_part(x, v)
    if v == 2:
        return residue(u, 8) == 1
    return legendre(residue(u, v), v) == 1


def is_rational_square(x: RationalLike) -> bool:
    x = to_rational(x)
    if x < 0:
        return False
    return all(math.isqrt(n) ** 2 == n for n in (x.numerator, x.denominator))


def sqrt_bracket(t: RationalLike, scale: int) -> Tuple[Fraction, Fraction]:
    """Rationals lo <= sqrt(t) <= hi with hi - lo <= 1/scale, for t >= 0"""
    t = to_rational(t)
    if t < 0:
        raise ValueError("square root of a negative number")
    # floor(sqrt(t) * scale) from the integer square root of num * scale**2 * den / den**2
    root = math.isqrt(t.numerator * scale * scale * t.denominator) // t.denominator
    while Fraction(root + 1, scale) ** 2 <= t:
        root += 1
    while Fraction(root, scale) ** 2 > t:
        root -= 1
    lo = Fraction(root, scale)
    hi = lo if lo * lo == t else Fraction(root + 1, scale)
    return lo, hi


@dataclass(frozen=True)
class Factorization:
    """sign * prod(p**e) with primes strictly increasing"""

    sign: int
    factors: Tuple[Tuple[int, int], ...]

    def value(self) -> int:
        n = self.sign
        for p, e in self.factors:
            n *= p**e
        return n

    def primes(self) -> List[int]:
        return [p for p, _ in self.factors]

    def __str__(self) -> str:
        body = "·".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors) or "1"
        return body if self.sign > 0 else f"-{body}"


def factor(n: int) -> Factorization:
    if n == 0:
        raise ZeroArgument("cannot factor 0")
    sign = -1 if n < 0 else 1
    return Factorization(sign, tuple(sorted(factorint(abs(n)).items())))


def rational_primes(x: RationalLike) -> List[int]:
    """Primes dividing the numerator or denominator of a nonzero rational"""
    x = to_rational(x)
    if x == 0:
        raise ZeroArgument("0 has no prime support")
    support = set(factor(x.numerator).primes()) | set(factor(x.denominator).primes())
    return sorted(support)


# --- congruence solving -------------------------------------------------------


@dataclass(frozen=True)
class PrimeCondition:
    """x mod p**exponent must lie in `residues` (x is required to be p-integral)"""

    p: int
    exponent: int
    residues: FrozenSet[int]
    label: str = ""

    @property
    def modulus(self) -> int:
        return self.p**self.exponent

    @classmethod
    def residue_in(cls, p: int, exponent: int, residues: Iterable[int], label: str = "") -> "PrimeCondition":
        m = p**exponent
        return cls(p, exponent, frozenset(r % m for r in residues), label)

    @classmethod
    def affine_valuation(
        cls, p: int, n: int, slope: RationalLike = 1, offset: RationalLike = 0, label: str = ""
    ) -> "PrimeCondition":
        """v_p(slope * x + offset) = n, with slope a p-adic unit and offset p-integral"""
        if n < 0:
            raise Inconsistent(f"v_{p} of a p-integral expression cannot be {n}")
        m = p ** (n + 1)
        root = (-residue(offset, m) * residue(Fraction(1) / to_rational(slope), m)) % m
        step = p**n
        return cls(p, n + 1, frozenset((root + step * t) % m for t in range(1, p)), label or f"v_{p}(...) = {n}")

    @classmethod
    def valuation_equals(cls, p: int, n: int, label: str = "") -> "PrimeCondition":
        return cls.affine_valuation(p, n, label=label or f"v_{p}(x) = {n}")

    @classmethod
    def legendre_sign(cls, p: int, sign: int, label: str = "") -> "PrimeCondition":
        """x is a p-adic unit whose Legendre symbol mod p equals `sign`"""
        residues = [r for r in range(1, p) if legendre(r, p) == sign]
        return cls(p, 1, frozenset(residues), label or f"({'+' if sign > 0 else '-'}) residue mod {p}")

    def forced(self) -> Tuple[int, int]:
        """(residue, modulus) on which every allowed residue agrees; modulus may be 1"""
        for j in range(self.exponent, 0, -1):
            m = self.p**j
            heads = {r % m for r in self.residues}
            if len(heads) == 1:
                return heads.pop(), m
        return 0, 1

    def lift(self, exponent: int) -> "PrimeCondition":
        if exponent <= self.exponent:
            return self
        step = self.modulus
        count = self.p ** (exponent - self.exponent)
        return PrimeCondition(
            self.p, exponent, frozenset(r + j * step for r in self.residues for j in range(count)), self.label
        )

    def accepts(self, x: Fraction) -> bool:
        if x.denominator % self.p == 0:
            return False
        return residue(x, self.modulus) in self.residues


@dataclass(frozen=True)
class CongruenceSystem:
    """Conditions on a rational x = numerator / denominator with integral numerator"""

    conditions: Tuple[PrimeCondition, ...] = ()
    sign: Optional[int] = None
    interval: Optional[Tuple[Optional[Fraction], Optional[Fraction]]] = None
    denominator: int = 1

    def merged(self) -> Dict[int, PrimeCondition]:
        """One condition per prime; raises Inconsistent on an empty intersection"""
        by_prime: Dict[int, PrimeCondition] = {}
        for cond in self.conditions:
            _require_prime(cond.p)
            if not cond.residues:
                raise Inconsistent(f"no residue allowed mod {cond.modulus} ({cond.label})")
            prev = by_prime.get(cond.p)
            if prev is None:
                by_prime[cond.p] = cond
                continue
            k = max(prev.exponent, cond.exponent)
            a, b = prev.lift(k), cond.lift(k)
            common = a.residues & b.residues
            if not common:
                raise Inconsistent(f"conditions mod {cond.p} conflict: {prev.label!r} vs {cond.label!r}")
            by_prime[cond.p] = PrimeCondition(cond.p, k, common, f"{prev.label}; {cond.label}")
        return by_prime


def satisfies(system: CongruenceSystem, x: RationalLike, denominator_support: Iterable[int] = (2,)) -> bool:
    """Independent re-check of every constraint of `system` on x"""
    x = to_rational(x)
    if x == 0:
        return False
    allowed = set(denominator_support)
    if any(p not in allowed for p in factor(x.denominator).primes()):
        return False
    if system.sign is not None and (x > 0) != (system.sign > 0):
        return False
    if system.interval is not None:
        lo, hi = system.interval
        if (lo is not None and x <= lo) or (hi is not None and x >= hi):
            return False
    return all(cond.accepts(x) for cond in system.conditions)


def _outward(start: int) -> Iterator[int]:
    yield start
    k = 1
    while True:
        yield start + k
        yield start - k
        k += 1


def crt_solve(
    system: CongruenceSystem,
    denominator_support: Iterable[int] = (2,),
    max_iterations: int = c_DEFAULT_MAX_ITERATIONS,
) -> Fraction:
    """
    Find a nonzero rational meeting every constraint of `system`

    The forced residues of all conditions are combined by CRT into one
    progression r + kM; the progression is scanned outward (0, +1, -1, ...)
    and each candidate is checked against the full residue sets, the sign
    and the interval. The first hit wins.

    Raises:
        Inconsistent: residue sets conflict or the denominator is not allowed
        Exhausted: nothing found within max_iterations progression steps
    """
    d = system.denominator
    if d < 1:
        raise Inconsistent("denominator must be positive")
    allowed = set(denominator_support)
    bad = [p for p in factor(d).primes() if p not in allowed]
    if bad:
        raise Inconsistent(f"denominator {d} has primes {bad} outside the allowed support")

    merged = system.merged()
    for p in merged:
        if d % p == 0:
            raise Inconsistent(f"condition at {p} on a value with {p} in the denominator")

    # conditions on x become conditions on the integer numerator d * x
    numerator_conditions = [
        PrimeCondition(c.p, c.exponent, frozenset((r * d) % c.modulus for r in c.residues), c.label)
        for c in merged.values()
    ]
    moduli: List[int] = []
    residues: List[int] = []
    for cond in numerator_conditions:
        r, m = cond.forced()
        if m > 1:
            moduli.append(m)
            residues.append(r)
    if moduli:
        solved = crt(moduli, residues)
        if solved is None:
            raise Inconsistent("forced residues are incompatible")
        r0, modulus = int(solved[0]), int(solved[1])
    else:
        r0, modulus = 0, 1
    logger.debug("crt progression %d mod %d over %d conditions", r0, modulus, len(numerator_conditions))

    lo = hi = None
    if system.interval is not None:
        lo, hi = system.interval
    start = r0
    if lo is not None:
        # first progression member strictly above the scaled lower end
        bound = math.floor(lo * d)
        start = r0 + ((bound - r0) // modulus + 1) * modulus

    below_done = above_done = False
    for steps, k in enumerate(_outward(0)):
        if steps >= max_iterations:
            break
        n = start + k * modulus
        x = Fraction(n, d)
        if lo is not None and x <= lo:
            below_done = True
            if above_done:
                break
            continue
        if hi is not None and x >= hi:
            above_done = True
            if below_done:
                break
            continue
        if n == 0:
            continue
        if system.sign is not None and (n > 0) != (system.sign > 0):
            continue
        if all(residue(n, c.modulus) in c.residues for c in numerator_conditions):
            logger.debug("crt_solve hit after %d steps: %s", steps, x)
            return x
    raise Exhausted(f"no solution within {max_iterations} progression steps (modulus {modulus})")
