"""Exact rationals, p-adic valuations and logarithmic distances.

Every scalar in the package is a :class:`fractions.Fraction`.  Distances
that are logarithms of rationals are carried as :class:`LogDist`, which
stores the argument of the logarithm so that comparisons stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Union

Rational = Fraction
RationalLike = Union[int, Fraction, str]


def Q(x: RationalLike) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def fmt(x: Fraction) -> str:
    """Serialize as "num/den", dropping the denominator when it is 1."""
    return str(Q(x))


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or isinstance(p, bool) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")
    return p


@total_ordering
class _Infinity:
    """Valuation of zero.  Larger than every integer; absorbs addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("INFINITY")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __neg__(self):
        raise ArithmeticError("negating an infinite valuation")

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

Valuation = Union[int, _Infinity]


def _int_val(n: int, p: int) -> int:
    # n != 0
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def val_p(x: RationalLike, p: int) -> Valuation:
    """p-adic valuation; ``INFINITY`` for zero."""
    check_prime(p)
    x = Q(x)
    if x == 0:
        return INFINITY
    return _int_val(x.numerator, p) - _int_val(x.denominator, p)


def abs_p(x: RationalLike, p: int) -> Fraction:
    """p-adic absolute value ``p**(-val_p(x))``, and 0 at 0."""
    v = val_p(x, p)
    if v is INFINITY:
        return Fraction(0)
    return Fraction(p) ** -v


def unit_part(x: RationalLike, p: int) -> Fraction:
    """``x / p**val_p(x)``: the part of a nonzero rational prime to p."""
    x = Q(x)
    if x == 0:
        raise ValueError("zero has no unit part")
    return x / Fraction(p) ** val_p(x, p)


def prime_to_p(n: int, p: int) -> int:
    """Strip every factor p from a nonzero integer."""
    n = abs(n)
    if n == 0:
        raise ValueError("zero has no prime-to-p part")
    while n % p == 0:
        n //= p
    return n


def mod_p_power(x: RationalLike, p: int, m: int) -> Fraction:
    """Canonical representative of ``x mod p**m Z_p``.

    The result has a p-power denominator and lies in ``[0, p**m)``.
    """
    x = Q(x)
    v = val_p(x, p)
    if v is INFINITY or v >= m:
        return Fraction(0)
    j = v  # j < m, and x / p**j is a p-adic unit
    z = x / Fraction(p) ** j
    modulus = p ** (m - j)
    residue = z.numerator * pow(z.denominator, -1, modulus) % modulus
    return Fraction(residue) * Fraction(p) ** j


def ceil_log(x: RationalLike, base: int) -> int:
    """Smallest integer e with ``base**e >= x`` for rational x > 0."""
    x = Q(x)
    if x <= 0:
        raise ValueError("logarithm of a non-positive number")
    if base < 2:
        raise ValueError("base must be at least 2")
    e = 0
    power = Fraction(1)
    while power < x:
        power *= base
        e += 1
    while power / base >= x:
        power /= base
        e -= 1
    return e


@total_ordering
@dataclass(frozen=True)
class LogDist:
    """The distance ``log(argument)``, held exactly through its argument."""

    argument: Fraction

    def __post_init__(self):
        arg = Q(self.argument)
        if arg <= 0:
            raise ValueError("LogDist argument must be positive")
        object.__setattr__(self, "argument", arg)

    def __add__(self, other: "LogDist") -> "LogDist":
        return logdist_combine(self, other)

    def __lt__(self, other):
        if not isinstance(other, LogDist):
            return NotImplemented
        return self.argument < other.argument

    def __str__(self):
        return f"log({fmt(self.argument)})"


def logdist_combine(a: LogDist, b: LogDist) -> LogDist:
    return LogDist(a.argument * b.argument)
