"""Projective 2x2 rational matrices and the boundary line Q ∪ {∞}.

A :class:`ProjMatrix` keeps the representative it was built from, so
products of determinant-one matrices stay determinant one, but equality and
hashing go through the projective canonical form: coprime integer entries
with the first nonzero entry positive.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Union

from .arith import Q, RationalLike, fmt


class _PointAtInfinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_PointAtInfinity, ())


INF = _PointAtInfinity()

Point = Union[Fraction, _PointAtInfinity]


def as_point(x) -> Point:
    """Parse a boundary point: a rational, or one of "inf", "oo", "∞"."""
    if x is INF:
        return INF
    if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "oo", "∞"):
        return INF
    return Q(x)


def fmt_point(x: Point) -> str:
    return "inf" if x is INF else fmt(x)


def point_key(x: Point):
    """Total order on Q ∪ {∞} with ∞ last; used for deterministic output."""
    return (1, 0) if x is INF else (0, x)


class ProjMatrix:
    __slots__ = ("a", "b", "c", "d", "_canon")

    def __init__(self, a: RationalLike, b: RationalLike, c: RationalLike, d: RationalLike):
        self.a, self.b, self.c, self.d = Q(a), Q(b), Q(c), Q(d)
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("singular matrix")
        self._canon = None

    @classmethod
    def identity(cls) -> "ProjMatrix":
        return cls(1, 0, 0, 1)

    @classmethod
    def parse(cls, text: str) -> "ProjMatrix":
        """Read "a,b;c,d" (rows separated by ';')."""
        rows = [r.split(",") for r in text.split(";")]
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValueError(f"expected 'a,b;c,d', got {text!r}")
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @property
    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def canonical(self) -> tuple:
        if self._canon is None:
            den = reduce(lcm, (x.denominator for x in self.entries))
            ints = [int(x * den) for x in self.entries]
            g = reduce(gcd, ints)
            ints = [x // g for x in ints]
            if next(x for x in ints if x != 0) < 0:
                ints = [-x for x in ints]
            self._canon = tuple(ints)
        return self._canon

    def integral(self) -> "ProjMatrix":
        """The canonical primitive integral representative."""
        return ProjMatrix(*self.canonical())

    def __eq__(self, other):
        if not isinstance(other, ProjMatrix):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def __matmul__(self, other: "ProjMatrix") -> "ProjMatrix":
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return ProjMatrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    __mul__ = __matmul__

    def inverse(self) -> "ProjMatrix":
        a, b, c, d = self.entries
        det = self.det
        return ProjMatrix(d / det, -b / det, -c / det, a / det)

    def __pow__(self, n: int) -> "ProjMatrix":
        if n < 0:
            return self.inverse() ** (-n)
        result = ProjMatrix.identity()
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def scaled(self, s: RationalLike) -> "ProjMatrix":
        s = Q(s)
        return ProjMatrix(*(s * x for x in self.entries))

    def __call__(self, x: Point) -> Point:
        return mobius_point(self, x)

    def __repr__(self):
        return "ProjMatrix([[{}, {}], [{}, {}]])".format(*map(fmt, self.entries))

    def to_json(self) -> list:
        return [[fmt(self.a), fmt(self.b)], [fmt(self.c), fmt(self.d)]]


def mobius_point(g: ProjMatrix, x: Point) -> Point:
    """Fractional linear action on Q ∪ {∞}."""
    a, b, c, d = g.entries
    if x is INF:
        return INF if c == 0 else a / c
    num = a * x + b
    den = c * x + d
    if den == 0:
        return INF
    return num / den


def product(ms: Iterable[ProjMatrix]) -> ProjMatrix:
    return reduce(lambda u, v: u @ v, ms, ProjMatrix.identity())


def psl2z_transporter(x: Point) -> ProjMatrix:
    """A determinant-one integral matrix sending ∞ to x."""
    if x is INF:
        return ProjMatrix.identity()
    a, c = x.numerator, x.denominator
    # a*d - b*c = 1
    g, s, t = _ext_gcd(a, c)
    assert g == 1
    return ProjMatrix(a, -t, c, s)


def _ext_gcd(a: int, b: int):
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t
