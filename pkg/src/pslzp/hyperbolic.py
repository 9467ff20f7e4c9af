"""Horoballs in the upper half plane based at points of Q ∪ {∞}.

A horoball based at ∞ is recorded by its Euclidean height, one based at a
finite point by its Euclidean diameter.  Both transform rationally under
rational Möbius maps and the distance between two horoballs is the log of
a rational, so nothing here needs floating point.

Under the hood a horoball is the class of a vector ``±(u, w)`` in R^2:
base ``u/w``, diameter ``1/w**2`` (or height ``u**2`` when w = 0).  The
squares of the coordinates are rational even when the coordinates are not,
and the squared determinant of two such vectors is the exponential of the
distance between the horoballs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .arith import LogDist, Q, RationalLike, fmt
from .matrix import INF, Point, ProjMatrix, as_point, fmt_point, mobius_point, psl2z_transporter


class _Overlap:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OVERLAP"

    def __reduce__(self):
        return (_Overlap, ())


OVERLAP = _Overlap()

HoroDistance = Union[LogDist, _Overlap]


@dataclass(frozen=True)
class Horoball:
    base: Point
    size: Fraction

    def __post_init__(self):
        object.__setattr__(self, "base", as_point(self.base))
        size = Q(self.size)
        if size <= 0:
            raise ValueError("horoball size must be positive")
        object.__setattr__(self, "size", size)

    def to_json(self) -> dict:
        return {"base": fmt_point(self.base), "size": fmt(self.size)}


def horoball_image(g: ProjMatrix, h: Horoball) -> Horoball:
    """Image of ``h`` under the isometry induced by ``g``.

    ``g`` need not have determinant one: the induced isometry is ``g`` divided
    by ``sqrt(|det g|)``, and since only squares of the scaled entries
    appear, ``|det g|`` enters as a rational factor.
    """
    a, b, c, d = g.entries
    det = abs(g.det)
    if h.base is INF:
        t = h.size  # vector (sqrt t, 0) -> sqrt t * (a, c)
        if c == 0:
            return Horoball(INF, a * a * t / det)
        return Horoball(a / c, det / (c * c * t))
    x, D = h.base, h.size  # vector (x, 1) / sqrt D
    top = a * x + b
    bottom = c * x + d
    if bottom == 0:
        return Horoball(INF, top * top / (D * det))
    return Horoball(top / bottom, D * det / (bottom * bottom))


def horoball_argument(h1: Horoball, h2: Horoball) -> Fraction:
    """Squared lambda-length: ``exp`` of the signed distance."""
    if h1.base == h2.base:
        raise ValueError("horoballs share a base point")
    if h1.base is INF:
        return h1.size / h2.size
    if h2.base is INF:
        return h2.size / h1.size
    diff = h1.base - h2.base
    return diff * diff / (h1.size * h2.size)


def horoball_distance(h1: Horoball, h2: Horoball) -> HoroDistance:
    arg = horoball_argument(h1, h2)
    if arg <= 1:
        return OVERLAP
    return LogDist(arg)


def base_horoball(alpha, H: RationalLike) -> Horoball:
    """Horoball at ``alpha`` in the PSL2(Z)-orbit of the height-H horoball at ∞."""
    H = Q(H)
    if H <= 1:
        raise ValueError("packing parameter H must exceed 1")
    alpha = as_point(alpha)
    if alpha is INF:
        return Horoball(INF, H)
    c = alpha.denominator
    return Horoball(alpha, 1 / (c * c * H))


__all__ = [
    "Horoball",
    "OVERLAP",
    "base_horoball",
    "horoball_argument",
    "horoball_distance",
    "horoball_image",
    "mobius_point",
    "psl2z_transporter",
]
