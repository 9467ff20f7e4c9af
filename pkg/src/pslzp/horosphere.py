"""Horospheres of H^2 x T_p: one horoball per tree vertex, all at one base.

The horosphere at ∞ has height ``p**m * H`` over the vertex ``(m, b)``.
Every other horosphere is transported from it by a PSL2(Z) matrix, which
fixes the basepoint vertex.  The fiber distance between two horospheres is
constant along their closeness line and gains a factor ``p**2`` per unit of
tree distance away from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional

from .arith import Q, RationalLike
from .hyperbolic import Horoball, HoroDistance, horoball_argument, horoball_distance, horoball_image
from .matrix import INF, Point, ProjMatrix, as_point, mobius_point, psl2z_transporter
from .tree import BruhatTitsTree, TreeLine, TreeVertex

DEFAULT_H = Fraction(2)

# Multiplicative growth of the fiber-distance argument per unit of tree
# distance from the closeness line is p**GROWTH_EXPONENT.
GROWTH_EXPONENT = 2


def _check_H(H) -> Fraction:
    H = Q(H)
    if H <= 1:
        raise ValueError("packing parameter H must exceed 1")
    return H


@dataclass(frozen=True)
class Horosphere:
    base: Point
    H: Fraction
    tree: BruhatTitsTree

    def __post_init__(self):
        object.__setattr__(self, "base", as_point(self.base))
        object.__setattr__(self, "H", _check_H(self.H))

    def fiber(self, v: TreeVertex, transporter: Optional[ProjMatrix] = None) -> Horoball:
        return fiber(self, v, transporter)


def horosphere(tree: BruhatTitsTree, base, H: RationalLike = DEFAULT_H) -> Horosphere:
    return Horosphere(as_point(base), Q(H), tree)


def fiber(sigma: Horosphere, v: TreeVertex, transporter: Optional[ProjMatrix] = None) -> Horoball:
    """The horoball of ``sigma`` over vertex ``v``.

    ``transporter`` may be any matrix of PGL2(Z[1/p]) taking ∞ to the base;
    the result does not depend on the choice.
    """
    tree = sigma.tree
    if sigma.base is INF and transporter is None:
        return Horoball(INF, Fraction(tree.p) ** v.m * sigma.H)
    g = transporter if transporter is not None else psl2z_transporter(sigma.base)
    if mobius_point(g, INF) != sigma.base:
        raise ValueError("transporter does not carry ∞ to the horosphere base")
    w = tree.act(g.inverse(), v)
    return horoball_image(g, Horoball(INF, Fraction(tree.p) ** w.m * sigma.H))


def _pair(tree, alpha, beta, H):
    alpha, beta = as_point(alpha), as_point(beta)
    if alpha == beta:
        raise ValueError("horospheres must have distinct bases")
    return horosphere(tree, alpha, H), horosphere(tree, beta, H)


def fiber_argument(tree: BruhatTitsTree, alpha, beta, v: TreeVertex, H=DEFAULT_H) -> Fraction:
    s1, s2 = _pair(tree, alpha, beta, H)
    return horoball_argument(fiber(s1, v), fiber(s2, v))


def fiber_distance(tree: BruhatTitsTree, alpha, beta, v: TreeVertex, H=DEFAULT_H) -> HoroDistance:
    s1, s2 = _pair(tree, alpha, beta, H)
    return horoball_distance(fiber(s1, v), fiber(s2, v))


def closeness_line(tree: BruhatTitsTree, alpha, beta) -> TreeLine:
    alpha, beta = as_point(alpha), as_point(beta)
    if alpha == beta:
        raise ValueError("closeness line needs distinct bases")
    return tree.line(alpha, beta)


class ProfileRow(NamedTuple):
    vertex: TreeVertex
    k: int
    argument: Fraction


def profile_center(tree: BruhatTitsTree, line: TreeLine) -> TreeVertex:
    """Nearest point of the line to the basepoint; the confluence vertex when
    the basepoint lies above it."""
    return line.projection(tree.root)


def growth_profile(tree: BruhatTitsTree, alpha, beta, radius: int, H=DEFAULT_H) -> List[ProfileRow]:
    """Fiber-distance arguments on the ball of ``radius`` around the line's
    center, in BFS order."""
    s1, s2 = _pair(tree, alpha, beta, H)
    line = closeness_line(tree, s1.base, s2.base)
    rows = []
    for v in tree.bfs(profile_center(tree, line), radius):
        arg = horoball_argument(fiber(s1, v), fiber(s2, v))
        rows.append(ProfileRow(v, line.distance_to(v), arg))
    return rows


def growth_violations(rows: List[ProfileRow], p: int, exponent: int = GROWTH_EXPONENT) -> List[ProfileRow]:
    """Rows whose argument differs from ``min_on_line * p**(exponent*k)``."""
    on_line = [r.argument for r in rows if r.k == 0]
    if not on_line:
        raise ValueError("profile contains no vertex of the closeness line")
    base = min(on_line)
    return [r for r in rows if r.argument != base * Fraction(p) ** (exponent * r.k)]


def horosphere_table(tree: BruhatTitsTree, base, lo: int, hi: int, H=DEFAULT_H, radius: int = 0):
    """Fibers of one horosphere over the line to ∞ (or to 0 when base is ∞),
    thickened by ``radius``; rows are (vertex, k, horoball)."""
    sigma = horosphere(tree, base, H)
    other = 0 if sigma.base is INF else INF
    line = tree.line(other, sigma.base)
    seen = set()
    rows = []
    for v in line.vertices(lo, hi):
        for w in tree.bfs(v, radius):
            if w in seen:
                continue
            seen.add(w)
            rows.append((w, line.distance_to(w), fiber(sigma, w)))
    return rows
