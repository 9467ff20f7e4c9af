"""The Bruhat-Tits tree of PGL2(Q_p), restricted to rational data.

A vertex is the homothety class of the Z_p-column lattice of
``[[p**m, b], [0, 1]]`` and is stored as the pair ``(m, b)`` with ``b``
reduced into ``[0, p**m)``.  Equivalently it is the closed ball
``b + p**m Z_p`` of Q_p, which is what makes the distance and line
formulas below short: going up in height shrinks the ball, ends at finite
points are limits of shrinking balls and the end at ∞ is reached as the
height goes to -∞.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

from .arith import Q, RationalLike, check_prime, fmt, mod_p_power, val_p
from .matrix import INF, Point, ProjMatrix, as_point, fmt_point, mobius_point, point_key


@dataclass(frozen=True, order=True)
class TreeVertex:
    m: int
    b: Fraction

    def label(self) -> str:
        return f"{self.m}:{fmt(self.b)}"

    def to_json(self) -> dict:
        return {"m": self.m, "b": fmt(self.b)}


class BruhatTitsTree:
    """The (p+1)-regular tree T_p together with the PGL2(Q) action on it."""

    def __init__(self, p: int):
        self.p = check_prime(p)
        self.root = TreeVertex(0, Fraction(0))

    def __repr__(self):
        return f"BruhatTitsTree({self.p})"

    def vertex(self, m: int, b: RationalLike = 0) -> TreeVertex:
        """The vertex of the ball ``b + p**m Z_p``; b is reduced mod p**m."""
        return TreeVertex(int(m), mod_p_power(Q(b), self.p, m))

    def basis(self, v: TreeVertex) -> ProjMatrix:
        return ProjMatrix(Fraction(self.p) ** v.m, v.b, 0, 1)

    def canonicalize(self, basis: ProjMatrix) -> TreeVertex:
        """Vertex of the lattice spanned over Z_p by the columns of ``basis``."""
        p = self.p
        a, b, c, d = basis.entries
        # Column operations over Z_p: put the column whose lower entry has the
        # smaller valuation second, then clear the lower-left entry.
        if c != 0 and (d == 0 or val_p(c, p) < val_p(d, p)):
            a, b, c, d = b, a, d, c
        if c != 0:
            t = c / d  # in Z_p
            a, c = a - t * b, Fraction(0)
        # columns (a, 0), (b, d); rescale by 1/d and make the pivot a power of p
        m = val_p(a / d, p)
        return self.vertex(m, b / d)

    def act(self, g: ProjMatrix, v: TreeVertex) -> TreeVertex:
        return self.canonicalize(g @ self.basis(v))

    def neighbors(self, v: TreeVertex) -> List[TreeVertex]:
        p = self.p
        step = Fraction(p) ** v.m
        ups = [self.vertex(v.m + 1, v.b + t * step) for t in range(p)]
        return ups + [self.vertex(v.m - 1, v.b)]

    def height(self, v: TreeVertex) -> int:
        return v.m

    def distance(self, u: TreeVertex, v: TreeVertex) -> int:
        join = min(u.m, v.m, val_p(u.b - v.b, self.p))
        return u.m + v.m - 2 * join

    def ball(self, center: TreeVertex, radius: int) -> List[TreeVertex]:
        """Vertices within ``radius`` of ``center`` in BFS order."""
        return list(self.bfs(center, radius))

    def bfs(self, center: TreeVertex, radius: int) -> Iterator[TreeVertex]:
        seen = {center}
        queue = deque([(center, 0)])
        while queue:
            v, r = queue.popleft()
            yield v
            if r == radius:
                continue
            for w in self.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    queue.append((w, r + 1))

    def bfs_distances(self, center: TreeVertex, radius: int) -> dict:
        dist = {center: 0}
        queue = deque([center])
        while queue:
            v = queue.popleft()
            if dist[v] == radius:
                continue
            for w in self.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    def edges(self, vertices) -> List[Tuple[TreeVertex, TreeVertex]]:
        """Edges among ``vertices``, each oriented from lower to higher height."""
        vs = set(vertices)
        out = []
        for v in sorted(vs):
            for w in self.neighbors(v)[:-1]:
                if w in vs:
                    out.append((v, w))
        return out

    def line(self, e1, e2) -> "TreeLine":
        return TreeLine(self, as_point(e1), as_point(e2))

    def dist_to_line(self, v: TreeVertex, line: "TreeLine") -> int:
        return line.distance_to(v)


def mobius_end(g: ProjMatrix, e: Point) -> Point:
    return mobius_point(g, e)


class TreeLine:
    """Bi-infinite geodesic of T_p joining two rational ends.

    The end at a finite point alpha is approached through the vertices
    ``(m, alpha mod p**m)`` as m grows; the end at ∞ through ``(m, 0)`` as m
    decreases.  Vertices are only ever produced inside a height window.
    """

    def __init__(self, tree: BruhatTitsTree, e1: Point, e2: Point):
        if e1 == e2:
            raise ValueError("a line needs two distinct ends")
        self.tree = tree
        self.ends = (e1, e2)
        p = tree.p
        if e1 is INF or e2 is INF:
            self.confluence_height: Optional[int] = None
        else:
            self.confluence_height = val_p(e1 - e2, p)

    @property
    def p(self) -> int:
        return self.tree.p

    def end_pair(self) -> frozenset:
        return frozenset(self.ends)

    def __eq__(self, other):
        if not isinstance(other, TreeLine):
            return NotImplemented
        return self.p == other.p and self.end_pair() == other.end_pair()

    def __hash__(self):
        return hash((self.p, self.end_pair()))

    def __repr__(self):
        return "TreeLine(p={}, {}, {})".format(self.p, *map(fmt_point, self.ends))

    def confluence(self) -> Optional[TreeVertex]:
        """Top vertex of the two rays for a line between two finite ends."""
        if self.confluence_height is None:
            return None
        return self.tree.vertex(self.confluence_height, self.ends[0])

    def _ray(self, alpha: Fraction, heights) -> List[TreeVertex]:
        return [self.tree.vertex(m, alpha) for m in heights]

    def vertices(self, lo: int, hi: int) -> List[TreeVertex]:
        """Line vertices with height in ``[lo, hi]``, ordered from the first
        end to the second."""
        e1, e2 = self.ends
        if e2 is INF:
            return self._ray(e1, range(hi, lo - 1, -1))
        if e1 is INF:
            return self._ray(e2, range(lo, hi + 1))
        nu = self.confluence_height
        start = max(lo, nu)
        down = self._ray(e1, range(hi, start - 1, -1))
        up = self._ray(e2, range(max(start, nu + 1), hi + 1))
        return down + up

    def contains(self, v: TreeVertex) -> bool:
        p = self.p
        finite = [e for e in self.ends if e is not INF]
        if len(finite) == 1:
            return v.b == mod_p_power(finite[0], p, v.m)
        if v.m < self.confluence_height:
            return False
        return any(v.b == mod_p_power(e, p, v.m) for e in finite)

    def __contains__(self, v):
        return self.contains(v)

    def _descent(self, v: TreeVertex, e: Fraction) -> int:
        # height where the geodesic from v towards the end e turns upward
        return min(v.m, val_p(v.b - e, self.p))

    def distance_to(self, v: TreeVertex) -> int:
        e1, e2 = self.ends
        if e1 is INF or e2 is INF:
            alpha = e2 if e1 is INF else e1
            return v.m - self._descent(v, alpha)
        return v.m - self._descent(v, e1) - self._descent(v, e2) + self.confluence_height

    def projection(self, v: TreeVertex) -> TreeVertex:
        """Nearest vertex of the line to ``v``."""
        e1, e2 = self.ends
        tree = self.tree
        if e1 is INF or e2 is INF:
            alpha = e2 if e1 is INF else e1
            return tree.vertex(self._descent(v, alpha), alpha)
        nu = self.confluence_height
        for e in (e1, e2):
            c = self._descent(v, e)
            if c > nu:
                return tree.vertex(c, e)
        return tree.vertex(nu, e1)

    def image(self, g: ProjMatrix) -> "TreeLine":
        return TreeLine(self.tree, mobius_point(g, self.ends[0]), mobius_point(g, self.ends[1]))


def line_between_ends(tree: BruhatTitsTree, e1, e2) -> TreeLine:
    return tree.line(e1, e2)


def sorted_ends(a: Point, b: Point) -> Tuple[Point, Point]:
    return tuple(sorted((a, b), key=point_key))
