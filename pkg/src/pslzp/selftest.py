"""Quick oracle checks behind each CLI subcommand's ``--selftest``."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from . import bscomplex, commensurator, horosphere, rigidity
from .hyperbolic import base_horoball, horoball_argument, horoball_image
from .matrix import INF, ProjMatrix
from .tree import BruhatTitsTree

Check = Tuple[str, bool]


def tree_checks(p: int) -> List[Check]:
    T = BruhatTitsTree(p)
    ball = T.ball(T.root, 3)
    bfs = T.bfs_distances(T.root, 3)
    gens = [ProjMatrix(p, 0, 0, Fraction(1, p)), ProjMatrix(1, 1, 0, 1), ProjMatrix(0, -1, 1, 0)]
    return [
        ("valence", all(len(set(T.neighbors(v))) == p + 1 for v in ball)),
        ("distance-vs-bfs", all(T.distance(T.root, v) == d for v, d in bfs.items())),
        (
            "action-is-isometry",
            all(T.distance(T.act(g, u), T.act(g, v)) == T.distance(u, v) for g in gens for u in ball[:8] for v in ball),
        ),
        (
            "line-equivariance",
            all(T.act(g, v) in T.line(0, INF).image(g) for g in gens for v in T.line(0, INF).vertices(-3, 3)),
        ),
    ]


def horo_checks(p: int, H=Fraction(2)) -> List[Check]:
    T = BruhatTitsTree(p)
    rows = horosphere.growth_profile(T, 0, INF, 3, H)
    return [
        ("packing-constant", horosphere.fiber_argument(T, 0, INF, T.root, H) == H * H),
        ("growth-law", not horosphere.growth_violations(rows, p)),
        (
            "orbit-oracle",
            all(horoball_argument(_orbit_fiber(T, 0, r.vertex, H), _orbit_fiber(T, INF, r.vertex, H)) == r.argument for r in rows),
        ),
    ]


def _orbit_fiber(T: BruhatTitsTree, alpha, v, H):
    # translate the basepoint horoball of h^-1(alpha) by h = basis(v)
    h = T.basis(v)
    return horoball_image(h, base_horoball(h.inverse()(alpha), H))


def bs_checks(p: int) -> List[Check]:
    n = p * p
    rel = bscomplex.phi_embed(bscomplex.relator(n), p)
    oracle = lambda m, k: any(
        any(r**i == m for i in range(1, 8)) and any(r**j == k for j in range(1, 8)) for r in range(2, 31)
    )
    return [
        ("relation", rel == ProjMatrix.identity()),
        (
            "commensurability-oracle",
            all(bscomplex.bs_commensurable(a, b)[0] == oracle(a, b) for a in range(2, 31) for b in range(2, 31)),
        ),
        ("strip-width", bscomplex.horostrip_width(p).intrinsic.argument == p * p),
    ]


def rig_checks(p: int) -> List[Check]:
    rng = random.Random(1)
    ok = True
    for _ in range(100):
        a, b, c = (Fraction(rng.randint(-50, 50), p ** rng.randint(0, 3)) for _ in range(3))
        if a == b or a == c:
            continue
        P = rigidity.Parallelogram(a, b, c, b - a + c)
        Q = P.transformed(rng.randint(-3, 3), Fraction(rng.randint(-9, 9), rng.randint(1, 5)), p)
        ok &= rigidity.per(P, p) == rigidity.per(Q, p) and rigidity.shape(P, p) == rigidity.shape(Q, p)
    L = 3 if p != 3 else 5
    w = rigidity.Window(p, L, 1, 1)
    ident = rigidity.linear_map(1, w)
    report = rigidity.verify_plemma(ident, L, w, s0=0)
    return [("invariance", ok), ("identity-plemma", report.ok and report.admitted > 0)]


def comm_checks(p: int) -> List[Check]:
    pts = [Fraction(0), Fraction(1), Fraction(-2, 3), INF, Fraction(5, 7)]
    gens = commensurator.standard_generators(p)
    q = 2 if p != 2 else 3
    prof = commensurator.denominator_profile(commensurator.diagonal_rescaler(q), [gens["A"], gens["B"]], 4, p)
    return [
        (
            "transporter",
            all(
                commensurator.transporter(a, b)(a) == 0 and commensurator.transporter(a, b)(b) is INF
                for a in pts
                for b in pts
                if a != b
            ),
        ),
        ("profile-stable", prof.stable and prof.d == q),
    ]


SELFTESTS: Dict[str, Callable[[int], List[Check]]] = {
    "tree": tree_checks,
    "horo": horo_checks,
    "bs": bs_checks,
    "rig": rig_checks,
    "comm": comm_checks,
}
