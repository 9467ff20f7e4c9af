"""Rational matrices as commensurators of PSL2(Z[1/p]).

Conjugating PSL2(Z[1/p]) by a rational matrix only ever introduces
denominators from a fixed finite set of primes other than p; the profile
below measures that set on balls of words.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Dict, List, Sequence

from .arith import Q, RationalLike, check_prime, prime_to_p
from .matrix import INF, ProjMatrix, as_point, mobius_point


def transporter(alpha, beta) -> ProjMatrix:
    """A matrix sending alpha to 0 and beta to ∞."""
    alpha, beta = as_point(alpha), as_point(beta)
    if alpha == beta:
        raise ValueError("transporter needs two distinct points")
    if beta is INF:
        g = ProjMatrix(1, -alpha, 0, 1)
    elif alpha is INF:
        g = ProjMatrix(0, 1, 1, -beta)
    else:
        g = ProjMatrix(1, -alpha, 1, -beta)
    assert mobius_point(g, alpha) == 0 and mobius_point(g, beta) is INF
    return g


def conjugate(g: ProjMatrix, M: ProjMatrix) -> ProjMatrix:
    return g @ M @ g.inverse()


def diagonal_rescaler(alpha: RationalLike) -> ProjMatrix:
    """``diag(1, alpha)``, acting on the boundary as x -> x / alpha."""
    alpha = Q(alpha)
    if alpha <= 0:
        raise ValueError("rescaling factor must be positive")
    return ProjMatrix(1, 0, 0, alpha)


def in_psl2_zp(M: ProjMatrix, p: int) -> bool:
    """Whether the stored representative has entries in Z[1/p] and det ±1."""
    return abs(M.det) == 1 and all(prime_to_p(x.denominator, p) == 1 for x in M.entries)


def reduced_words(n_gens: int, maxlen: int):
    """Freely reduced words over generators 0..n-1 and their inverses
    n..2n-1, grouped by length (lengths 0..maxlen)."""
    inv = lambda i: (i + n_gens) % (2 * n_gens)
    levels = [[()]]
    for _ in range(maxlen):
        nxt = []
        for w in levels[-1]:
            for i in range(2 * n_gens):
                if w and w[-1] == inv(i):
                    continue
                nxt.append(w + (i,))
        levels.append(nxt)
    return levels


@dataclass
class DenominatorProfile:
    d: int
    maxlen: int
    stable: bool
    history: List[int] = field(default_factory=list)  # d after each length
    words: int = 0

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "maxlen": self.maxlen,
            "stable": self.stable,
            "status": "STABLE" if self.stable else "UNSTABLE",
            "history": self.history,
            "words": self.words,
        }


def denominator_profile(g: ProjMatrix, generators: Sequence[ProjMatrix], maxlen: int, p: int) -> DenominatorProfile:
    """lcm of the prime-to-p parts of entry denominators of ``g w g^-1`` over
    all reduced words w of length at most ``maxlen``."""
    check_prime(p)
    if maxlen < 1:
        raise ValueError("maxlen must be at least 1")
    for M in generators:
        if not in_psl2_zp(M, p):
            raise ValueError(f"generator {M!r} is not in PSL2(Z[1/p])")
    n = len(generators)
    letters = list(generators) + [M.inverse() for M in generators]
    g_inv = g.inverse()
    inv = lambda i: (i + n) % (2 * n)

    d = 1
    history = []
    count = 0
    # frontier: (last letter, conjugated word) pairs; conjugating by g is a
    # homomorphism, so extend g w g^-1 by g s g^-1
    conj_letters = [g @ s @ g_inv for s in letters]
    frontier = [(None, ProjMatrix.identity())]
    for _ in range(maxlen):
        nxt = []
        for last, C in frontier:
            for i, S in enumerate(conj_letters):
                if last is not None and i == inv(last):
                    continue
                W = C @ S
                d = reduce(lcm, (prime_to_p(x.denominator, p) for x in W.entries), d)
                nxt.append((i, W))
        count += len(nxt)
        history.append(d)
        frontier = nxt
    stable = maxlen >= 2 and history[-1] == history[-2]
    return DenominatorProfile(d, maxlen, stable, history, count)


def det_denominator_bound(g: ProjMatrix, p: int) -> int:
    """Prime-to-p part of det of the primitive integral form of g.

    For M in SL2(Z[1/p]), ``g M g^-1 = g M adj(g) / det(g)``, so every
    profile value divides this number.
    """
    return prime_to_p(int(g.integral().det), p)


def standard_generators(p: int) -> Dict[str, ProjMatrix]:
    check_prime(p)
    A = ProjMatrix(p, 0, 0, Fraction(1, p))
    B = ProjMatrix(1, 1, 0, 1)
    return {"A": A, "B": B, "BiA": B.inverse() @ A}
