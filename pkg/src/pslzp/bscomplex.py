"""Solvable Baumslag-Solitar groups BS(1, n) = <a, b | a b a^-1 = b^n>.

Only the pieces of the complex X_n that get used are modelled: its upper
boundary (planes, compared by where they branch apart), the commensurability
criterion, the matrix representation of BS(1, p^2) and horostrip widths.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .arith import LogDist, Q, check_prime
from .matrix import ProjMatrix

# letters: 'a', 'b' and their inverses 'A', 'B'
_INVERSE = {"a": "A", "A": "a", "b": "B", "B": "b"}
_TOKEN = re.compile(r"([abAB])(\^?\s*(?:-1|⁻¹|-|'))?")


@dataclass(frozen=True)
class BsWord:
    letters: Tuple[str, ...] = ()

    def __post_init__(self):
        letters = tuple(self.letters)
        bad = [c for c in letters if c not in _INVERSE]
        if bad:
            raise ValueError(f"not a BS generator: {bad[0]!r}")
        object.__setattr__(self, "letters", _free_reduce(letters))

    @classmethod
    def parse(cls, text: str) -> "BsWord":
        """Accepts "aba^-1", "a b a⁻¹", "abA" (capitals are inverses)."""
        text = text.replace(" ", "")
        letters = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ValueError(f"cannot parse word {text!r} at position {pos}")
            c = m.group(1)
            letters.append(_INVERSE[c] if m.group(2) else c)
            pos = m.end()
        return cls(tuple(letters))

    def __mul__(self, other: "BsWord") -> "BsWord":
        return BsWord(self.letters + other.letters)

    def inverse(self) -> "BsWord":
        return BsWord(tuple(_INVERSE[c] for c in reversed(self.letters)))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return "".join(self.letters) or "1"


def _free_reduce(letters: Sequence[str]) -> Tuple[str, ...]:
    out = []
    for c in letters:
        if out and out[-1] == _INVERSE[c]:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def relator(n: int) -> BsWord:
    """The defining relator a b a^-1 b^-n."""
    return BsWord(("a", "b", "A") + ("B",) * n)


def phi_generators(p: int) -> dict:
    check_prime(p)
    A = ProjMatrix(p, 0, 0, Fraction(1, p))
    B = ProjMatrix(1, 1, 0, 1)
    return {"a": A, "A": A.inverse(), "b": B, "B": B.inverse()}


def phi_embed(w: BsWord, p: int) -> ProjMatrix:
    """Image of a word of BS(1, p^2) under a -> diag(p, 1/p), b -> [[1,1],[0,1]]."""
    gens = phi_generators(p)
    result = ProjMatrix.identity()
    for c in w.letters:
        result = result @ gens[c]
    return result


def integer_root(n: int, k: int) -> Optional[int]:
    """The integer r >= 1 with r**k == n, if there is one."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    lo, hi = 1, 1 << (n.bit_length() // k + 1)
    while lo <= hi:
        mid = (lo + hi) // 2
        v = mid**k
        if v == n:
            return mid
        if v < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def primitive_root(n: int) -> Tuple[int, int]:
    """(r, k) with n = r**k and r not itself a perfect power."""
    if n < 2:
        raise ValueError("need n >= 2")
    for k in range(n.bit_length(), 0, -1):
        r = integer_root(n, k)
        if r is not None and r >= 2:
            return r, k
    raise AssertionError("unreachable: k = 1 always succeeds")


def bs_commensurable(m: int, n: int) -> Tuple[bool, Optional[int]]:
    """Whether BS(1, m) and BS(1, n) are commensurable, with the common root.

    They are exactly when m and n are powers of one integer, i.e. when their
    primitive roots coincide.
    """
    if m < 2 or n < 2:
        raise ValueError("Baumslag-Solitar parameters must be at least 2")
    rm, _ = primitive_root(m)
    rn, _ = primitive_root(n)
    return (rm == rn, rm if rm == rn else None)


@dataclass(frozen=True)
class UpperBoundaryPoint:
    """A plane of X_n seen through a finite window of the tree T_n.

    The plane passes through a common reference vertex at height
    ``base_height``; ``digits[i]`` is the branch it takes going up from height
    ``base_height + i``.
    """

    n: int
    base_height: int
    digits: Tuple[int, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        digits = tuple(int(d) for d in self.digits)
        if any(not 0 <= d < self.n for d in digits):
            raise ValueError(f"branch digits must lie in [0, {self.n})")
        object.__setattr__(self, "digits", digits)


def agreement_height(P: UpperBoundaryPoint, R: UpperBoundaryPoint) -> Optional[int]:
    """Greatest height below which the two planes coincide; None if equal."""
    if (P.n, P.base_height, len(P.digits)) != (R.n, R.base_height, len(R.digits)):
        raise ValueError("planes are encoded over different windows")
    for i, (x, y) in enumerate(zip(P.digits, R.digits)):
        if x != y:
            return P.base_height + i
    return None


def upper_boundary_distance(P: UpperBoundaryPoint, R: UpperBoundaryPoint) -> Fraction:
    k = agreement_height(P, R)
    if k is None:
        return Fraction(0)
    return Fraction(P.n) ** -k


@dataclass(frozen=True)
class HorostripWidth:
    intrinsic: LogDist
    ambient_log: LogDist
    ambient_edges: int = 1

    def to_json(self) -> dict:
        return {
            "intrinsic": str(self.intrinsic),
            "ambient": f"{self.ambient_edges} + {self.ambient_log}",
        }


def horostrip_width(p: int, h=1) -> HorostripWidth:
    """Width of the strip between fiber heights h and p**2 h.

    Inside the horosphere (a copy of X_{p^2}) it is log(p^2); measured in the
    ambient product it also crosses one tree edge of unit length.
    """
    check_prime(p)
    h = Q(h)
    if h <= 0:
        raise ValueError("height must be positive")
    width = LogDist(p * p * h / h)
    return HorostripWidth(intrinsic=width, ambient_log=width, ambient_edges=1)
