"""Action rigidity on the diagonal lattice of R x Q_p.

A point of the lattice is a rational ``a`` read simultaneously as a real
number and as a p-adic number, so a plain :class:`~fractions.Fraction`
serves as the point.  The scaling group generated by ``diag(p, 1/p)`` acts
by multiplication by ``p**2``; it stretches the real coordinate and shrinks
the p-adic one, and ``delta_H`` is the diameter after the best such
rescaling.

The module checks the parallelogram lemma on finite windows and recovers the
multiplicative constant of a map that passes it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import combinations
from math import gcd, lcm
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .arith import INFINITY, Q, RationalLike, abs_p, ceil_log, check_prime, fmt, prime_to_p, val_p

DeltaPoint = Fraction


def scale_act(k: int, x: RationalLike, p: int) -> Fraction:
    """Action of ``diag(p, 1/p)**k``: multiplication by ``p**(2k)``."""
    return Q(x) * Fraction(p) ** (2 * k)


def _spreads(S: Sequence[Fraction], p: int) -> Tuple[Fraction, Fraction]:
    # (real diameter, p-adic diameter); p-adic diameter of an ultrametric set
    # is the largest distance from any one fixed member
    x0 = S[0]
    real = max(S) - min(S)
    padic = max(abs_p(x - x0, p) for x in S)
    return real, padic


def diam(S: Iterable[RationalLike], p: int) -> Fraction:
    """Diameter for the max of the real and p-adic distances."""
    S = [Q(x) for x in S]
    if not S:
        raise ValueError("diameter of an empty set")
    return max(_spreads(S, p))


@lru_cache(maxsize=1 << 16)
def _delta_spreads(real: Fraction, padic: Fraction, p: int) -> Fraction:
    if real == 0:
        return Fraction(0)
    # max(p^2k real, p^-2k padic) is minimized next to p^4k = padic / real
    q4 = p**4
    k = ceil_log(padic / real, q4)
    return min(
        max(Fraction(p) ** (2 * j) * real, Fraction(p) ** (-2 * j) * padic)
        for j in (k - 1, k)
    )


def delta_H(S: Iterable[RationalLike], p: int) -> Fraction:
    """Scale-invariant diameter: the minimum of ``diam`` over the H-orbit."""
    S = [Q(x) for x in S]
    if not S:
        raise ValueError("diameter of an empty set")
    return _delta_spreads(*_spreads(S, p), p)


def delta_pair(x: RationalLike, y: RationalLike, p: int) -> Fraction:
    d = Q(x) - Q(y)
    return _delta_spreads(abs(d), abs_p(d, p), p)


@dataclass(frozen=True)
class Parallelogram:
    """Quadruple [[a, b], [c, d]] with a - c = b - d."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, Q(getattr(self, name)))
        if not is_parallelogram((self.a, self.b, self.c, self.d)):
            raise ValueError("a - c != b - d")

    def corners(self) -> Tuple[Fraction, ...]:
        return (self.a, self.b, self.c, self.d)

    def map(self, f: Callable[[Fraction], Fraction]) -> Tuple[Fraction, ...]:
        return tuple(f(x) for x in self.corners())

    def transformed(self, k: int, shift: RationalLike, p: int) -> "Parallelogram":
        return Parallelogram(*(scale_act(k, x, p) + Q(shift) for x in self.corners()))

    def to_json(self) -> list:
        return [fmt(x) for x in self.corners()]


def is_parallelogram(q: Sequence[RationalLike]) -> bool:
    a, b, c, d = (Q(x) for x in q)
    return a - c == b - d


def per(P: Parallelogram, p: int) -> Fraction:
    return delta_pair(P.a, P.b, p) + delta_pair(P.a, P.c, p)


def shape(P: Parallelogram, p: int) -> Optional[int]:
    """``|v(b - a) - v(c - a)|``; None when a side is degenerate."""
    vb = val_p(P.b - P.a, p)
    vc = val_p(P.c - P.a, p)
    if vb is INFINITY or vc is INFINITY:
        return None
    return abs(vb - vc)


@dataclass(frozen=True)
class FundamentalSet:
    """Orbit representatives ``a / (k p**r)``, r in {0, 1}, of the nonzero x
    in (1/k)Z[1/p] with ``delta_H({0, x}) <= D``."""

    p: int
    k: int
    D: Fraction
    reps: Tuple[Tuple[int, int], ...]  # (a, r)

    @property
    def values(self) -> Tuple[int, ...]:
        return tuple(sorted({a for a, _ in self.reps}))

    def points(self) -> List[Fraction]:
        return [Fraction(a, self.k * self.p**r) for a, r in self.reps]

    def orbit(self, lo: int, hi: int) -> List[Fraction]:
        """Orbit points ``x * p**(2j)`` for j in [lo, hi]."""
        return sorted(scale_act(j, x, self.p) for x in self.points() for j in range(lo, hi + 1))


def fundamental_set(k: int, D: RationalLike, p: int) -> FundamentalSet:
    check_prime(p)
    D = Q(D)
    if k < 1 or gcd(k, p) != 1:
        raise ValueError("k must be a positive integer prime to p")
    if D <= 0:
        raise ValueError("D must be positive")
    # delta({0, x}) >= sqrt(|x| |x|_p) = sqrt(|a| / k), so |a| <= k D^2
    bound = int(k * D * D)
    reps = []
    for a in range(-bound, bound + 1):
        if a == 0 or a % p == 0:
            continue
        for r in (0, 1):
            if delta_pair(0, Fraction(a, k * p**r), p) <= D:
                reps.append((a, r))
    return FundamentalSet(p, k, D, tuple(reps))


@dataclass(frozen=True)
class Threshold:
    B1: int
    B2: int
    B3: int
    B4: int
    R: int
    s0: int
    index: FundamentalSet

    def to_json(self) -> dict:
        return {
            "B1": self.B1,
            "B2": self.B2,
            "B3": self.B3,
            "B4": self.B4,
            "R": self.R,
            "s0": self.s0,
            "p": self.index.p,
            "k": self.index.k,
            "D": fmt(self.index.D),
            "index": [{"a": a, "r": r} for a, r in self.index.reps],
        }


class ThresholdError(ValueError):
    pass


class _IntSet:
    """Set of integers as a bitmask shifted by ``lo``."""

    def __init__(self, mask: int, lo: int):
        self.mask, self.lo = mask, lo

    @classmethod
    def of(cls, xs: Sequence[int]) -> "_IntSet":
        lo = min(xs)
        mask = 0
        for x in xs:
            mask |= 1 << (x - lo)
        return cls(mask, lo)

    def __contains__(self, x: int) -> bool:
        return x >= self.lo and (self.mask >> (x - self.lo)) & 1 == 1

    def __or__(self, other: "_IntSet") -> "_IntSet":
        lo = min(self.lo, other.lo)
        return _IntSet((self.mask << (self.lo - lo)) | (other.mask << (other.lo - lo)), lo)

    @property
    def hi(self) -> int:
        return self.lo + self.mask.bit_length() - 1

    def elements(self) -> List[int]:
        return [self.lo + i for i in range(self.mask.bit_length()) if (self.mask >> i) & 1]


def _sumset(xs: Sequence[int], ys: Sequence[int]) -> _IntSet:
    Y = _IntSet.of(ys)
    lo = min(xs) + Y.lo
    mask = 0
    for x in xs:
        mask |= Y.mask << (x + Y.lo - lo)
    return _IntSet(mask, lo)


def _sumset_valuations(S: _IntSet, p: int) -> List[int]:
    """The largest p-adic valuation among nonzero members of S, as a one
    element list (empty when S is {0}); multiples of descending powers of p
    are probed directly."""
    top = max(abs(S.lo), abs(S.hi))
    if top == 0:
        return []
    j = 0
    while p ** (j + 1) <= top:
        j += 1
    for e in range(j, -1, -1):
        q = p**e
        if any(m in S for n in range(1, top // q + 1) for m in (n * q, -n * q)):
            return [e]
    return []


def s_threshold(K0: RationalLike, k: int, D: RationalLike, p: int) -> Threshold:
    """Shape threshold above which the parallelogram lemma applies."""
    K0 = Q(K0)
    if K0 < 1:
        raise ValueError("bilipschitz constant K0 must be at least 1")
    fs = fundamental_set(k, D, p)
    a = fs.values
    if not a:
        raise ThresholdError(f"no lattice point within delta_H <= {fmt(fs.D)}; D is too small")
    R = ceil_log(K0, p)
    B1 = max(a) - min(a)
    B2 = max(a)
    neg = [-x for x in a]
    pair_vals = _sumset_valuations(_sumset(a, neg) | _sumset(a, a), p)
    triple_vals = _sumset_valuations(_sumset(_sumset(a, a).elements(), neg), p)
    if not pair_vals or not triple_vals:
        raise ThresholdError("every candidate for B3 or B4 vanishes")
    B3 = max(pair_vals)
    B4 = max(triple_vals)
    if B1 + B2 <= 0:
        raise ThresholdError("B1 + B2 must be positive")
    s0 = max(2 * ceil_log(B1 + B2, p) + 2 * R, 3 * B3 * B3 + 2 * R, 2 * B4 + 2 * R)
    return Threshold(B1, B2, B3, B4, R, s0, fs)


def height_class(S: Iterable[RationalLike], p: int) -> int:
    """Smallest M prime to p with S inside (1/M)Z[1/p]."""
    dens = [prime_to_p(Q(x).denominator, p) for x in S]
    return reduce(lcm, dens, 1)


# ---------------------------------------------------------------- windows


@dataclass(frozen=True)
class Window:
    """Grid ``(1/(L p**depth)) Z`` cut to ``[-bound, bound]``."""

    p: int
    L: int
    bound: Fraction
    depth: int

    def __post_init__(self):
        check_prime(self.p)
        if self.L < 1 or gcd(self.L, self.p) != 1:
            raise ValueError("window denominator must be a positive integer prime to p")
        object.__setattr__(self, "bound", Q(self.bound))
        if self.bound < 0 or self.depth < 0:
            raise ValueError("window bound and depth must be nonnegative")

    @property
    def step(self) -> Fraction:
        return Fraction(1, self.L * self.p**self.depth)

    @property
    def radius(self) -> int:
        return int(self.bound / self.step)

    def point(self, n: int) -> Fraction:
        return n * self.step

    def index(self, x: RationalLike) -> Optional[int]:
        n = Q(x) / self.step
        if n.denominator != 1 or abs(n) > self.radius:
            return None
        return int(n)

    def __contains__(self, x) -> bool:
        return self.index(x) is not None

    def points(self) -> List[Fraction]:
        r = self.radius
        return [self.point(n) for n in range(-r, r + 1)]

    def __len__(self):
        return 2 * self.radius + 1

    def restrict(self, q: int) -> "Window":
        """Same bound and depth over the denominator q."""
        return Window(self.p, q, self.bound, self.depth)


# ----------------------------------------------------------- tabulated maps


class MissingPoint(KeyError):
    pass


@dataclass
class TabulatedMap:
    """A map of the diagonal lattice known on finitely many points.

    ``meta`` may declare the constants the parallelogram lemma is stated
    with: ``K0`` (bilipschitz constant), ``k`` (image denominator class),
    ``D`` (image perimeter bound) and ``s0`` (shape threshold).
    """

    table: Dict[Fraction, Fraction]
    meta: Dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.table = {Q(x): Q(y) for x, y in self.table.items()}
        if len(set(self.table.values())) != len(self.table):
            raise ValueError("tabulated map is not injective")
        self.meta = {key: Q(v) for key, v in self.meta.items()}

    @classmethod
    def from_function(cls, f: Callable[[Fraction], RationalLike], points: Iterable[RationalLike], **meta):
        return cls({Q(x): Q(f(Q(x))) for x in points}, meta)

    @classmethod
    def from_json_lines(cls, lines: Iterable[str]) -> "TabulatedMap":
        table, meta = {}, {}
        for lineno, line in enumerate(lines, 1):
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if "meta" in rec:
                meta.update(rec["meta"])
                continue
            try:
                x, fx = Q(rec["x"]), Q(rec["fx"])
            except KeyError as e:
                raise ValueError(f"line {lineno}: missing field {e}") from None
            if x in table:
                raise ValueError(f"line {lineno}: duplicate point {fmt(x)}")
            table[x] = fx
        return cls(table, meta)

    def to_json_lines(self) -> str:
        out = []
        if self.meta:
            out.append(json.dumps({"meta": {k: fmt(v) for k, v in sorted(self.meta.items())}}))
        for x in sorted(self.table):
            out.append(json.dumps({"x": fmt(x), "fx": fmt(self.table[x])}))
        return "\n".join(out) + "\n"

    def __call__(self, x: RationalLike) -> Fraction:
        try:
            return self.table[Q(x)]
        except KeyError:
            raise MissingPoint(f"map is not tabulated at {fmt(Q(x))}") from None

    def __contains__(self, x):
        return Q(x) in self.table

    def normalized(self) -> "TabulatedMap":
        """``x -> phi(x) - phi(0)``, which fixes 0."""
        shift = self(0)
        return TabulatedMap({x: y - shift for x, y in self.table.items()}, dict(self.meta))

    def require_window(self, window: Window):
        missing = [x for x in window.points() if x not in self.table]
        if missing:
            raise MissingPoint(f"{len(missing)} window points untabulated, first {fmt(missing[0])}")


def bilipschitz_constant(alpha: RationalLike, p: int) -> Fraction:
    """Bilipschitz constant of ``x -> alpha x`` on R x Q_p."""
    alpha = Q(alpha)
    if alpha == 0:
        raise ValueError("multiplication by zero is not bilipschitz")
    ap = abs_p(alpha, p)
    return max(abs(alpha), 1 / abs(alpha), ap, 1 / ap)


def linear_map(alpha: RationalLike, window: Window, **meta) -> TabulatedMap:
    alpha = Q(alpha)
    meta.setdefault("K0", bilipschitz_constant(alpha, window.p))
    return TabulatedMap.from_function(lambda x: alpha * x, window.points(), **meta)


# ------------------------------------------------------ parallelogram lemma


@dataclass(frozen=True)
class Violation:
    P: Parallelogram
    image: Tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"P": self.P.to_json(), "image": [fmt(x) for x in self.image]}


@dataclass
class PlemmaReport:
    p: int
    L: int
    per_bound: Fraction
    s0: int
    threshold: Optional[Threshold]
    admitted: int
    violations: List[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "L": self.L,
            "per_bound": fmt(self.per_bound),
            "s0": self.s0,
            "threshold": self.threshold.to_json() if self.threshold else None,
            "admitted": self.admitted,
            "violations": [v.to_json() for v in self.violations],
        }


def admissible_differences(window: Window, bound: RationalLike) -> List[Tuple[int, Fraction]]:
    """Nonzero grid differences x with ``delta_H({0, x}) <= bound``, as
    (grid offset, delta) pairs sorted by offset."""
    p = window.p
    fs = fundamental_set(window.L, bound, p)
    step = window.step
    limit = 2 * window.bound
    out = {}
    for (a, r), x in zip(fs.reps, fs.points()):
        # x p^(2j) has valuation 2j - r, which must stay >= -depth
        j = -((window.depth - r) // 2)
        while True:
            y = scale_act(j, x, p)
            if abs(y) > limit:
                break
            n = y / step
            if n.denominator == 1:
                out[int(n)] = delta_pair(0, y, p)
            j += 1
    return sorted(out.items())


def derived_constants(phi: TabulatedMap, window: Window, per_bound: RationalLike) -> Tuple[int, Fraction]:
    """Image denominator class k and image perimeter bound D read off the table."""
    p = window.p
    k = height_class((phi(x) for x in window.points()), p)
    F = _image_array(phi, window)
    # delta is translation invariant, so only distinct image differences matter
    diffs = set()
    for off, _ in admissible_differences(window, per_bound):
        o = abs(off)
        diffs.update(map(int.__sub__, F[o:], F[: len(F) - o]))
    scale = _image_scale(phi, window)
    worst = max((delta_pair(0, Fraction(d, scale), p) for d in diffs), default=Fraction(0))
    return k, 2 * worst


def _image_scale(phi: TabulatedMap, window: Window) -> int:
    return reduce(lcm, (phi(x).denominator for x in window.points()), 1)


def _image_array(phi: TabulatedMap, window: Window) -> List[int]:
    """Window images as integers over a common denominator, indexed by grid
    offset from -radius."""
    scale = _image_scale(phi, window)
    return [int(phi(x) * scale) for x in window.points()]


def resolve_threshold(phi: TabulatedMap, window: Window, per_bound: RationalLike) -> Tuple[int, Optional[Threshold]]:
    if "s0" in phi.meta:
        s0 = phi.meta["s0"]
        if s0.denominator != 1:
            raise ValueError("declared s0 must be an integer")
        return int(s0), None
    K0 = phi.meta.get("K0", Fraction(1))
    if "k" in phi.meta and "D" in phi.meta:
        k, D = int(phi.meta["k"]), phi.meta["D"]
    else:
        k, D = derived_constants(phi, window, per_bound)
        k = int(phi.meta.get("k", k))
        D = phi.meta.get("D", D)
    th = s_threshold(K0, k, D, window.p)
    return th.s0, th


def _same_side(a: int, b: int, c: int, d: int) -> bool:
    return a - c == b - d


def verify_plemma(
    phi: TabulatedMap,
    L: int,
    window: Window,
    per_bound: Optional[RationalLike] = None,
    s0: Optional[int] = None,
    s0_increment: int = 0,
) -> PlemmaReport:
    """Check that every parallelogram of the window with perimeter at most
    ``per_bound`` (default L) and shape above s0 maps to a parallelogram.

    s0 comes from the map's declared constants unless given explicitly.
    """
    if window.L != L:
        window = Window(window.p, L, window.bound, window.depth)
    p = window.p
    phi.require_window(window)
    if phi(0) != 0:
        raise ValueError("map must fix 0; normalize it first")
    per_bound = Q(L if per_bound is None else per_bound)
    threshold = None
    if s0 is None:
        s0, threshold = resolve_threshold(phi, window, per_bound)
    s0 += s0_increment

    diffs = admissible_differences(window, per_bound)
    step = window.step
    vals = {off: val_p(off * step, p) for off, _ in diffs}
    r = window.radius
    admitted = 0
    violations = []
    pairs = [
        (ob, oc)
        for ob, db in diffs
        for oc, dc in diffs
        if db + dc <= per_bound and abs(vals[ob] - vals[oc]) > s0
    ]
    F = _image_array(phi, window)
    size = len(F)
    for ob, oc in pairs:
        # slide the parallelogram n, n+ob, n+oc, n+ob+oc across the window
        lo = max(0, -ob, -oc, -ob - oc)
        hi = min(size, size - ob, size - oc, size - ob - oc)
        if hi <= lo:
            continue
        admitted += hi - lo
        A, B = F[lo:hi], F[lo + ob : hi + ob]
        C, D = F[lo + oc : hi + oc], F[lo + ob + oc : hi + ob + oc]
        if all(map(_same_side, A, B, C, D)):
            continue
        for i, (fa, fb, fc, fd) in enumerate(zip(A, B, C, D)):
            if fa - fc != fb - fd:
                n = lo + i - r
                a, b, c, d = (window.point(n + o) for o in (0, ob, oc, ob + oc))
                violations.append(Violation(Parallelogram(a, b, c, d), (phi(a), phi(b), phi(c), phi(d))))
    violations.sort(key=lambda v: v.P.corners())
    return PlemmaReport(p, L, per_bound, s0, threshold, admitted, violations)


# ------------------------------------------------------- affinity extraction


class WindowTooSmall(ValueError):
    pass


@dataclass
class Extraction:
    q: int
    s0: int
    alpha: Optional[Fraction]
    generator: Optional[Fraction]
    witness: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.alpha is not None

    def to_json(self) -> dict:
        out = {"q": self.q, "s0": self.s0, "status": "ok" if self.ok else "failure"}
        if self.ok:
            out["alpha"] = fmt(self.alpha)
            out["generator"] = fmt(self.generator)
        else:
            out["witness"] = self.witness
        return out


def extract_affine(phi: TabulatedMap, q: int, window: Window, s0: Optional[int] = None) -> Extraction:
    """Recover the constant C with ``phi(x) = C x`` on the (1/q)-window.

    Distinguished pairs differ by an H-translate ``p**i / q`` of a generator.
    Starting from the pair (0, 1/q), a generator is admissible when its
    valuation is at least s0 away from that of 1/q; the window must hold one
    of the form ``1/(p**n q)``.  Each generator's difference
    ``phi(x + y) - phi(x)`` must then be the same for every x, and the
    result is checked against ``phi(x) = C x`` on the whole window.
    """
    p = window.p
    if gcd(q, p) != 1 or q < 1:
        raise ValueError("q must be a positive integer prime to p")
    w = window.restrict(q)
    phi.require_window(w)
    if phi(0) != 0:
        raise ValueError("map must fix 0; normalize it first")
    if s0 is None:
        s0, _ = resolve_threshold(phi, w, q)
    if Fraction(1, q) not in w:
        raise WindowTooSmall(f"window does not contain 1/{q}")

    omega = val_p(Fraction(1, q), p)
    gens = []
    i = -w.depth
    while Fraction(p) ** i / q <= w.bound:
        gens.append(Fraction(p) ** i / q)
        i += 1
    admissible = [y for y in gens if y < Fraction(1, q) and abs(omega - val_p(y, p)) >= s0]
    if not admissible:
        raise WindowTooSmall(
            f"no generator 1/(p^n q) with n >= {s0} in a window of depth {w.depth}"
        )
    generator = admissible[-1]  # coarsest admissible generator: n == s0 when the window allows

    r = w.radius
    F = _image_array(phi, w)
    scale = _image_scale(phi, w)
    for y in gens:
        off = int(y / w.step)
        dy = F[r + off] - F[r]
        for i, (lo, hi) in enumerate(zip(F, F[off:])):
            if hi - lo != dy:
                x = w.point(i - r)
                witness = {
                    "identity": "phi(x+z) - phi(x) = phi(y+z) - phi(y)",
                    "x": fmt(x),
                    "y": "0",
                    "z": fmt(y),
                    "lhs": fmt(Fraction(hi - lo, scale)),
                    "rhs": fmt(Fraction(dy, scale)),
                }
                return Extraction(q, s0, None, generator, witness)

    alpha = q * phi(Fraction(1, q))
    # phi(n step) = alpha n step, compared over the common denominator
    slope = alpha * w.step * scale
    for i, fx in enumerate(F):
        if fx * slope.denominator != slope.numerator * (i - r):
            x = w.point(i - r)
            witness = {"identity": "phi(x) = C x", "x": fmt(x), "phi(x)": fmt(phi(x)), "C": fmt(alpha)}
            return Extraction(q, s0, None, generator, witness)
    return Extraction(q, s0, alpha, generator)


# ------------------------------------------------------------ quasi-isometry


def qie_check(
    points: Sequence,
    f: Callable,
    K: RationalLike,
    C: RationalLike,
    d_x: Callable = lambda u, v: abs(u - v),
    d_y: Callable = lambda u, v: abs(u - v),
) -> bool:
    """Whether ``f`` satisfies the (K, C) quasi-isometric inequalities on
    every pair of sample points."""
    K, C = Q(K), Q(C)
    if K < 1 or C < 0:
        raise ValueError("need K >= 1 and C >= 0")
    for u, v in combinations(points, 2):
        dx = Q(d_x(u, v))
        dy = Q(d_y(f(u), f(v)))
        if not (dx / K - C <= dy <= K * dx + C):
            return False
    return True
