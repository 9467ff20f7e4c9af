import json
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from conftest import primes
from pslzp.arith import abs_p
from pslzp.rigidity import (
    MissingPoint,
    Parallelogram,
    TabulatedMap,
    Window,
    WindowTooSmall,
    bilipschitz_constant,
    delta_H,
    delta_pair,
    diam,
    extract_affine,
    fundamental_set,
    height_class,
    is_parallelogram,
    linear_map,
    per,
    qie_check,
    s_threshold,
    scale_act,
    shape,
    verify_plemma,
)


def delta_oracle(S, p, span=30):
    """Minimum of diam over an explicit scan of the H-orbit."""
    return min(diam([scale_act(k, x, p) for x in S], p) for k in range(-span, span + 1))


grid = st.builds(Fraction, st.integers(-300, 300), st.sampled_from([1, 2, 3, 4, 5, 9, 25, 6, 15]))


def test_scale_act():
    assert scale_act(0, Fraction(7, 3), 5) == Fraction(7, 3)
    assert scale_act(1, 1, 3) == 9
    assert scale_act(-1, 4, 2) == 1


@given(grid.filter(lambda x: x != 0), primes, st.integers(-3, 3))
def test_scale_act_shifts_both_norms(x, p, k):
    y = scale_act(k, x, p)
    assert abs_p(y, p) == abs_p(x, p) / Fraction(p) ** (2 * k)
    assert abs(y) == abs(x) * Fraction(p) ** (2 * k)


def test_diam_examples():
    assert diam([5], 3) == 0
    assert diam([0, 1], 2) == 1
    assert diam([0, Fraction(1, 2)], 2) == 2
    assert diam([0, 4, 6], 2) == 6


def test_delta_examples():
    assert delta_H([3], 2) == 0
    assert delta_H([0, 1], 3) == 1
    assert delta_H([0, 1], 3) == delta_oracle([0, 1], 3, span=5)
    assert delta_pair(0, Fraction(1, 2), 2) == 2


@given(st.lists(grid, min_size=2, max_size=4), primes)
def test_delta_matches_orbit_scan(S, p):
    assert delta_H(S, p) == delta_oracle(S, p)


@given(st.lists(grid, min_size=1, max_size=4), primes, st.integers(-4, 4), grid)
def test_delta_is_scale_and_translation_invariant(S, p, j, shift):
    moved = [scale_act(j, x, p) + shift for x in S]
    assert delta_H(moved, p) == delta_H(S, p)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_per_and_shape_examples(p):
    P = Parallelogram(0, 1, p * p, p * p + 1)
    assert per(P, p) == delta_H([0, 1], p) + delta_H([0, p * p], p) == 2
    assert shape(P, p) == 2
    assert per(Parallelogram(4, 4, 4, 4), p) == 0
    assert shape(Parallelogram(1, 1, 3, 3), p) is None


def test_parallelogram_relation():
    assert is_parallelogram((0, 1, 2, 3))
    assert not is_parallelogram((0, 1, 2, 4))
    with pytest.raises(ValueError):
        Parallelogram(0, 1, 2, 4)


@given(grid, grid, grid, grid.filter(lambda x: x != 0), grid)
def test_affine_images_are_parallelograms(a, b, c, alpha, beta):
    P = Parallelogram(a, b, c, b - a + c)
    assert is_parallelogram(P.map(lambda x: alpha * x + beta))


@given(grid, grid, grid, primes, st.integers(-3, 3), grid)
def test_per_and_shape_invariance(a, b, c, p, k, shift):
    assume(a != b and a != c)
    P = Parallelogram(a, b, c, b - a + c)
    Q = P.transformed(k, shift, p)
    assert per(Q, p) == per(P, p)
    assert shape(Q, p) == shape(P, p)


def test_fundamental_set_examples():
    fs = fundamental_set(1, 2, 2)
    assert 1 in fs.values and -1 in fs.values
    assert all(-a in fs.values for a in fs.values)
    # delta({0, 1}) = 1 for every p, so D just below 1 leaves nothing
    assert fundamental_set(1, Fraction(99, 100), 3).reps == ()


@pytest.mark.parametrize("p,k,D", [(2, 1, 2), (3, 2, 3), (5, 3, 2), (2, 5, Fraction(5, 2))])
def test_fundamental_set_is_complete(p, k, D):
    fs = fundamental_set(k, D, p)
    reps = set(fs.reps)
    # scan a / (k p^j) directly; each hit must be represented by (a, j mod 2)
    for a in range(-150, 151):
        if a == 0 or a % p == 0:
            continue
        for j in range(-4, 5):
            x = Fraction(a, k) / Fraction(p) ** j
            assert (delta_pair(0, x, p) <= D) == ((a, j % 2) in reps)


def test_threshold_plus_minus_one():
    th = s_threshold(1, 1, 1, 2)
    assert th.index.values == (-1, 1)
    assert (th.B1, th.B2, th.B3, th.B4, th.R) == (2, 1, 1, 0, 0)
    # max(2 ceil(log2 3) + 0, 3 * 1 + 0, 0 + 0)
    assert th.s0 == 4


def test_threshold_R_and_monotonicity():
    assert s_threshold(1, 3, 2, 5).R == 0
    assert s_threshold(26, 3, 2, 5).R == 3
    for p, k in ((2, 1), (3, 2), (5, 3)):
        s0s = [s_threshold(1, k, D, p).s0 for D in (1, Fraction(3, 2), 2, 3, 4, 6)]
        assert s0s == sorted(s0s)


def test_threshold_errors():
    with pytest.raises(ValueError):
        s_threshold(Fraction(1, 2), 1, 1, 2)
    with pytest.raises(ValueError):
        s_threshold(1, 1, Fraction(1, 2), 2)


def test_height_class():
    assert height_class([Fraction(1, 6), Fraction(5, 9)], 2) == 9
    assert height_class([Fraction(1, 8)], 2) == 1


def test_window_grid():
    w = Window(2, 3, 1, 1)
    assert w.step == Fraction(1, 6)
    assert len(w) == 13
    assert Fraction(-1, 2) in w and Fraction(1, 4) not in w
    assert w.points()[0] == -1
    with pytest.raises(ValueError):
        Window(3, 3, 1, 1)


def test_tabulated_map_round_trip(tmp_path):
    w = Window(3, 2, 1, 1)
    phi = linear_map(Fraction(-2, 7), w, k=7, D=3)
    again = TabulatedMap.from_json_lines(phi.to_json_lines().splitlines())
    assert again.table == phi.table
    assert again.meta == phi.meta
    first = json.loads(phi.to_json_lines().splitlines()[1])
    assert first == {"x": "-1", "fx": "2/7"}
    with pytest.raises(MissingPoint):
        phi(5)
    with pytest.raises(ValueError):
        TabulatedMap({0: 1, 1: 1})
    with pytest.raises(ValueError):
        TabulatedMap.from_json_lines(['{"x": "1"}'])


def test_bilipschitz_constant():
    assert bilipschitz_constant(3, 2) == 3
    assert bilipschitz_constant(Fraction(1, 4), 2) == 4
    assert bilipschitz_constant(Fraction(5, 7), 5) == 5
    with pytest.raises(ValueError):
        bilipschitz_constant(0, 2)


def brute_plemma(phi, w, per_bound, s0):
    """Oracle: every corner triple of the window, completed to a
    parallelogram when the fourth corner is also in the window."""
    pts = w.points()
    inside = set(pts)
    p = w.p
    admitted, bad = 0, set()
    for a in pts:
        for b in pts:
            for c in pts:
                d = b - a + c
                if d not in inside or b == a or c == a:
                    continue
                P = Parallelogram(a, b, c, d)
                if per(P, p) <= per_bound and shape(P, p) > s0:
                    admitted += 1
                    if not is_parallelogram(P.map(phi)):
                        bad.add(P.corners())
    return admitted, bad


@pytest.mark.parametrize("p,L,s0", [(2, 3, 0), (3, 2, 0), (2, 3, 1), (5, 2, 0)])
def test_plemma_sweep_matches_brute_force(p, L, s0):
    w = Window(p, L, 2, 1)
    rng = random.Random(p * 100 + L)
    pts = w.points()
    table = {x: x for x in pts}
    x, y = rng.sample([x for x in pts if x != 0], 2)
    table[x], table[y] = table[y], table[x]
    phi = TabulatedMap(table)
    report = verify_plemma(phi, L, w, s0=s0)
    admitted, bad = brute_plemma(phi, w, L, s0)
    assert report.admitted == admitted
    assert {v.P.corners() for v in report.violations} == bad


@pytest.mark.parametrize("p,L", [(2, 3), (3, 5), (5, 3)])
def test_plemma_on_linear_maps(p, L):
    w = Window(p, L, p, 1)
    for alpha in (Fraction(1), Fraction(-3, 2), Fraction(7, 5)):
        report = verify_plemma(linear_map(alpha, w), L, w, s0=0)
        assert report.ok and report.admitted > 0
        derived = verify_plemma(linear_map(alpha, w), L, w)
        assert derived.ok and derived.threshold is not None


def test_plemma_with_unit_perimeter_admits_nothing():
    # delta({0, x}) >= 1 for every nonzero x in Z[1/p], so per >= 2 > 1
    w = Window(3, 1, 9, 1)
    report = verify_plemma(linear_map(1, w), 1, w, s0=0)
    assert report.admitted == 0
    assert verify_plemma(linear_map(1, w), 1, w, per_bound=2, s0=0).admitted > 0


def test_plemma_swap_produces_checked_violations():
    p, L = 5, 3
    # shape above 4 needs sides like 1/15 and 625, so the window reaches p^4
    w = Window(p, L, p**4, 1)
    table = {x: x for x in w.points()}
    a, b = Fraction(1, 15), Fraction(600)
    table[a], table[b] = table[b], table[a]
    phi = TabulatedMap(table, {"K0": 1, "k": 3, "D": 1})
    report = verify_plemma(phi, L, w)
    assert report.s0 == 4
    assert report.violations
    for v in report.violations:
        assert per(v.P, p) <= L and shape(v.P, p) > 4
        assert not is_parallelogram(v.image)
        assert a in v.P.corners() or b in v.P.corners()


def test_plemma_requires_normalized_map():
    w = Window(2, 3, 1, 1)
    phi = TabulatedMap({x: x + 1 for x in w.points()})
    with pytest.raises(ValueError):
        verify_plemma(phi, 3, w, s0=0)
    assert verify_plemma(phi.normalized(), 3, w, s0=0).ok


def test_s0_increment_shrinks_the_family():
    w = Window(2, 3, 2, 1)
    phi = linear_map(1, w)
    base = verify_plemma(phi, 3, w, s0=0)
    tighter = verify_plemma(phi, 3, w, s0=0, s0_increment=2)
    assert tighter.s0 == 2
    assert tighter.admitted < base.admitted


@pytest.mark.parametrize("alpha", [Fraction(3), Fraction(1, 4), Fraction(-5, 3)])
def test_extract_recovers_multiplier(alpha):
    w = Window(2, 1, 1, 6)
    for q in (1, 3):
        phi = linear_map(alpha, w.restrict(q))
        ext = extract_affine(phi, q, w, s0=4)
        assert ext.ok
        assert ext.alpha == alpha
        assert ext.generator == Fraction(1, 2**4 * q)


def test_extract_p_squared_divisor():
    p = 3
    w = Window(p, 1, 1, 4)
    ext = extract_affine(linear_map(Fraction(1, p * p), w), 1, w, s0=2)
    assert ext.alpha == Fraction(1, 9)


def test_extract_reports_witness():
    w = Window(2, 1, 1, 3)
    table = {x: 3 * x for x in w.points()}
    table[Fraction(3, 8)] = Fraction(100)
    ext = extract_affine(TabulatedMap(table), 1, w, s0=2)
    assert not ext.ok
    assert ext.witness["identity"].startswith("phi(x+z)")
    assert ext.to_json()["status"] == "failure"


def test_extract_needs_deep_window():
    w = Window(2, 1, 1, 2)
    with pytest.raises(WindowTooSmall):
        extract_affine(linear_map(3, w), 1, w, s0=5)


def test_qie_examples():
    pts = [Fraction(n) for n in range(1, 11)]
    assert qie_check(pts, lambda x: x, 1, 0)
    assert qie_check(pts, lambda x: 2 * x, 2, 0)
    assert not qie_check(pts, lambda x: x * x, 2, 0)
    # pair (1, 10): 99 > 2 * 9
    assert not qie_check([Fraction(1), Fraction(10)], lambda x: x * x, 2, 0)
