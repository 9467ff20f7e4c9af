from fractions import Fraction
from functools import reduce
from math import lcm

import pytest
from hypothesis import assume, given, strategies as st

from pslzp.arith import prime_to_p
from pslzp.commensurator import (
    conjugate,
    denominator_profile,
    det_denominator_bound,
    diagonal_rescaler,
    in_psl2_zp,
    reduced_words,
    standard_generators,
    transporter,
)
from pslzp.matrix import INF, ProjMatrix, product


def brute_profile(g, gens, maxlen, p):
    """Oracle: multiply out every reduced word, then conjugate."""
    letters = list(gens) + [M.inverse() for M in gens]
    d = 1
    for level in reduced_words(len(gens), maxlen)[1:]:
        for w in level:
            C = conjugate(g, product(letters[i] for i in w))
            d = reduce(lcm, (prime_to_p(x.denominator, p) for x in C.entries), d)
    return d


def test_transporter_example():
    g = transporter(1, 0)
    assert g == ProjMatrix(1, -1, 1, 0)
    assert g(1) == 0 and g(0) is INF
    assert g(Fraction(3)) == Fraction(2, 3)


points = st.one_of(st.just(INF), st.fractions(min_value=-50, max_value=50, max_denominator=30))


@given(points, points)
def test_transporter_sends_pair_to_zero_and_infinity(a, b):
    assume(a != b)
    g = transporter(a, b)
    assert g(a) == 0
    assert g(b) is INF


def test_transporter_rejects_equal_points():
    with pytest.raises(ValueError):
        transporter(2, 2)


def test_conjugation_example():
    M = conjugate(diagonal_rescaler(2), ProjMatrix(1, 1, 0, 1))
    assert M == ProjMatrix(1, Fraction(1, 2), 0, 1)
    assert M.entries == (1, Fraction(1, 2), 0, 1)


def test_diagonal_rescaler():
    assert diagonal_rescaler(3)(6) == 2
    with pytest.raises(ValueError):
        diagonal_rescaler(0)


def test_generators_lie_in_the_group():
    for p in (2, 3, 5):
        for M in standard_generators(p).values():
            assert in_psl2_zp(M, p)
    assert not in_psl2_zp(ProjMatrix(1, Fraction(1, 2), 0, 1), 3)


def test_reduced_word_counts():
    levels = reduced_words(2, 4)
    assert [len(level) for level in levels] == [1, 4, 12, 36, 108]


@pytest.mark.parametrize(
    "g,p",
    [
        (diagonal_rescaler(2), 3),
        (diagonal_rescaler(Fraction(6, 5)), 5),
        (ProjMatrix(1, 2, 3, 4), 2),
        (ProjMatrix(2, 1, 1, 4), 7),
    ],
)
def test_profile_matches_brute_force(g, p):
    gens = standard_generators(p)
    G = [gens["A"], gens["B"]]
    prof = denominator_profile(g, G, 4, p)
    assert prof.d == brute_profile(g, G, 4, p)
    assert det_denominator_bound(g, p) % prof.d == 0


def test_rescaler_profile_is_stable():
    gens = standard_generators(3)
    prof = denominator_profile(diagonal_rescaler(2), [gens["A"], gens["B"]], 6, 3)
    assert prof.stable
    assert prof.d == 2
    assert prof.history == [2] * 6
    assert prof.to_json()["status"] == "STABLE"
    assert prof.words == sum(len(level) for level in reduced_words(2, 6)[1:])


def test_profile_of_group_element_is_trivial():
    gens = standard_generators(5)
    g = gens["A"] @ gens["B"]
    assert denominator_profile(g, [gens["A"], gens["B"]], 3, 5).d == 1


def test_profile_rejects_foreign_generators():
    with pytest.raises(ValueError):
        denominator_profile(diagonal_rescaler(2), [ProjMatrix(1, Fraction(1, 2), 0, 1)], 2, 3)
    with pytest.raises(ValueError):
        denominator_profile(diagonal_rescaler(2), [ProjMatrix(1, 1, 0, 1)], 0, 3)
